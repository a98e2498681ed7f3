"""
Rewiring of Schreier graphs of right-angled groups.

Chain generators s_1..s_k with [s_i, s_{i+1}] = 1.  For an even R we keep

  * every s_1-edge,
  * the s_i-edges leaving a maximal R-separated subset X_i of each s_{i-1}-cycle,
  * every edge leaving an exceptional vertex (ball of radius R+1 not Cayley-like).

An omitted s_i-edge at x is bridged by s_{i-1}^l s_i s_{i-1}^-l through the
nearest kept s_i-edge, so the distortion stays below (2R+1)^k while the edge
density drops to about 1 + (k-1)/R.  Distortion is measured, not trusted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .groups import verify_right_angled
from .schreier import exceptional_vertices, is_connected

UNBOUNDED = math.inf


@dataclass(frozen=True)
class CycleDecomposition:
    generator: int
    cycles: tuple

    @property
    def lengths(self):
        return [len(c) for c in self.cycles]


def cycle_decomposition(graph, i):
    """Cycles of generator ``i`` (0-based), each starting at its smallest vertex."""
    if not 0 <= i < graph.k:
        raise IndexError(f"generator {i} out of range for k={graph.k}")
    perm = graph.out[i].tolist()
    seen = bytearray(len(perm))
    cycles = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        cyc = []
        x = start
        while not seen[x]:
            seen[x] = 1
            cyc.append(x)
            x = perm[x]
        cycles.append(tuple(cyc))
    return CycleDecomposition(i, tuple(cycles))


def separated_positions(L, R):
    """Greedy maximal R-separated positions {0, R, 2R, ...} on a cycle of length L."""
    if L < 1 or R < 1:
        raise ValueError("need L >= 1 and R >= 1")
    return list(range(0, max(1, L // R) * R, R))


def edge_density(n_edges, n_vertices):
    if n_vertices < 1:
        raise ValueError("need at least one vertex")
    return Fraction(int(n_edges), int(n_vertices))


@dataclass(frozen=True, eq=False)
class RewiringResult:
    R: int
    kept: np.ndarray          # (k, N) bool: edge (x, i) is in H
    anchors: np.ndarray       # (k, N) bool: x in X_i
    bad: np.ndarray           # exceptional vertices
    distortion: object        # int, or UNBOUNDED
    budget: int               # (2R+1)^k

    @property
    def k(self):
        return self.kept.shape[0]

    @property
    def n_vertices(self):
        return self.kept.shape[1]

    @property
    def n_edges(self):
        return int(self.kept.sum())

    @property
    def density(self):
        return edge_density(self.n_edges, self.n_vertices)

    @property
    def bad_fraction(self):
        return Fraction(len(self.bad), self.n_vertices)

    @property
    def degenerate(self):
        return len(self.bad) == self.n_vertices

    @property
    def density_bound(self):
        return 1 + Fraction(self.k - 1, self.R) + 2 * self.k * self.bad_fraction

    def omitted_edges(self):
        """Omitted edges (x, i) ordered by generator, then vertex."""
        i, x = np.nonzero(~self.kept)
        return list(zip(x.tolist(), i.tolist()))


def build_rewiring(graph, group, R, *, measure=True):
    if R < 2 or R % 2:
        raise ValueError(f"R must be an even integer >= 2, got {R}")
    cert = verify_right_angled(group)
    if not cert.ok:
        raise ValueError(f"generator chain is not right-angled: first failure {cert.first_failure}")
    if graph.k != group.k:
        raise ValueError("graph and group have different generator counts")
    if not is_connected(graph):
        raise ValueError("graph is disconnected; rewiring distortion would be unbounded")
    k, n = graph.k, graph.n_vertices
    anchors = np.zeros((k, n), dtype=bool)
    anchors[0] = True
    for i in range(1, k):
        for cyc in cycle_decomposition(graph, i - 1).cycles:
            for pos in separated_positions(len(cyc), R):
                anchors[i, cyc[pos]] = True
    bad = exceptional_vertices(graph, group, R)
    kept = anchors.copy()
    kept[:, bad] = True
    dist = bilipschitz_distance(graph, kept) if measure else None
    return RewiringResult(R, kept, anchors, bad, dist, (2 * R + 1) ** k)


def h_adjacency(graph, kept):
    """Adjacency of the kept edge set: per vertex, sorted (neighbour, generator, direction)."""
    adj = [[] for _ in range(graph.n_vertices)]
    out = graph.out.tolist()
    for i, row in enumerate(kept.tolist()):
        oi = out[i]
        for x, keep in enumerate(row):
            if keep:
                y = oi[x]
                adj[x].append((y, i, 0))
                adj[y].append((x, i, 1))
    for lst in adj:
        lst.sort()
    return adj


def _bfs_until(adj, source, target):
    """BFS distances from ``source``; stops once ``target`` is reached."""
    dist = {source: 0}
    if source == target:
        return dist
    frontier = [source]
    d = 0
    while frontier:
        d += 1
        nxt = []
        for u in frontier:
            for v, _, _ in adj[u]:
                if v not in dist:
                    dist[v] = d
                    nxt.append(v)
        if target in dist:
            return dist
        frontier = nxt
    return dist


def shortest_walk(adj, x, y):
    """Lexicographically smallest shortest walk from x to y as (generator, direction) steps.

    Ties are broken on (neighbour index, generator index, direction) at every step,
    direction 0 meaning the edge is traversed forwards.  Returns None if y is unreachable.
    """
    dist = _bfs_until(adj, y, x)
    if x not in dist:
        return None
    walk = []
    u = x
    while u != y:
        du = dist[u]
        for v, i, d in adj[u]:
            if dist.get(v) == du - 1:
                walk.append((i, d))
                u = v
                break
    return walk


def bilipschitz_distance(graph, kept):
    """Exact d_L between the Schreier graph and the sub-edge-set ``kept``.

    Returns ``UNBOUNDED`` when an omitted edge's endpoints are disconnected in H.
    """
    out = graph.out
    # H is a subgraph, so every H-edge has G-distance <= 1 (0 for loops)
    nonloop = out != np.arange(graph.n_vertices)[None]
    best = int((kept & nonloop).any())
    omitted = np.nonzero(~kept)
    if len(omitted[0]) == 0:
        return max(best, int(nonloop.any()))
    adj = h_adjacency(graph, kept)
    for i, x in zip(*(a.tolist() for a in omitted)):
        y = int(out[i, x])
        dist = _bfs_until(adj, x, y)
        if y not in dist:
            return UNBOUNDED
        best = max(best, dist[y])
    return best


def edge_mask(graph, edges):
    """Boolean (k, N) mask from an iterable of (x, i) edges."""
    mask = np.zeros(graph.out.shape, dtype=bool)
    for x, i in edges:
        mask[i, x] = True
    return mask
