"""
Labeled Schreier graphs, rooted ball codes and exceptional vertices.

Labeled Schreier graphs are edge-deterministic: from every vertex there is
exactly one edge per signed generator.  A generator-ordered BFS from the root
therefore discovers the ball in a canonical order, and recording, for every
discovered vertex and signed generator, the discovery index of the neighbour
(or -1 when it lies outside the ball) gives a complete invariant for rooted
labeled isomorphism of balls.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components


BALL_LIMIT = 10 ** 7
BOUNDARY = -1


class BallTooLarge(ValueError):
    def __init__(self, radius, limit):
        super().__init__(f"Cayley ball of radius {radius} exceeds {limit} elements")
        self.radius = radius
        self.limit = limit


@dataclass(frozen=True, eq=False)
class LabeledSchreierGraph:
    """Vertices 0..N-1 and one labeled edge (x, i) from x to ``out[i][x]`` per generator."""

    out: np.ndarray
    inv: np.ndarray
    transitive_labels: bool = False

    @property
    def n_vertices(self):
        return self.out.shape[1]

    @property
    def k(self):
        return self.out.shape[0]

    @property
    def n_edges(self):
        return self.out.size

    def neighbours(self):
        """Per-vertex list of (neighbour, generator, direction) with direction 0 = forward."""
        out, inv = self.out.tolist(), self.inv.tolist()
        return [[(out[i][x], i, 0) for i in range(self.k)] + [(inv[i][x], i, 1) for i in range(self.k)]
                for x in range(self.n_vertices)]


@dataclass(frozen=True)
class BallCode:
    radius: int
    code: tuple

    @property
    def n_vertices(self):
        return len(self.code)


def build_schreier(action):
    perms = np.array(action.perms, dtype=np.int64, copy=True)
    for p in perms:
        if not np.array_equal(np.sort(p), np.arange(p.size)):
            raise ValueError("action contains a non-bijective generator")
    inv = np.empty_like(perms)
    for i, p in enumerate(perms):
        inv[i, p] = np.arange(p.size)
    return LabeledSchreierGraph(perms, inv, bool(action.transitive_labels))


def _ball_code(root, steps, radius, limit=BALL_LIMIT):
    order = [root]
    index = {root: 0}
    depth = [0]
    head = 0
    while head < len(order):
        if depth[head] < radius:
            v = order[head]
            for f in steps:
                w = f(v)
                if w not in index:
                    index[w] = len(order)
                    order.append(w)
                    depth.append(depth[head] + 1)
                    if len(order) > limit:
                        raise BallTooLarge(radius, limit)
        head += 1
    code = tuple(tuple(index.get(f(v), BOUNDARY) for f in steps) for v in order)
    return BallCode(radius, code), order


def _group_steps(group):
    gens = [group.generator(i) for i in range(group.k)]
    invs = [group.inv(g) for g in gens]
    mul = group.mul
    steps = []
    for g, h in zip(gens, invs):
        steps.append(lambda v, g=g: mul(v, g))
        steps.append(lambda v, h=h: mul(v, h))
    return steps


def _graph_steps(graph):
    out, inv = graph.out.tolist(), graph.inv.tolist()
    steps = []
    for i in range(graph.k):
        steps.append(out[i].__getitem__)
        steps.append(inv[i].__getitem__)
    return steps


def cayley_ball(group, radius, limit=BALL_LIMIT):
    """Canonical code of the rooted ball B_r(Cay(Gamma, S), e)."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    code, _ = _ball_code(group.identity, _group_steps(group), radius, limit)
    return code


def enumerate_ball(group, radius, limit=BALL_LIMIT):
    """Distinct elements of the Cayley ball of the given radius with witness words.

    Returns a list of (element, word) in BFS order; word lengths equal word-metric
    distances from the identity.
    """
    gens = [group.generator(i) for i in range(group.k)]
    letters = []
    for i, g in enumerate(gens):
        letters.append((i + 1, g))
        letters.append((-(i + 1), group.inv(g)))
    out = [(group.identity, ())]
    seen = {group.identity}
    frontier = out[:]
    for _ in range(radius):
        nxt = []
        for el, word in frontier:
            for letter, g in letters:
                w = group.mul(el, g)
                if w not in seen:
                    seen.add(w)
                    nxt.append((w, word + (letter,)))
                    if len(seen) > limit:
                        raise BallTooLarge(radius, limit)
        out.extend(nxt)
        frontier = nxt
    return out


def ball_code(graph, vertex, radius):
    code, _ = _ball_code(int(vertex), _graph_steps(graph), radius)
    return code


def exceptional_vertices(graph, group, R, *, use_transitivity=True):
    """Vertices whose (R+1)-ball is not isomorphic to the Cayley ball of radius R+1.

    For graphs with label-preserving vertex transitivity (normal subgroups) a single
    comparison decides all vertices at once.
    """
    if R < 0:
        raise ValueError("R must be >= 0")
    reference = cayley_ball(group, R + 1)
    steps = _graph_steps(graph)
    if use_transitivity and graph.transitive_labels:
        code, _ = _ball_code(0, steps, R + 1)
        return np.arange(graph.n_vertices) if code != reference else np.zeros(0, dtype=np.int64)
    bad = [v for v in range(graph.n_vertices) if _ball_code(v, steps, R + 1)[0] != reference]
    return np.array(bad, dtype=np.int64)


def is_connected(graph, mask=None):
    """Connectivity of the graph, or of its sub-edge-set selected by a (k, N) boolean mask."""
    n = graph.n_vertices
    src = np.repeat(np.arange(n)[None], graph.k, axis=0)
    sel = np.ones_like(graph.out, dtype=bool) if mask is None else mask
    a = coo_matrix((np.ones(sel.sum()), (src[sel], graph.out[sel])), shape=(n, n))
    return connected_components(a, directed=False)[0] == 1


def dump_graph(graph):
    """Adjacency text: one line per vertex, ``v i→w`` with 1-based generator i."""
    out = graph.out.tolist()
    lines = []
    for x in range(graph.n_vertices):
        lines.append(" ".join([str(x)] + [f"{i + 1}→{out[i][x]}" for i in range(graph.k)]))
    return "\n".join(lines) + "\n"


def load_graph(text):
    rows = [line.split() for line in text.splitlines() if line.strip()]
    k = len(rows[0]) - 1
    out = np.empty((k, len(rows)), dtype=np.int64)
    for line in rows:
        x = int(line[0])
        for tok in line[1:]:
            i, w = tok.split("→")
            out[int(i) - 1, x] = int(w)
    inv = np.empty_like(out)
    for i, p in enumerate(out):
        inv[i, p] = np.arange(p.size)
    return LabeledSchreierGraph(out, inv)
