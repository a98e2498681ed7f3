"""
From a rewiring to a generating set of the coset-action groupoid.

Kept edges carry their own generator.  Every omitted edge e = (x, i) gets a
shortest walk in H from x to x.s_i; the walk's product w may differ from s_i
by g(e) = s_i w^-1, an element of the stabiliser of x.  The arrows (x, g(e))
with g(e) != 1 form the correction set I, and H together with I generates the
groupoid, which bounds the rank gradient from above by (|H| + |I|)/N - 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .groups import act_word, evaluate_word, invert_word
from .rewire import h_adjacency, shortest_walk


@dataclass(frozen=True, eq=False)
class LabeledRewiring:
    kept: object              # (k, N) bool mask of H
    walks: dict               # omitted (x, i) -> word of the chosen H-walk
    products: dict            # omitted (x, i) -> group element of that walk

    @property
    def max_walk(self):
        return max((len(w) for w in self.walks.values()), default=1)


@dataclass(frozen=True, eq=False)
class CorrectionSet:
    entries: tuple            # sorted (x, g) pairs, g != identity
    witnesses: dict           # (x, g) -> witness word of g
    sources: dict             # (x, g) -> the omitted edge that first produced it
    edge_elements: dict       # omitted (x, i) -> g(e), identity included
    n_vertices: int

    def __len__(self):
        return len(self.entries)

    @property
    def measure(self):
        return Fraction(len(self.entries), self.n_vertices)


@dataclass(frozen=True)
class RankBound:
    upper: Fraction
    fixed_point_bound: Fraction | None = None


def _walk_word(walk):
    return tuple(i + 1 if d == 0 else -(i + 1) for i, d in walk)


def label_rewiring(graph, rewiring, group):
    """Gamma-labeling of H: each omitted edge gets its lexicographically least shortest walk."""
    kept = rewiring.kept if hasattr(rewiring, "kept") else rewiring
    adj = h_adjacency(graph, kept)
    walks, products = {}, {}
    out = graph.out
    for i in range(graph.k):
        for x in (~kept[i]).nonzero()[0].tolist():
            walk = shortest_walk(adj, x, int(out[i, x]))
            if walk is None:
                raise ValueError(f"H is disconnected: no walk for omitted edge ({x}, {i})")
            word = _walk_word(walk)
            walks[(x, i)] = word
            products[(x, i)] = evaluate_word(group, word)
    return LabeledRewiring(kept, walks, products)


class _Action:
    # minimal adaptor so act_word can run on a Schreier graph
    def __init__(self, graph):
        self.perms, self.inv_perms = graph.out, graph.inv


def correction_set(graph, labeling, group):
    action = _Action(graph)
    entries, witnesses, per_edge = {}, {}, {}
    for (x, i), prod in labeling.products.items():
        g = group.mul(group.generator(i), group.inv(prod))
        per_edge[(x, i)] = g
        if group.is_identity(g):
            continue
        word = (i + 1,) + tuple(invert_word(labeling.walks[(x, i)]))
        if act_word(action, x, word) != x:
            raise RuntimeError(f"correction element for edge ({x}, {i}) does not fix its vertex")
        if (x, g) not in entries:
            entries[(x, g)] = (x, i)
            witnesses[(x, g)] = word
    ordered = tuple(sorted(entries, key=lambda e: (e[0], e[1])))
    return CorrectionSet(ordered, witnesses, entries, per_edge, graph.n_vertices)


def rank_upper_bound(n_edges_h, n_vertices, correction, gamma=None):
    """Upper bound (|H| + |I|)/N - 1 on r(Gamma, Gamma_n), plus the fixed-point-sum variant.

    ``gamma`` is the sum of fixed-point fractions over the ball S^(D^2+1) minus the
    identity; when given, ``fixed_point_bound`` = |H|/N - 1 + gamma.
    """
    upper = Fraction(n_edges_h + len(correction), n_vertices) - 1
    loose = None if gamma is None else Fraction(n_edges_h, n_vertices) - 1 + gamma
    return RankBound(upper, loose)


def abelian_rank_lower_bound(invariant_factors, betti):
    """d(H_1) = betti + number of invariant factors > 1, a lower bound for d(Gamma_n)."""
    return int(betti) + sum(1 for f in invariant_factors if f > 1)
