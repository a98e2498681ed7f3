from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ranktorsion import (
    abelian_rank_lower_bound, build_rewiring, build_schreier, correction_set, evaluate_word,
    homology, label_rewiring, make_action, rank_upper_bound,
)
from ranktorsion.groups import act_word
from ranktorsion.rewire import edge_mask
from ranktorsion.schreier import is_connected


def setup(tag, R=None, **params):
    group, action = make_action(tag, **params)
    g = build_schreier(action)
    rw = build_rewiring(g, group, R) if R else None
    return group, action, g, rw


def test_torus_walk_example():
    group, _, g, rw = setup("torus", R=2, k=2, n=8)
    lab = label_rewiring(g, rw, group)
    # vertex 1 = (1, 0): its b-edge is omitted; nearest kept b-edge is one a-step back
    assert not rw.kept[1, 1]
    assert lab.walks[(1, 1)] == (-1, 2, 1)
    assert lab.products[(1, 1)] == group.generator(1)
    assert lab.max_walk == 3


def test_identity_rewiring_has_no_walks():
    group, _, g, _ = setup("heisenberg", n=3)
    lab = label_rewiring(g, np.ones(g.out.shape, dtype=bool), group)
    assert lab.walks == {}
    assert len(correction_set(g, lab, group)) == 0


def test_torus_correction_empty_and_bound():
    for n, R in ((8, 2), (16, 4), (32, 2)):
        group, _, g, rw = setup("torus", R=R, k=2, n=n)
        cs = correction_set(g, label_rewiring(g, rw, group), group)
        assert len(cs) == 0
        assert rank_upper_bound(rw.n_edges, g.n_vertices, cs).upper == Fraction(1, R)


def test_rank_bound_examples():
    group, _, g, rw = setup("torus", R=2, k=2, n=8)
    cs = correction_set(g, label_rewiring(g, rw, group), group)
    b = rank_upper_bound(96, 64, cs, gamma=Fraction(0))
    assert b.upper == Fraction(1, 2)
    assert b.fixed_point_bound == Fraction(1, 2)
    # the true value r = (2-1)/64 sits below
    assert Fraction(1, 64) <= b.upper
    group, _, g, rw = setup("torus", R=8, k=2, n=64)
    cs = correction_set(g, label_rewiring(g, rw, group), group)
    assert rank_upper_bound(rw.n_edges, g.n_vertices, cs).upper == Fraction(1, 8)
    # H = G: the trivial bound k - 1
    assert rank_upper_bound(3 * 27, 27, cs).upper == 2


def test_lower_bound_examples():
    assert abelian_rank_lower_bound((), 2) == 2
    assert abelian_rank_lower_bound((3,), 2) == 3
    group, action, g, _ = setup("heisenberg", n=2)
    snf = homology(group, g)
    assert snf.invariants() == (2, (2,))
    assert abelian_rank_lower_bound(snf.torsion, snf.betti) == 3


def test_disconnected_h_rejected():
    group, _, g, _ = setup("torus", k=2, n=4)
    mask = np.zeros(g.out.shape, dtype=bool)
    mask[0] = True
    with pytest.raises(ValueError):
        label_rewiring(g, mask, group)


def random_connected_mask(g, draw, keep_prob):
    """Random sub-edge-set that still connects the graph (a spanning tree is forced in)."""
    n, k = g.n_vertices, g.k
    flags = draw(st.lists(st.floats(0, 1), min_size=k * n, max_size=k * n))
    mask = np.array(flags).reshape(k, n) < keep_prob
    # force a BFS tree so H stays connected
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for i in range(k):
                y = int(g.out[i, x])
                if y not in seen:
                    seen.add(y)
                    mask[i, x] = True
                    nxt.append(y)
                z = int(g.inv[i, x])
                if z not in seen:
                    seen.add(z)
                    mask[i, z] = True
                    nxt.append(z)
        frontier = nxt
    return mask


@settings(max_examples=20, deadline=None)
@given(st.data())
def test_correction_elements_fix_their_vertex(data):
    tag, params = data.draw(st.sampled_from([
        ("heisenberg", {"n": 3}), ("heisenberg", {"n": 4}), ("sl3z-projective", {"p": 3}),
        ("sl3z-projective", {"p": 5}), ("torus", {"k": 2, "n": 5}),
    ]))
    group, action, g, _ = setup(tag, **params)
    mask = random_connected_mask(g, data.draw, data.draw(st.floats(0.2, 0.9)))
    assert is_connected(g, mask)
    lab = label_rewiring(g, mask, group)
    cs = correction_set(g, lab, group)
    for x, elem in cs.entries:
        word = cs.witnesses[(x, elem)]
        assert evaluate_word(group, word) == elem
        assert act_word(action, x, list(word)) == x
        assert len(word) <= lab.max_walk + 1
    if tag in ("torus", "heisenberg"):
        # normal subgroups: every stabiliser is Gamma_n itself, i.e. coordinates divisible by n
        for _, elem in cs.entries:
            assert all(c % params["n"] == 0 for c in elem)


def test_walks_stay_in_h():
    group, _, g, rw = setup("heisenberg", R=2, n=8)
    lab = label_rewiring(g, rw, group)
    for (x, i), word in lab.walks.items():
        u = x
        for w in word:
            j = abs(w) - 1
            if w > 0:
                assert rw.kept[j, u]
                u = int(g.out[j, u])
            else:
                u = int(g.inv[j, u])
                assert rw.kept[j, u]
        assert u == g.out[i, x]
        assert len(word) <= rw.distortion


def test_mask_helper():
    _, _, g, _ = setup("torus", k=2, n=3)
    m = edge_mask(g, [(0, 1), (2, 0)])
    assert m.sum() == 2 and m[1, 0] and m[0, 2]
