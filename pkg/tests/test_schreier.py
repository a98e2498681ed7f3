import numpy as np
import pytest

from ranktorsion import (
    BallTooLarge, ball_code, build_schreier, cayley_ball, exceptional_vertices,
    heisenberg_group, is_connected, make_action, sl3_group, torus_group,
)
from ranktorsion.schreier import BOUNDARY, LabeledSchreierGraph, dump_graph, load_graph


def graph_of(tag, **params):
    group, action = make_action(tag, **params)
    return group, build_schreier(action)


def test_build_counts():
    _, g = graph_of("torus", k=2, n=8)
    assert (g.n_vertices, g.n_edges) == (64, 128)
    _, g = graph_of("sl3z-principal", p=2)
    assert (g.n_vertices, g.n_edges) == (168, 1008)
    _, g = graph_of("sl3z-projective", p=5)
    assert (g.n_vertices, g.n_edges) == (31, 186)


def test_non_bijective_action_rejected():
    class Fake:
        perms = np.array([[0, 0, 1]])
        transitive_labels = False
    with pytest.raises(ValueError):
        build_schreier(Fake())


def test_torus_ball_sizes():
    t = torus_group(2)
    for r in range(6):
        assert cayley_ball(t, r).n_vertices == 2 * r * r + 2 * r + 1


def test_heisenberg_ball_merges():
    h = heisenberg_group()
    free_bound = 1 + 6 + 6 * 5        # reduced words of length <= 2 over 3 generators
    size = cayley_ball(h, 2).n_vertices
    assert size < free_bound
    # each commuting pair merges 4 of the length-2 words
    assert size == free_bound - 8


def test_ball_code_layout():
    t = torus_group(2)
    code = cayley_ball(t, 1).code
    # root, then a1, a1^-1, a2, a2^-1 in discovery order
    assert code[0] == (1, 2, 3, 4)
    assert code[1] == (BOUNDARY, 0, BOUNDARY, BOUNDARY)


def test_ball_guard_reports_radius():
    with pytest.raises(BallTooLarge) as info:
        cayley_ball(sl3_group(), 4, limit=1000)
    assert info.value.radius == 4


def test_exceptional_examples():
    group, g = graph_of("torus", k=2, n=8)
    assert len(exceptional_vertices(g, group, 2)) == 0
    group, g = graph_of("torus", k=2, n=6)
    assert len(exceptional_vertices(g, group, 2)) == 36
    group, g = graph_of("sl3z-principal", p=2)
    assert len(exceptional_vertices(g, group, 1)) == 168


def test_transitivity_shortcut_agrees():
    for tag, params, R in [("torus", {"k": 2, "n": 8}, 2), ("torus", {"k": 2, "n": 6}, 2),
                           ("heisenberg", {"n": 4}, 2), ("sl3z-principal", {"p": 2}, 1)]:
        group, g = graph_of(tag, **params)
        fast = exceptional_vertices(g, group, R)
        slow = exceptional_vertices(g, group, R, use_transitivity=False)
        assert np.array_equal(fast, slow)
        assert len(fast) in (0, g.n_vertices)


def test_projective_mixed_bad_set_is_a_real_subset():
    group, g = graph_of("sl3z-projective", p=3)
    bad = exceptional_vertices(g, group, 0)
    assert 0 <= len(bad) <= g.n_vertices
    assert list(bad) == sorted(bad)


def test_graf_trend_torus():
    fractions = []
    for n in (8, 16, 32, 64):
        group, g = graph_of("torus", k=2, n=n)
        fractions.append(len(exceptional_vertices(g, group, 2)) / g.n_vertices)
    assert fractions == [0.0] * 4


def test_ball_code_deterministic():
    group, g = graph_of("heisenberg", n=8)
    a = ball_code(g, 7, 3)
    b = ball_code(g, 7, 3)
    assert a == b
    assert a == cayley_ball(group, 3)


def test_connectivity():
    _, g = graph_of("torus", k=2, n=4)
    assert is_connected(g)
    mask = np.zeros(g.out.shape, dtype=bool)
    mask[0] = True                        # only a1-edges: four separate cycles
    assert not is_connected(g, mask)


def test_dump_roundtrip():
    _, g = graph_of("sl3z-projective", p=3)
    text = dump_graph(g)
    assert text.splitlines()[0].startswith("0 1→")
    back = load_graph(text)
    assert isinstance(back, LabeledSchreierGraph)
    assert np.array_equal(back.out, g.out)
    assert np.array_equal(back.inv, g.inv)
