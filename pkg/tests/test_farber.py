from fractions import Fraction

import numpy as np
import pytest

from ranktorsion import (
    BallTooLarge, build_rewiring, build_schreier, correction_set, fixed_point_fraction,
    gamma_sum, label_rewiring, make_action,
)


def test_torus_fractions():
    _, a = make_action("torus", k=2, n=8)
    assert fixed_point_fraction(a, [1]).fraction == 0
    rep = fixed_point_fraction(a, [1] * 8)
    assert rep.fixed == 64 and rep.fraction == 1


def projective_point_count_on_line(p):
    # points [a:b:c] with a = 0: the fixed line of E12 acting on row vectors
    return p + 1


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_projective_e12(p):
    _, a = make_action("sl3z-projective", p=p)
    rep = fixed_point_fraction(a, [1])
    assert rep.fraction == Fraction(projective_point_count_on_line(p), p * p + p + 1)
    # brute force on the points themselves: v E12 = v iff the first coordinate vanishes
    pts = [(x, y, z) for x in range(p) for y in range(p) for z in range(p) if (x, y, z) != (0, 0, 0)]
    fixed_vectors = sum(1 for x, y, z in pts if x % p == 0)
    assert Fraction(fixed_vectors // (p - 1), p * p + p + 1) == rep.fraction


def test_principal_dichotomy():
    _, a = make_action("sl3z-principal", p=3)
    for word in ([1], [1, 1, 1], [1, 4], [1, 2, -1, -2]):
        assert fixed_point_fraction(a, word).fraction in (0, 1)


def test_farber_trend_projective():
    fracs = []
    for p in (3, 5, 7, 11):
        _, a = make_action("sl3z-projective", p=p)
        fracs.append(fixed_point_fraction(a, [1, 6]).fraction)
    assert all(x >= y for x, y in zip(fracs[1:], fracs[2:]))


def test_gamma_examples():
    group, a = make_action("torus", k=2, n=64)
    assert gamma_sum(a, group, 2) == 0
    group, a = make_action("torus", k=2, n=4)
    assert gamma_sum(a, group, 2) >= 1
    group, a = make_action("torus", k=2, n=8)
    assert gamma_sum(a, group, 0) == 0


def test_gamma_counts_identity_acting_elements():
    # in the regular action of SL(3, Z/2), E12^2 acts trivially but is not 1 in SL(3, Z)
    group, a = make_action("sl3z-principal", p=2)
    assert gamma_sum(a, group, 1) >= 6


def test_gamma_guard():
    group, a = make_action("sl3z-projective", p=3)
    with pytest.raises(BallTooLarge) as info:
        gamma_sum(a, group, 2, limit=500)
    assert info.value.radius == 5


def test_gamma_bounds_correction_measure():
    for tag, params, R in [("torus", {"k": 2, "n": 16}, 2), ("heisenberg", {"n": 8}, 2)]:
        group, a = make_action(tag, **params)
        g = build_schreier(a)
        rw = build_rewiring(g, group, R)
        cs = correction_set(g, label_rewiring(g, rw, group), group)
        assert cs.measure <= gamma_sum(a, group, rw.distortion)


def test_fraction_bounds():
    _, a = make_action("heisenberg", n=3)
    rng = np.random.default_rng(0)
    for _ in range(30):
        word = [int(w) for w in rng.choice([1, -1, 2, -2, 3, -3], size=rng.integers(0, 9))]
        f = fixed_point_fraction(a, word).fraction
        assert 0 <= f <= 1
        perm = a.word_permutation(word)
        assert (f == 1) == bool((perm == np.arange(a.n_vertices)).all())
