import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ranktorsion import (
    FAMILIES, evaluate_word, heisenberg_group, make_action, make_family, sl3_group,
    torus_group, verify_right_angled,
)
from ranktorsion.groups import GeneratorChain, act_word, commutator, sl3_relators
from ranktorsion.schreier import enumerate_ball

SMALL = [
    ("torus", {"k": 2, "n": 5}),
    ("torus", {"k": 3, "n": 3}),
    ("heisenberg", {"n": 3}),
    ("heisenberg", {"n": 4}),
    ("sl3z-principal", {"p": 2}),
    ("sl3z-projective", {"p": 5}),
]


def _mat(A):
    return np.array(A, dtype=object).reshape(3, 3)


def test_family_sizes():
    _, (a,) = make_family("torus", k=2, n=8)
    assert a.n_vertices == 64
    _, (a,) = make_family("sl3z-principal", p=2)
    assert a.n_vertices == 168
    _, (a,) = make_family("sl3z-projective", p=5)
    assert a.n_vertices == 31
    _, acts = make_family("heisenberg", n=[2, 3])
    assert [x.n_vertices for x in acts] == [8, 27]


def test_torus_generator_is_eight_8_cycles():
    _, (a,) = make_family("torus", k=2, n=8)
    p = a.perms[0]
    seen, lengths = set(), []
    for x in range(64):
        if x in seen:
            continue
        L, y = 0, x
        while y not in seen:
            seen.add(y)
            y = int(p[y])
            L += 1
        lengths.append(L)
    assert lengths == [8] * 8


def test_sl3_principal_order_formula():
    for p in (2, 3):
        _, (a,) = make_family("sl3z-principal", p=p)
        assert a.n_vertices == p ** 3 * (p ** 3 - 1) * (p ** 2 - 1)


def test_bad_params():
    with pytest.raises(ValueError):
        make_family("torus", k=1, n=4)
    with pytest.raises(ValueError):
        make_family("heisenberg", n=1)
    with pytest.raises(ValueError):
        make_family("sl3z-principal", p=4)
    with pytest.raises(ValueError):
        make_family("sl3z-projective", p=17)
    with pytest.raises(ValueError):
        make_family("klein-bottle", n=3)
    with pytest.raises(NotImplementedError):
        make_family("sl3-poly", q=2, m=2)


def test_word_examples():
    t = torus_group(2)
    assert evaluate_word(t, [1, 2, -1, -2]) == t.identity
    h = heisenberg_group()
    # chain x, z, y: +1 = x, +2 = z commute
    assert evaluate_word(h, [1, 2, -1, -2]) == h.identity
    assert evaluate_word(h, [1, 3, -1, -3]) == (0, 0, 1)     # [x, y] = z
    s = sl3_group()
    e13 = s.generator(1)
    assert evaluate_word(s, [1, 3, -1, -3]) == e13
    assert evaluate_word(s, []) == s.identity
    with pytest.raises(IndexError):
        evaluate_word(s, [7])
    with pytest.raises(IndexError):
        evaluate_word(t, [0])


def test_sl3_products_against_numpy():
    s = sl3_group()
    rng = random.Random(3)
    for _ in range(50):
        word = [rng.choice([1, 2, 3, 4, 5, 6]) * rng.choice([1, -1]) for _ in range(8)]
        ref = np.eye(3, dtype=object)
        for w in word:
            g = _mat(s.generator(abs(w) - 1))
            ref = ref.dot(g if w > 0 else _mat(s.inv(s.generator(abs(w) - 1))))
        got = _mat(evaluate_word(s, word))
        assert (got == ref).all()
        a, b, c, d, e, f, g, h, i = evaluate_word(s, word)
        assert a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g) == 1


@pytest.mark.parametrize("group", [torus_group(2), torus_group(4), heisenberg_group(), sl3_group()],
                         ids=["torus2", "torus4", "heisenberg", "sl3"])
def test_relators_evaluate_to_identity(group):
    for r in group.relators:
        assert evaluate_word(group, r) == group.identity


def test_sl3_relator_count_and_shape():
    rels = sl3_relators(((1, 2), (1, 3), (2, 3), (2, 1), (3, 1), (3, 2)))
    assert len(rels) == 13
    assert sum(1 for r in rels if len(r) == 4) == 6
    assert sum(1 for r in rels if len(r) == 5) == 6
    assert max(len(r) for r in rels) == 12


@pytest.mark.parametrize("tag,params", SMALL)
def test_relators_act_trivially(tag, params):
    group, action = make_action(tag, **params)
    ident = np.arange(action.n_vertices)
    for r in group.relators:
        assert (action.word_permutation(list(r)) == ident).all()
    for p, q in zip(action.perms, action.inv_perms):
        assert (p[q] == ident).all()


@pytest.mark.parametrize("tag,params", SMALL)
def test_action_consistency_random_words(tag, params):
    group, action = make_action(tag, **params)
    rng = random.Random(11)
    k = group.k
    for _ in range(1000):
        word = [rng.randint(1, k) * rng.choice([1, -1]) for _ in range(rng.randint(0, 20))]
        assert action.project(evaluate_word(group, word)) == act_word(action, 0, word)


@pytest.mark.parametrize("group,radius", [(torus_group(2), 6), (heisenberg_group(), 6), (sl3_group(), 3)],
                         ids=["torus", "heisenberg", "sl3"])
def test_encoding_injective_on_ball(group, radius):
    ball = enumerate_ball(group, radius)
    encodings = {group.encode(g) for g, _ in ball}
    assert len(encodings) == len(ball)
    # witness words really evaluate to their elements
    for g, w in ball[:: max(1, len(ball) // 200)]:
        assert evaluate_word(group, w) == g


def test_certificates():
    cert = verify_right_angled(torus_group(3))
    assert cert.ok and cert.first_failure is None
    cert = verify_right_angled(sl3_group())
    assert cert.commuting_pairs == (True,) * 5
    assert cert.infinite_order == (True,) * 6
    cert = verify_right_angled(heisenberg_group())
    assert cert.ok
    bad = sl3_group(order=((1, 2), (2, 3), (1, 3), (2, 1), (3, 1), (3, 2)))
    cert = verify_right_angled(bad)
    assert not cert.ok
    assert cert.first_failure == ("pair", 0)


def test_chain_labels():
    assert GeneratorChain(("a", "b")).k == 2
    with pytest.raises(ValueError):
        GeneratorChain(("a", "a"))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 3).flatmap(lambda i: st.sampled_from([i, -i])), max_size=16))
def test_heisenberg_matches_unitriangular_matrices(word):
    h = heisenberg_group()
    ref = np.eye(3, dtype=object)
    for w in word:
        a, b, c = h.generator(abs(w) - 1)
        m = np.array([[1, a, c], [0, 1, b], [0, 0, 1]], dtype=object)
        if w < 0:
            m = np.array([[1, -a, a * b - c], [0, 1, -b], [0, 0, 1]], dtype=object)
        ref = ref.dot(m)
    a, b, c = evaluate_word(h, word)
    assert (a, b, c) == (ref[0, 1], ref[1, 2], ref[0, 2])


def test_family_list():
    assert set(FAMILIES) == {"torus", "heisenberg", "sl3z-principal", "sl3z-projective"}
    assert commutator(1, 2) == [1, 2, -1, -2]
    for tag in FAMILIES:
        params = {"n": 3} if tag in ("torus", "heisenberg") else {"p": 3}
        group, action = make_action(tag, **params)
        assert group.k == action.k
