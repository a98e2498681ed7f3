"""
Built-in right-angled group families with exact element arithmetic.

Elements are tuples of Python ints (so arbitrary precision comes for free)
and the tuple itself is the canonical encoding used for deduplication:

    torus        (x_1, ..., x_k)                 Z^k
    heisenberg   (a, b, c)  <->  [[1,a,c],[0,1,b],[0,0,1]]
    sl3z-*       row-major 3x3 integer matrix, det 1

Words are lists of signed, 1-based generator indices: ``+i`` is the i-th
chain generator, ``-i`` its inverse.  Commutators use ``[a,b] = a b a^-1 b^-1``.

Each family also knows its finite quotients.  ``make_family`` returns the
group together with the right-coset permutation action on Gamma/Gamma_n for
every requested size parameter.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

__all__ = [
    "FAMILIES", "GeneratorChain", "GroupInstance", "PermutationAction",
    "RightAngledCertificate", "make_family", "make_action",
    "evaluate_word", "verify_right_angled", "commutator", "invert_word",
    "signed_generators", "sl3_chain", "sl3_group", "act_word",
    "torus_group", "heisenberg_group", "sl3_relators",
]

FAMILIES = ("torus", "heisenberg", "sl3z-principal", "sl3z-projective")
SL3_PRIMES = (2, 3, 5, 7, 11, 13)
SL3_DEFAULT_ORDER = ((1, 2), (1, 3), (2, 3), (2, 1), (3, 1), (3, 2))


def commutator(a, b):
    """The word [a, b] = a b a^-1 b^-1 for signed generator indices a, b."""
    return [a, b, -a, -b]


def invert_word(word):
    return [-w for w in reversed(word)]


def signed_generators(k):
    """Canonical signed-generator order (s1, s1^-1, s2, s2^-1, ...) as (index, sign)."""
    return [(i, s) for i in range(k) for s in (1, -1)]


@dataclass(frozen=True)
class GeneratorChain:
    labels: tuple

    def __post_init__(self):
        if len(self.labels) < 1:
            raise ValueError("a generator chain needs at least one generator")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError(f"duplicate generator labels in {self.labels}")

    @property
    def k(self):
        return len(self.labels)


# -- exact arithmetic ---------------------------------------------------------

class _Torus:
    def __init__(self, k):
        self.k = k
        self.identity = (0,) * k
        self.generators = [tuple(int(i == j) for j in range(k)) for i in range(k)]

    def mul(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def inv(self, a):
        return tuple(-x for x in a)


class _Heisenberg:
    identity = (0, 0, 0)
    # chain order x, z, y
    generators = [(1, 0, 0), (0, 0, 1), (0, 1, 0)]

    def mul(self, g, h):
        a, b, c = g
        x, y, z = h
        return (a + x, b + y, c + z + a * y)

    def inv(self, g):
        a, b, c = g
        return (-a, -b, a * b - c)


def _mat_mul(A, B):
    return tuple(
        A[3 * r] * B[c] + A[3 * r + 1] * B[3 + c] + A[3 * r + 2] * B[6 + c]
        for r in range(3) for c in range(3)
    )


def _elementary(i, j, t=1):
    m = [1, 0, 0, 0, 1, 0, 0, 0, 1]
    m[3 * (i - 1) + (j - 1)] = t
    return tuple(m)


class _SL3:
    identity = _elementary(1, 1, 1)

    def __init__(self, order):
        self.order = tuple(order)
        self.generators = [_elementary(i, j) for i, j in self.order]

    mul = staticmethod(_mat_mul)

    def inv(self, A):
        # adjugate; det is 1
        a, b, c, d, e, f, g, h, i = A
        return (e * i - f * h, c * h - b * i, b * f - c * e,
                f * g - d * i, a * i - c * g, c * d - a * f,
                d * h - e * g, b * g - a * h, a * e - b * d)


@dataclass(frozen=True, eq=False)
class GroupInstance:
    """A finitely presented right-angled group with exact arithmetic.

    ``relators`` are words in signed 1-based chain indices.  ``arith`` supplies
    ``identity``, ``generators``, ``mul`` and ``inv``.
    """

    family: str
    chain: GeneratorChain
    relators: tuple
    arith: object = field(repr=False)
    params: tuple = ()

    @property
    def k(self):
        return self.chain.k

    @property
    def identity(self):
        return self.arith.identity

    def generator(self, i):
        """Generator with 0-based chain index ``i``."""
        return self.arith.generators[i]

    def mul(self, a, b):
        return self.arith.mul(a, b)

    def inv(self, a):
        return self.arith.inv(a)

    def is_identity(self, a):
        return a == self.arith.identity

    def encode(self, a):
        return tuple(a)

    @property
    def max_relator_length(self):
        return max((len(r) for r in self.relators), default=1)


def evaluate_word(group, word):
    """Left-to-right product of the word's letters; the empty word is the identity."""
    gens = group.arith.generators
    invs = [group.inv(g) for g in gens]
    k = len(gens)
    out = group.identity
    for w in word:
        if w == 0 or abs(w) > k:
            raise IndexError(f"generator index {w} out of range for k={k}")
        out = group.mul(out, gens[w - 1] if w > 0 else invs[-w - 1])
    return out


def torus_group(k):
    if k < 1:
        raise ValueError("torus rank must be >= 1")
    rels = tuple(tuple(commutator(i, j)) for i, j in combinations(range(1, k + 1), 2))
    return GroupInstance("torus", GeneratorChain(tuple(f"a{i}" for i in range(1, k + 1))),
                         rels, _Torus(k), (("k", k),))


def heisenberg_group():
    # chain indices: 1 = x, 2 = z, 3 = y
    x, z, y = 1, 2, 3
    rels = (tuple(commutator(x, z)), tuple(commutator(y, z)),
            tuple(commutator(x, y) + [-z]))
    return GroupInstance("heisenberg", GeneratorChain(("x", "z", "y")), rels, _Heisenberg())


def sl3_relators(order):
    """Steinberg relations for SL(3,Z) plus (E12 E21^-1 E12)^4, over the given order."""
    idx = {pair: n + 1 for n, pair in enumerate(order)}
    rels = []
    pairs = list(order)
    for p, q in combinations(pairs, 2):
        (i, j), (kk, l) = p, q
        if j != kk and i != l:
            rels.append(tuple(commutator(idx[p], idx[q])))
    for (i, j) in pairs:
        for (j2, kk) in pairs:
            if j2 == j and kk != i:
                # [E_ij, E_jk] E_ik^-1
                rels.append(tuple(commutator(idx[(i, j)], idx[(j, kk)]) + [-idx[(i, kk)]]))
    a, b = idx[(1, 2)], idx[(2, 1)]
    rels.append(tuple([a, -b, a] * 4))
    return tuple(rels)


def sl3_chain(order=SL3_DEFAULT_ORDER):
    return GeneratorChain(tuple(f"E{i}{j}" for i, j in order))


def sl3_group(family="sl3z-principal", order=SL3_DEFAULT_ORDER):
    order = tuple(tuple(p) for p in order)
    if sorted(order) != sorted(SL3_DEFAULT_ORDER):
        raise ValueError(f"order must be a permutation of the six elementary positions, got {order}")
    return GroupInstance(family, sl3_chain(order), sl3_relators(order), _SL3(order))


# -- certificates -------------------------------------------------------------

@dataclass(frozen=True)
class RightAngledCertificate:
    commuting_pairs: tuple       # one bool per consecutive pair
    infinite_order: tuple        # one bool per generator
    evidence: tuple              # one string per generator

    @property
    def ok(self):
        return all(self.commuting_pairs) and all(self.infinite_order)

    @property
    def first_failure(self):
        """(kind, index) of the first failed check, 0-based; None if valid."""
        for n, good in enumerate(self.commuting_pairs):
            if not good:
                return ("pair", n)
        for n, good in enumerate(self.infinite_order):
            if not good:
                return ("generator", n)
        return None


def _char_poly_is_unipotent(A):
    a, b, c, d, e, f, g, h, i = A
    trace = a + e + i
    minors = (a * e - b * d) + (a * i - c * g) + (e * i - f * h)
    det = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    # (x-1)^3 = x^3 - 3x^2 + 3x - 1
    return trace == 3 and minors == 3 and det == 1


def verify_right_angled(group):
    """Exact check of consecutive commutation and infinite order of every chain generator.

    Infinite order is certified structurally: torus and Heisenberg generators are
    coordinate translations; matrix generators must be unipotent and non-identity.
    """
    k = group.k
    pairs = tuple(
        group.is_identity(evaluate_word(group, commutator(n + 1, n + 2))) for n in range(k - 1)
    )
    infinite, evidence = [], []
    for n in range(k):
        g = group.generator(n)
        if group.family in ("torus", "heisenberg"):
            good = any(g) and (group.family == "torus" or sum(map(abs, g)) == 1)
            evidence.append("coordinate translation" if good else "not a translation")
        else:
            good = _char_poly_is_unipotent(g) and g != group.identity
            evidence.append("unipotent, non-identity" if good else "not certified")
        infinite.append(good)
    return RightAngledCertificate(pairs, tuple(infinite), tuple(evidence))


# -- finite quotients ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PermutationAction:
    """Right action of the chain generators on {0..N-1}.

    ``perms[i][x]`` is ``x . s_i``.  ``transitive_labels`` marks actions on a
    normal subgroup's cosets, whose Schreier graphs are label-preserving
    vertex-transitive.  Vertex 0 is the base coset.
    """

    family: str
    size: int
    perms: np.ndarray
    inv_perms: np.ndarray
    transitive_labels: bool
    _lookup: object = field(default=None, repr=False)

    @property
    def n_vertices(self):
        return self.perms.shape[1]

    @property
    def k(self):
        return self.perms.shape[0]

    def project(self, element):
        """Vertex index of the coset represented by ``element`` (base coset times element)."""
        return self._lookup(element)

    def word_permutation(self, word):
        """The permutation array x -> x.w for a word."""
        p = np.arange(self.n_vertices)
        for w in word:
            p = (self.perms[w - 1] if w > 0 else self.inv_perms[-w - 1])[p]
        return p


def act_word(action, x, word):
    for w in word:
        x = int((action.perms[w - 1] if w > 0 else action.inv_perms[-w - 1])[x])
    return x


def _inverse(perms):
    inv = np.empty_like(perms)
    for i, p in enumerate(perms):
        inv[i, p] = np.arange(p.size)
    return inv


def _torus_action(k, n):
    N = n ** k
    coords = np.indices((n,) * k).reshape(k, -1)[::-1]   # coords[0] varies fastest
    weights = n ** np.arange(k)
    perms = np.empty((k, N), dtype=np.int64)
    for i in range(k):
        shifted = coords.copy()
        shifted[i] = (shifted[i] + 1) % n
        perms[i] = weights @ shifted
    lookup = lambda g: int(sum((x % n) * w for x, w in zip(g, weights.tolist())))
    return PermutationAction("torus", n, perms, _inverse(perms), True, lookup)


def _heisenberg_action(n):
    a, b, c = (v.ravel() for v in np.indices((n, n, n))[::-1])   # a fastest
    index = lambda a, b, c: (a % n) + n * (b % n) + n * n * (c % n)
    perms = np.stack([index(a + 1, b, c), index(a, b, c + 1), index(a, b + 1, c + a)])
    lookup = lambda g: int(index(*g))
    return PermutationAction("heisenberg", n, perms.astype(np.int64), _inverse(perms), True, lookup)


def _bfs_orbit(start, step_fns):
    """Generator-ordered BFS closure of ``start``; returns the discovery list."""
    order = [start]
    seen = {start: 0}
    head = 0
    while head < len(order):
        v = order[head]
        head += 1
        for f in step_fns:
            w = f(v)
            if w not in seen:
                seen[w] = len(order)
                order.append(w)
    return order, seen


MAX_VERTICES = 10 ** 7


def _sl3_principal_action(p, order):
    # SL(3, Z/p) by layered numpy BFS; elements as (M, 3, 3) arrays mod p
    size = p ** 3 * (p ** 3 - 1) * (p ** 2 - 1)
    if size > MAX_VERTICES:
        raise ValueError(f"SL(3,Z/{p}) has {size} elements, above the {MAX_VERTICES} vertex guard")
    pw = p ** np.arange(9, dtype=np.int64)
    key = lambda arr: arr.reshape(len(arr), 9) @ pw

    def right_mul(arr, i, j, sign):
        out = arr.copy()
        out[:, :, j - 1] = (out[:, :, j - 1] + sign * out[:, :, i - 1]) % p
        return out

    signed = [(pair, s) for pair in order for s in (1, -1)]
    frontier = np.eye(3, dtype=np.int64)[None]
    keys_in_order = [key(frontier)]
    seen = np.sort(keys_in_order[0])
    while len(frontier):
        nbrs = np.stack([right_mul(frontier, i, j, s) for (i, j), s in signed], axis=1)
        nbrs = nbrs.reshape(-1, 3, 3)   # vertex-major, then signed generator
        nk = key(nbrs)
        fresh = ~np.isin(nk, seen)
        nk, nbrs = nk[fresh], nbrs[fresh]
        uniq, first = np.unique(nk, return_index=True)
        first = np.sort(first)
        frontier = nbrs[first]
        keys_in_order.append(nk[first])
        seen = np.union1d(seen, uniq)
    vkeys = np.concatenate(keys_in_order)
    sorter = np.argsort(vkeys)
    sorted_keys = vkeys[sorter]
    digits = (vkeys[:, None] // pw) % p
    mats = digits.reshape(-1, 3, 3)
    perms = np.empty((len(order), len(vkeys)), dtype=np.int64)
    for g, (i, j) in enumerate(order):
        nk = key(right_mul(mats, i, j, 1))
        perms[g] = sorter[np.searchsorted(sorted_keys, nk)]

    def lookup(A):
        k_ = sum((x % p) * int(w) for x, w in zip(A, pw.tolist()))
        return int(sorter[np.searchsorted(sorted_keys, k_)])

    return PermutationAction("sl3z-principal", p, perms, _inverse(perms), True, lookup)


def _normalize_point(v, p):
    for x in v:
        if x % p:
            s = pow(x, -1, p)
            return tuple((y * s) % p for y in v)
    raise ValueError("zero vector is not a projective point")


def _sl3_projective_action(p, order):
    def step(i, j, s):
        def f(v):
            w = list(v)
            w[j - 1] = (w[j - 1] + s * w[i - 1]) % p
            return _normalize_point(w, p)
        return f

    fns = [step(i, j, s) for (i, j) in order for s in (1, -1)]
    points, index = _bfs_orbit((1, 0, 0), fns)
    perms = np.array([[index[fns[2 * g](v)] for v in points] for g in range(len(order))],
                     dtype=np.int64)

    def lookup(A):
        return index[_normalize_point(A[0:3], p)]   # first row of A = [1:0:0] . A

    return PermutationAction("sl3z-projective", p, perms, _inverse(perms), False, lookup)


def _is_prime(p):
    return p >= 2 and all(p % q for q in range(2, int(p ** 0.5) + 1))


def make_family(tag, **params):
    """Build a family group and its quotient actions.

    The size parameter (``n`` for torus/heisenberg, ``p`` for the SL(3,Z)
    families) may be an int or a list; one action is returned per value.

    >>> group, actions = make_family("torus", k=2, n=[8, 16])
    >>> [a.n_vertices for a in actions]
    [64, 256]
    """
    if tag == "torus":
        k = params.pop("k", 2)
        sizes = params.pop("n")
        if k < 2:
            raise ValueError("torus family needs rank k >= 2")
        group = torus_group(k)
        build = lambda n: _torus_action(k, n)
    elif tag == "heisenberg":
        sizes = params.pop("n")
        group = heisenberg_group()
        build = _heisenberg_action
    elif tag in ("sl3z-principal", "sl3z-projective"):
        sizes = params.pop("p")
        order = tuple(tuple(x) for x in params.pop("order", SL3_DEFAULT_ORDER))
        group = sl3_group(tag, order)
        build = (lambda p: _sl3_principal_action(p, order)) if tag == "sl3z-principal" \
            else (lambda p: _sl3_projective_action(p, order))
    elif tag == "sl3-poly":
        raise NotImplementedError("the sl3-poly family is not built in")
    else:
        raise ValueError(f"unknown family {tag!r}; built-ins: {', '.join(FAMILIES)}")
    if params:
        raise ValueError(f"unexpected parameters for {tag}: {sorted(params)}")
    scalar = isinstance(sizes, int)
    sizes = [sizes] if scalar else list(sizes)
    for s in sizes:
        if not isinstance(s, int):
            raise ValueError(f"size parameter must be an integer, got {s!r}")
        if tag in ("torus", "heisenberg") and s < 2:
            raise ValueError(f"{tag}: modulus must be >= 2, got {s}")
        if tag.startswith("sl3z"):
            if not _is_prime(s):
                raise ValueError(f"{tag}: p must be prime, got {s}")
            if s not in SL3_PRIMES:
                raise ValueError(f"{tag}: p must be one of {SL3_PRIMES}, got {s}")
    return group, [build(s) for s in sizes]


def make_action(tag, **params):
    """Single-size convenience wrapper around :func:`make_family`."""
    group, (action,) = make_family(tag, **params)
    return group, action
