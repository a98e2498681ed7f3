"""
First homology of finite-index subgroups, by two independent presentations.

* :func:`schreier_presentation` -- Reidemeister-Schreier on the full Schreier
  graph, contracting a BFS spanning tree.
* :func:`rewired_complex` -- the presentation complex rebuilt on a rewiring H.
  Its 1-cells are the kept edges plus one loop per correction arrow (x, g);
  relators of Gamma lifted at every vertex are rewritten through the stored
  H-walks (type I), and every correction loop c gets the disc
  phi(phi'(c)) c^-1 (type II).

Both presentations are abelianised into a sparse integer matrix and reduced by
an exact Smith normal form.

Presentations store relators as a zero-padded 2-D array of signed, 1-based
generator ids; zeros are blanks and may sit anywhere in a row.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass, field
from math import gcd

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix, diags
from scipy.sparse.csgraph import breadth_first_order, connected_components

from .groupoid import correction_set as _correction_set
from .groups import act_word, evaluate_word, invert_word


@dataclass(frozen=True, eq=False)
class SubgroupPresentation:
    n_generators: int
    relators: np.ndarray                 # (m, width) signed ids, 0 = blank
    n_type1: int = 0                     # leading rows are type I (lifted relators)
    generator_lifts: object = field(default=None, repr=False)   # j -> word over Gamma

    @property
    def n_relators(self):
        return self.relators.shape[0]

    @property
    def relator_lengths(self):
        return np.count_nonzero(self.relators, axis=1)

    @property
    def max_relator_length(self):
        return int(self.relator_lengths.max(initial=0))

    def words(self):
        for row in self.relators.tolist():
            yield tuple(w for w in row if w)

    def lift(self, word):
        """Gamma-word obtained by substituting each generator's lift."""
        out = []
        for w in word:
            lift = self.generator_lifts(abs(w) - 1)
            out.extend(lift if w > 0 else invert_word(lift))
        return out


# -- presentations ------------------------------------------------------------

def _spanning_tree(graph, kept, base):
    """Generator-ordered BFS tree of the kept edges: tree mask and per-vertex Gamma-word parent link."""
    n, k = graph.n_vertices, graph.k
    out, inv = graph.out.tolist(), graph.inv.tolist()
    kp = kept.tolist()
    tree = np.zeros((k, n), dtype=bool)
    parent = [-1] * n
    letter = [0] * n
    seen = bytearray(n)
    seen[base] = 1
    queue = deque([base])
    while queue:
        x = queue.popleft()
        for i in range(k):
            y = out[i][x]
            if kp[i][x] and not seen[y]:
                seen[y] = 1
                tree[i, x] = True
                parent[y], letter[y] = x, i + 1
                queue.append(y)
            z = inv[i][x]
            if kp[i][z] and not seen[z]:
                seen[z] = 1
                tree[i, z] = True
                parent[z], letter[z] = x, -(i + 1)
                queue.append(z)
    if not all(seen):
        raise ValueError("the (sub)graph is not connected / the action is not transitive")
    return tree, parent, letter


def _tree_word(parent, letter, x):
    word = []
    while parent[x] != -1:
        word.append(letter[x])
        x = parent[x]
    return word[::-1]


def _lift_relators(graph, relators, edge_words):
    """Rewrite every Gamma-relator at every vertex; rows are (vertex, relator)-major."""
    n = graph.n_vertices
    blocks = []
    for rel in relators:
        pos = np.arange(n)
        segs = []
        for w in rel:
            i = abs(w) - 1
            if w > 0:
                segs.append(edge_words[i][pos])
                pos = graph.out[i][pos]
            else:
                pos = graph.inv[i][pos]
                segs.append(-edge_words[i][pos][:, ::-1])
        blocks.append(np.concatenate(segs, axis=1))
    width = max(b.shape[1] for b in blocks)
    dtype = blocks[0].dtype
    stacked = np.zeros((n, len(blocks), width), dtype=dtype)
    for j, b in enumerate(blocks):
        stacked[:, j, :b.shape[1]] = b
    return stacked.reshape(n * len(blocks), width)


def _edge_generator_ids(graph, kept, tree):
    gens = kept & ~tree
    ids = np.zeros(kept.shape, dtype=np.int64)
    ids[gens] = np.arange(1, int(gens.sum()) + 1)
    return ids


def schreier_presentation(group, graph, base=0):
    """Reidemeister-Schreier presentation of the stabiliser of ``base``.

    ``graph`` may be a LabeledSchreierGraph or a PermutationAction.
    Generators: non-tree edges (N(d-1)+1 of them), numbered by (generator, vertex).
    """
    graph = _as_graph(graph)
    kept = np.ones(graph.out.shape, dtype=bool)
    tree, parent, letter = _spanning_tree(graph, kept, base)
    ids = _edge_generator_ids(graph, kept, tree)
    dtype = np.int32 if ids.max(initial=0) < 2 ** 31 else np.int64
    rels = _lift_relators(graph, group.relators, ids.astype(dtype)[:, :, None])
    edges = np.argwhere((kept & ~tree).T)       # rows (x, i) in id order? -> reorder below
    order = np.lexsort((edges[:, 0], edges[:, 1]))
    edges = edges[order]

    def lifts(j):
        x, i = (int(v) for v in edges[j])
        y = int(graph.out[i, x])
        return _tree_word(parent, letter, x) + [i + 1] + invert_word(_tree_word(parent, letter, y))

    return SubgroupPresentation(int(ids.max(initial=0)), rels, rels.shape[0], lifts)


def rewired_complex(group, graph, rewiring, labeling, correction=None, base=0):
    """Presentation of the stabiliser of ``base`` from the rewired complex on H."""
    graph = _as_graph(graph)
    kept = rewiring.kept if hasattr(rewiring, "kept") else rewiring
    if correction is None:
        correction = _correction_set(graph, labeling, group)
    tree, parent, letter = _spanning_tree(graph, kept, base)
    ids = _edge_generator_ids(graph, kept, tree)
    n_edge_gens = int(ids.max(initial=0))
    loop_id = {entry: n_edge_gens + 1 + j for j, entry in enumerate(correction.entries)}
    n_gens = n_edge_gens + len(loop_id)

    out, inv = graph.out, graph.inv

    def rewrite_walk(x, word):
        seq = []
        u = x
        for w in word:
            i = abs(w) - 1
            if w > 0:
                g = int(ids[i, u])
                if g:
                    seq.append(g)
                u = int(out[i, u])
            else:
                u = int(inv[i, u])
                g = int(ids[i, u])
                if g:
                    seq.append(-g)
        return seq

    # replacement word for every directed edge (x, i) traversed forwards
    replacement = {}
    for (x, i), word in labeling.walks.items():
        g = correction.edge_elements[(x, i)]
        body = rewrite_walk(x, word)
        replacement[(x, i)] = body if group.is_identity(g) else [loop_id[(x, g)]] + body
    # type II: phi(phi'(c)) c^-1 with phi'(c) = e . walk(e)^-1 for the edge e defining c
    type2 = []
    for entry in correction.entries:
        c = loop_id[entry]
        phi_e = replacement[correction.sources[entry]]
        type2.append(phi_e + invert_word(phi_e[1:]) + [-c])
    width = max([1] + [len(r) for r in replacement.values()])
    dtype = np.int32 if n_gens < 2 ** 31 else np.int64
    edge_words = np.zeros(kept.shape + (width,), dtype=dtype)
    edge_words[:, :, 0] = ids
    for (x, i), seq in replacement.items():
        edge_words[i, x, :len(seq)] = seq
    rels = _lift_relators(graph, group.relators, edge_words)
    n_type1 = rels.shape[0]
    if type2:
        w2 = max(len(r) for r in type2)
        width = max(rels.shape[1], w2)
        extra = np.zeros((len(type2), width), dtype=rels.dtype)
        for j, r in enumerate(type2):
            extra[j, :len(r)] = r
        if rels.shape[1] < width:
            rels = np.pad(rels, ((0, 0), (0, width - rels.shape[1])))
        rels = np.concatenate([rels, extra])

    edges = np.argwhere((kept & ~tree).T)
    edges = edges[np.lexsort((edges[:, 0], edges[:, 1]))]
    entries = correction.entries

    def lifts(j):
        if j < n_edge_gens:
            x, i = (int(v) for v in edges[j])
            y = int(graph.out[i, x])
            return _tree_word(parent, letter, x) + [i + 1] + invert_word(_tree_word(parent, letter, y))
        x, g = entries[j - n_edge_gens]
        t = _tree_word(parent, letter, x)
        return t + list(correction.witnesses[(x, g)]) + invert_word(t)

    return SubgroupPresentation(n_gens, rels, n_type1, lifts)


def _as_graph(obj):
    if hasattr(obj, "out"):
        return obj
    from .schreier import build_schreier
    return build_schreier(obj)


# -- sparse integer matrices ----------------------------------------------------

@dataclass(frozen=True, eq=False)
class SparseIntegerMatrix:
    """Integer matrix as sorted (row, col, value) triples; no duplicates, no zeros."""

    n_rows: int
    n_cols: int
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray          # int64, or object dtype for big entries

    @property
    def nnz(self):
        return len(self.vals)

    @classmethod
    def from_triples(cls, n_rows, n_cols, triples):
        acc = {}
        for r, c, v in triples:
            if not (0 <= r < n_rows and 0 <= c < n_cols):
                raise IndexError(f"entry ({r}, {c}) outside {n_rows}x{n_cols}")
            acc[(r, c)] = acc.get((r, c), 0) + int(v)
        keys = sorted(k for k, v in acc.items() if v)
        vals = [acc[k] for k in keys]
        big = any(abs(v) >= 2 ** 62 for v in vals)
        return cls(n_rows, n_cols,
                   np.array([k[0] for k in keys], dtype=np.int64),
                   np.array([k[1] for k in keys], dtype=np.int64),
                   np.array(vals, dtype=object if big else np.int64))

    @classmethod
    def from_dense(cls, rows):
        rows = [list(r) for r in rows]
        n_cols = len(rows[0]) if rows else 0
        return cls.from_triples(len(rows), n_cols,
                                [(r, c, v) for r, row in enumerate(rows) for c, v in enumerate(row)])

    def to_dense(self):
        out = [[0] * self.n_cols for _ in range(self.n_rows)]
        for r, c, v in zip(self.rows.tolist(), self.cols.tolist(), self.vals.tolist()):
            out[r][c] = v
        return out

    def row_abs_sums(self):
        sums = np.zeros(self.n_rows, dtype=object if self.vals.dtype == object else np.int64)
        np.add.at(sums, self.rows, np.abs(self.vals))
        return sums

    def dump(self):
        lines = [f"{self.n_rows} {self.n_cols} {self.nnz}"]
        lines += [f"{r} {c} {v}" for r, c, v in
                  zip(self.rows.tolist(), self.cols.tolist(), self.vals.tolist())]
        return "\n".join(lines) + "\n"

    @classmethod
    def load(cls, text):
        lines = text.split("\n")
        n_rows, n_cols, nnz = (int(t) for t in lines[0].split())
        triples = [tuple(int(t) for t in line.split()) for line in lines[1:1 + nnz]]
        return cls.from_triples(n_rows, n_cols, triples)


def abelianized_matrix(presentation):
    """One row per relator, one column per generator; entries are signed letter counts."""
    rel = presentation.relators
    m, n = rel.shape[0], presentation.n_generators
    r, pos = np.nonzero(rel)
    letters = rel[r, pos].astype(np.int64)
    a = coo_matrix((np.sign(letters), (r, np.abs(letters) - 1)), shape=(m, n)).tocsr()
    a.sum_duplicates()
    a.eliminate_zeros()
    a.sort_indices()
    coo = a.tocoo()
    return SparseIntegerMatrix(m, n, coo.row.astype(np.int64), coo.col.astype(np.int64),
                               coo.data.astype(np.int64))


# -- Smith normal form ------------------------------------------------------------

@dataclass(frozen=True)
class SnfResult:
    n_cols: int
    n_ones: int
    torsion: tuple            # invariant factors > 1, divisibility chain

    @property
    def factors(self):
        return (1,) * self.n_ones + self.torsion

    @property
    def rank(self):
        return self.n_ones + len(self.torsion)

    @property
    def betti(self):
        return self.n_cols - self.rank

    @property
    def trs(self):
        return math.prod(self.torsion)

    def invariants(self):
        """The cokernel up to isomorphism: (betti, torsion factors)."""
        return (self.betti, self.torsion)


def _chain(values):
    vals = sorted(values)
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            a, b = vals[i], vals[j]
            g = gcd(a, b)
            vals[i], vals[j] = g, a // g * b
    return vals


def _unique_rows(mat):
    """Deduplicate rows up to sign; returns a list of {col: value} dicts."""
    if mat.nnz == 0:
        return []
    rows_idx, cols_idx, vals = mat.rows, mat.cols, mat.vals
    if vals.dtype == object:
        rows = {}
        for r, c, v in zip(rows_idx.tolist(), cols_idx.tolist(), vals.tolist()):
            rows.setdefault(r, {})[c] = v
        return list(rows.values())
    counts = np.bincount(rows_idx, minlength=mat.n_rows)
    present = np.nonzero(counts)[0]
    width = int(counts.max())
    starts = np.concatenate([[0], np.cumsum(counts)])[present]
    slot = np.arange(mat.nnz) - np.repeat(starts, counts[present])
    dense_row = np.repeat(np.arange(len(present)), counts[present])
    key = np.zeros((len(present), 2 * width), dtype=np.int64)
    key[:, 0::2] = -1
    key[dense_row, 2 * slot] = cols_idx
    key[dense_row, 2 * slot + 1] = vals
    # sign-normalise: first entry positive
    flip = key[:, 1] < 0
    key[flip, 1::2] *= -1
    key = np.unique(key, axis=0)
    out = []
    for row in key.tolist():
        out.append({row[j]: row[j + 1] for j in range(0, 2 * width, 2) if row[j] >= 0})
    return out


def _merge_columns(n, c1, c2, s):
    """Resolve the identifications c1 = s * c2 into (root, sign) per column."""
    g = coo_matrix((s.astype(np.int8), (c1, c2)), shape=(n, n)).tocsr()
    g = (g + g.T).tocsr()
    g.data = np.sign(g.data).astype(np.int8)
    _, label = connected_components(g, directed=False)
    first = np.full(label.max() + 1, n)
    np.minimum.at(first, label, np.arange(n))
    # one BFS over the forest by hanging every component root off a virtual vertex
    hub = coo_matrix((np.ones(len(first), dtype=np.int8), (np.full(len(first), n), first)),
                     shape=(n + 1, n + 1))
    g.resize((n + 1, n + 1))
    order, pred = breadth_first_order((g + hub).tocsr(), n, directed=True)
    order = order[1:]
    root = first[label]
    sign = np.ones(n + 1, dtype=np.int64)
    edge_sign = np.asarray(g[order, np.where(pred[order] == n, order, pred[order])]).ravel()
    sg, pr = sign.tolist(), pred.tolist()
    for v, e in zip(order.tolist(), edge_sign.tolist()):
        if pr[v] != n:
            sg[v] = sg[pr[v]] * e
    return root, np.array(sg[:n], dtype=np.int64)


def _pivot_round(a, score_cap):
    """Eliminate an independent batch of low-fill unit pivots with one sparse product.

    Pivots (r, c) are taken greedily by Markowitz score (len(r)-1)(count(c)-1); a
    pivot row may not meet another chosen pivot column, so all eliminations
    commute.  Returns the reduced matrix and the number of pivots (0 if none).
    """
    m, n = a.shape
    ln = np.diff(a.indptr)
    cc = np.bincount(a.indices, minlength=n)
    big = int(np.abs(a.data).max())
    if big * big * int(ln.max()) + big >= 2 ** 62:
        return a, 0
    r_of = np.repeat(np.arange(m), ln)
    unit = np.nonzero(np.abs(a.data) == 1)[0]
    if not len(unit):
        return a, 0
    score = (ln[r_of[unit]] - 1) * (cc[a.indices[unit]] - 1)
    cap = max(score_cap, 2 * int(score.min()))
    keep = score <= cap
    unit, score = unit[keep], score[keep]
    unit = unit[np.argsort(score, kind="stable")]
    csc = a.tocsc()
    row_blocked = np.zeros(m, dtype=bool)
    col_blocked = np.zeros(n, dtype=bool)
    piv_r, piv_c = [], []
    ip, ix, cp, cx = a.indptr, a.indices, csc.indptr, csc.indices
    for e, r, c in zip(unit.tolist(), r_of[unit].tolist(), a.indices[unit].tolist()):
        if row_blocked[r] or col_blocked[c]:
            continue
        piv_r.append(r)
        piv_c.append(c)
        row_blocked[cx[cp[c]:cp[c + 1]]] = True
        col_blocked[ix[ip[r]:ip[r + 1]]] = True
    if not piv_r:
        return a, 0
    piv_r, piv_c = np.array(piv_r), np.array(piv_c)
    rows = a[piv_r]
    v = np.asarray(rows[np.arange(len(piv_r)), piv_c]).ravel()
    cols = csc[:, piv_c] @ diags(v)
    a = (a - cols @ rows).tocsr()
    alive = np.ones(m, dtype=bool)
    alive[piv_r] = False
    a = a[alive]
    a.eliminate_zeros()
    return a, len(piv_r)


def _presolve(mat, small=50_000, score_cap=4):
    """Vectorised unit eliminations until only a small or unit-free core is left.

    Strips unit singleton rows, drops rows owning a private unit column, merges
    columns tied by +-1 doubleton rows and runs batched Markowitz pivots.
    Returns the reduced csr matrix (same column space) and the number of unit
    invariant factors split off.
    """
    n = mat.n_cols
    a = csr_matrix((mat.vals, (mat.rows, mat.cols)), shape=(mat.n_rows, n))
    ones = 0
    while True:
        a.sum_duplicates()
        a.eliminate_zeros()
        ln = np.diff(a.indptr)
        a = a[ln > 0]
        ln = np.diff(a.indptr)
        start = a.indptr[:-1]
        single = start[ln == 1]
        dead = np.unique(a.indices[single[np.abs(a.data[single]) == 1]])
        if len(dead):
            ones += len(dead)
            alive = np.ones(n, dtype=bool)
            alive[dead] = False
            a = a.tocoo()
            sel = alive[a.col]
            a = csr_matrix((a.data[sel], (a.row[sel], a.col[sel])), shape=a.shape)
            continue
        # a unit entry alone in its column: drop that row and column together
        counts = np.bincount(a.indices, minlength=n)
        lone = (counts[a.indices] == 1) & (np.abs(a.data) == 1)
        if lone.any():
            owner = np.repeat(np.arange(a.shape[0]), ln)[lone]
            drop = np.unique(owner)
            ones += len(drop)
            alive = np.ones(a.shape[0], dtype=bool)
            alive[drop] = False
            a = a[alive]
            continue
        pair = start[ln == 2]
        v1, v2 = a.data[pair], a.data[pair + 1]
        unit = (np.abs(v1) == 1) & (np.abs(v2) == 1)
        if unit.any():
            pair = pair[unit]
            root, sign = _merge_columns(n, a.indices[pair], a.indices[pair + 1], -(v1[unit] * v2[unit]))
            ones += int(np.count_nonzero(root != np.arange(n)))
            a = a.tocoo()
            a = csr_matrix((a.data * sign[a.col], (a.row, root[a.col])), shape=a.shape)
            continue
        if a.nnz <= small:
            return a, ones
        a, done = _pivot_round(a, score_cap)
        if not done:
            return a, ones
        ones += done


def smith_normal_form(mat):
    """Exact invariant factors of an integer matrix.

    A vectorised pass first strips unit singleton rows and merges columns tied by
    +-1 doubleton rows.  Remaining unit pivots are eliminated shortest rows first
    and, within a row, on the column with the fewest entries (Markowitz-style fill
    control).  What remains is reduced with smallest-magnitude pivots and
    Euclidean row/column steps.
    """
    pre_ones = 0
    if mat.nnz and mat.vals.dtype != object:
        a, pre_ones = _presolve(mat)
        a = a.tocoo()
        mat = SparseIntegerMatrix(a.shape[0], mat.n_cols, a.row.astype(np.int64),
                                  a.col.astype(np.int64), a.data.astype(np.int64))
    rows = dict(enumerate(_unique_rows(mat)))
    cols = {}
    for r, row in rows.items():
        for c in row:
            cols.setdefault(c, set()).add(r)

    def axpy(r2, f, row):
        # rows[r2] -= f * row
        row2 = rows[r2]
        for c2, v2 in row.items():
            nv = row2.get(c2, 0) - f * v2
            if nv:
                if c2 not in row2:
                    cols[c2].add(r2)
                row2[c2] = nv
            else:
                del row2[c2]
                cols[c2].discard(r2)
        if not row2:
            del rows[r2]
            return False
        return True

    def drop_row(r):
        for c2 in rows.pop(r):
            cols[c2].discard(r)

    ones = 0
    heap = [(len(row), r) for r, row in rows.items()]
    heapq.heapify(heap)
    while heap:
        ln, r = heapq.heappop(heap)
        row = rows.get(r)
        if row is None:
            continue
        if len(row) != ln:
            heapq.heappush(heap, (len(row), r))
            continue
        best, best_count = None, 0
        for c, v in row.items():
            if v == 1 or v == -1:
                cc = len(cols[c])
                if best is None or cc < best_count:
                    best, best_count = c, cc
                    if cc == 1:
                        break
        if best is None:
            continue
        v = row[best]
        for r2 in list(cols[best]):
            if r2 != r:
                if axpy(r2, rows[r2][best] * v, row):
                    heapq.heappush(heap, (len(rows[r2]), r2))
        drop_row(r)
        ones += 1

    diag = []
    while rows:
        r, c, v = min(((r, c, v) for r, row in rows.items() for c, v in row.items()),
                      key=lambda t: (abs(t[2]), len(rows[t[0]]) * len(cols[t[1]]), t[0], t[1]))
        row = rows[r]
        clean = True
        for r2 in list(cols[c]):
            if r2 == r:
                continue
            if axpy(r2, rows[r2][c] // v, row) and c in rows[r2]:
                clean = False
        if not clean:
            continue
        # column c now only meets row r: column operations touch row r alone
        for c2 in list(row):
            if c2 == c:
                continue
            rem = row[c2] % v
            if rem:
                row[c2] = rem
                clean = False
            else:
                del row[c2]
                cols[c2].discard(r)
        if clean:
            diag.append(abs(v))
            drop_row(r)
    units = sum(1 for d in diag if d == 1)
    torsion = tuple(d for d in _chain([d for d in diag if d != 1]) if d != 1)
    units += len(diag) - units - len(torsion)
    return SnfResult(mat.n_cols, pre_ones + ones + units, torsion)


# -- bounds and statistics ------------------------------------------------------------

def hadamard_bound(mat):
    """b^m with b the largest row abs-sum (1 for a zero matrix) and m the column count."""
    sums = mat.row_abs_sums()
    b = max(1, int(max(sums.tolist(), default=0)))
    return b ** mat.n_cols


def within_hadamard(trs, mat):
    """Exact test trs <= hadamard_bound(mat), without materialising huge powers when avoidable."""
    sums = mat.row_abs_sums()
    b = max(1, int(max(sums.tolist(), default=0)))
    if trs <= 1:
        return True
    if b >= 2 and trs.bit_length() <= mat.n_cols:
        return True
    return trs <= b ** mat.n_cols


def log_int(n):
    """Natural log of a positive int of any size (top 64 bits plus a binary shift)."""
    if n < 1:
        raise ValueError("log of a non-positive integer")
    shift = max(0, n.bit_length() - 64)
    return math.log(n >> shift) + shift * math.log(2)


def torsion_growth_stat(trs, index):
    if trs < 1 or index < 1:
        raise ValueError("need trs >= 1 and index >= 1")
    return log_int(trs) / index


def homology(group, graph, base=0):
    """H_1 of the stabiliser of ``base`` via the Schreier route."""
    return smith_normal_form(abelianized_matrix(schreier_presentation(group, graph, base)))


def check_presentation(group, presentation, action, base=0, limit=None):
    """Lifted relators evaluate to 1 in Gamma and generator lifts fix ``base``; returns failures."""
    bad = []
    for j in range(presentation.n_generators if limit is None else min(limit, presentation.n_generators)):
        if act_word(action, base, presentation.generator_lifts(j)) != base:
            bad.append(("generator", j))
    for n, word in enumerate(presentation.words()):
        if limit is not None and n >= limit:
            break
        if not group.is_identity(evaluate_word(group, presentation.lift(word))):
            bad.append(("relator", n))
    return bad
