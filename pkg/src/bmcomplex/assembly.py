"""Block assembly of tensor-chain complexes.

A degree of a bar-type complex is a direct sum of blocks, one per chain,
each the tensor product of a few small basis lists ("factors").  Every map we
need (differentials, homotopies, chain maps) sends a block to another block
by acting on a window of adjacent factors and leaving the factors before and
after the window untouched.  Such a term is ``I_prefix (x) M (x) I_suffix``
for a small matrix ``M`` whose entries are exact ring elements; the big
sparse matrices are produced from these with numpy index arithmetic, either
exactly or reduced modulo a prime.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import Sequence

import numpy as np

from .exact_linalg import Matrix, PackedMatrix, RingSpec


class Block:
    """One chain's summand: the tensor product of ``factors`` (label lists)."""

    __slots__ = ("key", "factors", "offset", "sizes", "cum", "size")

    def __init__(self, key: tuple, factors: list, offset: int = 0):
        self.key = key
        self.factors = factors
        self.offset = offset
        self.sizes = tuple(len(f) for f in factors)
        cum = [1]
        for s in self.sizes:
            cum.append(cum[-1] * s)
        self.cum = tuple(cum)   # cum[i] = product of the first i sizes
        self.size = cum[-1]

    def labels(self):
        """Labels in block order: the last factor varies fastest."""
        out = [()]
        for f in self.factors:
            out = [prefix + (x,) for prefix in out for x in f]
        return out


class Degree:
    """One degree of a complex: blocks laid out consecutively."""

    def __init__(self, blocks: Sequence[Block]):
        self.blocks = []
        self.by_key = {}
        off = 0
        for b in blocks:
            if b.size == 0:
                continue
            b.offset = off
            off += b.size
            self.blocks.append(b)
            self.by_key[b.key] = b
        self.size = off

    def labels(self) -> list:
        return [lab for b in self.blocks for lab in b.labels()]


class SmallMatrix:
    """Sparse map from a window of source factors to a window of target factors.

    ``src`` and ``tgt`` are flat (row-major) window indices, ``vals`` exact
    ring elements.
    """

    def __init__(self, src, tgt, vals):
        self.src = np.asarray(src, dtype=np.int64)
        self.tgt = np.asarray(tgt, dtype=np.int64)
        self.vals = list(vals)
        self._residues: dict = {}
        self._height = None

    @classmethod
    def from_triples(cls, triples) -> "SmallMatrix":
        triples = [t for t in triples if t[2] != 0]
        return cls([t[0] for t in triples], [t[1] for t in triples], [t[2] for t in triples])

    def __len__(self):
        return len(self.vals)

    def residues(self, ring: RingSpec, modulus: int | None) -> np.ndarray:
        out = self._residues.get(modulus)
        if out is None:
            if modulus is None:
                vals = []
                for x in self.vals:
                    if int(x) != x:
                        raise ValueError("non-integral entry in an exact integer packing")
                    vals.append(int(x))
                out = np.array(vals, dtype=np.int64)
            else:
                out = np.array([ring.residue(x, modulus) for x in self.vals], dtype=np.int64)
            self._residues[modulus] = out
        return out

    def height(self) -> tuple[int, int]:
        if self._height is None:
            self._height = height_of(self.vals)
        return self._height


class Term:
    """``I_prefix (x) matrix (x) I_suffix`` from ``source`` into ``target``.

    The window starts at factor ``start`` and spans ``src_len`` source
    factors and ``tgt_len`` target factors.
    """

    __slots__ = ("source", "target", "start", "src_len", "tgt_len", "matrix", "sign")

    def __init__(self, source: Block, target: Block, start: int, src_len: int, tgt_len: int,
                 matrix: SmallMatrix, sign: int = 1):
        self.source = source
        self.target = target
        self.start = start
        self.src_len = src_len
        self.tgt_len = tgt_len
        self.matrix = matrix
        self.sign = sign

    def shape_key(self):
        """``(pre, wsrc, wtgt, suf)``: prefix, window and suffix dimensions."""
        sc, tc = self.source.cum, self.target.cum
        a = self.start
        pre = sc[a]
        if pre != tc[a]:
            raise AssertionError("prefix factors differ between source and target")
        wsrc = sc[a + self.src_len] // pre
        wtgt = tc[a + self.tgt_len] // pre
        suf = self.source.size // sc[a + self.src_len]
        if suf * wtgt * pre != self.target.size:
            raise AssertionError("suffix factors differ between source and target")
        return pre, wsrc, wtgt, suf

    def exact_items(self):
        pre, wsrc, wtgt, suf = self.shape_key()
        m = self.matrix
        for pi in range(pre):
            for a, b, x in zip(m.src.tolist(), m.tgt.tolist(), m.vals):
                x = self.sign * x
                for si in range(suf):
                    yield (self.target.offset + (pi * wtgt + b) * suf + si,
                           self.source.offset + (pi * wsrc + a) * suf + si, x)


_CHUNK = 1 << 21


class BlockMap:
    """A linear map between two degrees given as a sum of terms.

    The terms are stored as flat arrays so that packing expands all of them
    with a few numpy operations, whatever the number of chains.
    """

    def __init__(self, source: Degree, target: Degree, terms: Sequence[Term], ring: RingSpec, extra: Matrix | None = None):
        self.source = source
        self.target = target
        self.ring = ring
        self.extra = extra  # an explicit exact matrix added to the terms (small maps)
        self._packed: dict = {}
        # terms may be Term objects or plain (source, target, start, src_len, tgt_len, matrix, sign) tuples
        self.terms = terms
        self.matrices: list[SmallMatrix] = []
        mat_index: dict = {}
        cols = [[] for _ in range(8)]
        appends = [c.append for c in cols]
        for t in terms:
            if isinstance(t, Term):
                source, target, a, sl, tl, m, sign = t.source, t.target, t.start, t.src_len, t.tgt_len, t.matrix, t.sign
            else:
                source, target, a, sl, tl, m, sign = t
            if not len(m.vals):
                continue
            mi = mat_index.get(id(m))
            if mi is None:
                mi = mat_index[id(m)] = len(self.matrices)
                self.matrices.append(m)
            sc, tc = source.cum, target.cum
            pre = sc[a]
            wsrc = sc[a + sl] // pre
            wtgt = tc[a + tl] // pre
            suf = source.size // sc[a + sl]
            if pre != tc[a] or suf * wtgt * pre != target.size:
                raise AssertionError("factors outside the window differ between source and target")
            for app, x in zip(appends, (source.offset, target.offset, pre, wsrc, wtgt, suf, mi, sign)):
                app(x)
        self._arrays = [np.array(c, dtype=np.int64) for c in cols]
        sizes = [len(m) for m in self.matrices]
        self._mstart = np.concatenate([[0], np.cumsum(sizes, dtype=np.int64)]).astype(np.int64)
        self._msrc = np.concatenate([m.src for m in self.matrices] + [np.zeros(0, dtype=np.int64)])
        self._mtgt = np.concatenate([m.tgt for m in self.matrices] + [np.zeros(0, dtype=np.int64)])

    @property
    def shape(self):
        return (self.target.size, self.source.size)

    @property
    def nrows(self):
        return self.target.size

    @property
    def ncols(self):
        return self.source.size

    def _values(self, modulus):
        parts = [m.residues(self.ring, modulus) for m in self.matrices]
        return np.concatenate(parts + [np.zeros(0, dtype=np.int64)])

    def coo(self, modulus: int | None):
        """``(rows, cols, vals)`` of all terms (and the extra matrix); may contain duplicates."""
        so, to, pre, wsrc, wtgt, suf, mi, sign = self._arrays
        vals_table = self._values(modulus)
        nnz = self._mstart[mi + 1] - self._mstart[mi]
        counts = pre * nnz * suf
        ends = np.cumsum(counts)
        rows_l, cols_l, vals_l = [], [], []
        lo = 0
        while lo < len(counts):
            # a chunk of terms with about _CHUNK entries
            base = int(ends[lo - 1]) if lo else 0
            hi = max(int(np.searchsorted(ends, base + _CHUNK, side="right")), lo + 1)
            c = counts[lo:hi]
            term = np.repeat(np.arange(lo, hi, dtype=np.int64), c)
            starts = np.cumsum(c) - c
            local = np.arange(int(c.sum()), dtype=np.int64) - np.repeat(starts, c)
            sf = suf[term]
            s = local % sf
            tmp = local // sf
            nz = nnz[term]
            e = tmp % nz
            p = tmp // nz
            ge = self._mstart[mi[term]] + e
            cols_l.append(so[term] + (p * wsrc[term] + self._msrc[ge]) * sf + s)
            rows_l.append(to[term] + (p * wtgt[term] + self._mtgt[ge]) * sf + s)
            v = vals_table[ge]
            neg = sign[term] < 0
            if neg.any():
                v[neg] = (-v[neg]) % modulus if modulus is not None else -v[neg]
            vals_l.append(v)
            lo = hi
        if self.extra is not None:
            ex = PackedMatrix.from_matrix(self.extra, self.ring, modulus)
            rows_l.append(ex.indices.astype(np.int64))
            cols_l.append(np.repeat(np.arange(ex.ncols, dtype=np.int64), np.diff(ex.indptr)))
            vals_l.append(ex.data)
        if not rows_l:
            z = np.zeros(0, dtype=np.int64)
            return z, z, z
        return np.concatenate(rows_l), np.concatenate(cols_l), np.concatenate(vals_l)

    def packed(self, modulus: int | None, cache: bool = False) -> PackedMatrix:
        """Compressed column form, reduced mod ``modulus`` (exact integers if ``None``)."""
        hit = self._packed.get(modulus)
        if hit is not None:
            return hit
        rows, cols, vals = self.coo(modulus)
        keep = vals != 0
        rows, cols, vals = rows[keep], cols[keep], vals[keep]
        order = np.lexsort((rows, cols))
        rows, cols, vals = rows[order], cols[order], vals[order]
        if len(cols) > 1:
            dup = (cols[1:] == cols[:-1]) & (rows[1:] == rows[:-1])
            if dup.any():
                rows, cols, vals = _merge_duplicates(rows, cols, vals, modulus)
        counts = np.bincount(cols, minlength=self.source.size) if len(cols) else np.zeros(self.source.size, dtype=np.int64)
        indptr = np.zeros(self.source.size + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        out = PackedMatrix(self.target.size, self.source.size, indptr, rows.astype(np.int32), vals.astype(np.int64), modulus)
        if cache:
            self._packed[modulus] = out
        return out

    def matrix(self) -> Matrix:
        """Exact sparse matrix (for small maps)."""
        norm = self.ring.norm
        cols = [dict() for _ in range(self.source.size)]
        for t in self.terms:
            if not isinstance(t, Term):
                t = Term(*t)
            for i, j, x in t.exact_items():
                cols[j][i] = cols[j].get(i, 0) + x
        if self.extra is not None:
            for j, col in enumerate(self.extra.cols):
                for i, x in col.items():
                    cols[j][i] = cols[j].get(i, 0) + x
        cols = [{i: v for i, v in ((i, norm(v)) for i, v in c.items()) if v != 0} for c in cols]
        return Matrix(self.target.size, self.source.size, cols)

    def height(self) -> tuple[int, int]:
        """``(L, H)``: a common denominator ``L`` of all entries and a bound ``H`` on ``|L x|``.

        ``H`` bounds the sum of the absolute values of all contributions to a
        single entry, so overlapping terms are accounted for.
        """
        L, per_entry = 1, 0
        hs = [m.height() for m in self.matrices]
        if self.extra is not None:
            hs.append(height_of([x for col in self.extra.cols for x in col.values()]))
        for l, _ in hs:
            L = L * l // math.gcd(L, l)
        # an entry receives at most one contribution per distinct small matrix
        for l, h in hs:
            per_entry += h * (L // l)
        return L, per_entry


def height_of(vals) -> tuple[int, int]:
    fr = [Fraction(x) for x in vals]
    L = reduce(lambda a, b: a * b // math.gcd(a, b), (x.denominator for x in fr), 1)
    H = max((abs(x.numerator) * (L // x.denominator) for x in fr), default=0)
    return L, int(H)


def _merge_duplicates(rows, cols, vals, modulus):
    key = cols * (int(rows.max()) + 1) + rows
    uniq, inv = np.unique(key, return_inverse=True)
    if modulus is None:
        summed = np.zeros(len(uniq), dtype=np.int64)
        np.add.at(summed, inv, vals)
    else:
        summed = np.zeros(len(uniq), dtype=np.int64)
        np.add.at(summed, inv, vals % modulus)
        summed %= modulus
    first = np.zeros(len(uniq), dtype=np.int64)
    first[inv] = np.arange(len(key))
    rows2, cols2 = rows[first], cols[first]
    keep = summed != 0
    return rows2[keep], cols2[keep], summed[keep]


# ---------------------------------------------------------------------------
# certified identities


# primes below 2**20: products of two residues summed over a million terms stay in int64
SMALL_PRIMES = (1048573, 1048571, 1048559, 1048549, 1048517, 1048507, 1048447, 1048433,
                1048423, 1048391, 1048387, 1048367, 1048361, 1048357, 1048343, 1048309)


def primes_for_bound(bound: int, ring: RingSpec) -> list[int]:
    """Enough small primes (avoiding bad reduction) for their product to exceed ``2 * bound``."""
    if ring.kind == "prime_field":
        return [ring.p]
    out, prod = [], 1
    for p in SMALL_PRIMES:
        if ring.kind == "rationals" and (ring.q_value.denominator % p == 0 or ring.q_value.numerator % p == 0):
            continue
        out.append(p)
        prod *= p
        if prod > 2 * bound:
            return out
    raise ArithmeticError("height bound too large for the prime list")


def to_scipy(m: PackedMatrix):
    from scipy.sparse import csc_matrix

    return csc_matrix((m.data, m.indices, m.indptr), shape=m.shape)


def products_vanish(pairs, identity_dim: int | None, maps_height, ring: RingSpec) -> bool:
    """Exactly decide ``sum_i A_i B_i == c I`` (``c = 1`` if ``identity_dim`` else ``0``).

    ``pairs`` is a list of ``(A, B)`` with ``A``, ``B`` :class:`BlockMap` or
    :class:`Matrix`; ``maps_height`` gives ``(L, H)`` for each.  Every entry of
    ``L_A L_B A B`` is bounded by ``nnz * H_A * H_B``; the identity is checked
    modulo enough primes to pin down integers of that size.
    """
    bound = 1
    scaled = []
    for a, b in pairs:
        la, ha = maps_height(a)
        lb, hb = maps_height(b)
        inner = a.shape[1]
        bound += inner * ha * hb
        scaled.append(la * lb)
    common = reduce(lambda x, y: x * y // math.gcd(x, y), scaled, 1)
    bound = bound * common + common
    for p in primes_for_bound(bound, ring):
        acc = None
        for a, b in pairs:
            pa = _packed_mod(a, ring, p)
            pb = _packed_mod(b, ring, p)
            prod = to_scipy(pa) @ to_scipy(pb)
            prod.data %= p
            acc = prod if acc is None else acc + prod
        if identity_dim is not None:
            from scipy.sparse import identity

            acc = acc - identity(identity_dim, dtype=np.int64, format="csc")
        acc = acc.tocsc()
        acc.data %= p
        if acc.count_nonzero():
            return False
    return True


def _packed_mod(m, ring: RingSpec, p: int) -> PackedMatrix:
    if isinstance(m, BlockMap):
        return m.packed(p)
    if isinstance(m, PackedMatrix):
        if m.modulus is None:
            return PackedMatrix(m.nrows, m.ncols, m.indptr, m.indices, m.data % p, p)
        if m.modulus != p:
            raise ValueError("matrix is packed modulo a different prime")
        return m
    return PackedMatrix.from_matrix(m, ring, p)


def height(m) -> tuple[int, int]:
    if isinstance(m, BlockMap):
        return m.height()
    if isinstance(m, PackedMatrix):
        if m.modulus is not None:
            raise ValueError("residues carry no height")
        return 1, int(np.abs(m.data).max()) if m.nnz() else 0
    return height_of([x for col in m.cols for x in col.values()])
