"""Exact scalars and linear algebra over Q, F_p and Z.

Scalars are plain Python objects: ``int`` or ``Fraction`` over the rationals,
``int`` residues in ``[0, p)`` over a prime field, ``int`` over the integers.
Every arithmetic result is passed through :meth:`RingSpec.norm` before it is
stored, which keeps residues reduced and turns integral fractions into ints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

RATIONALS = "rationals"
PRIME_FIELD = "prime_field"
INTEGERS = "integers"


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % k for k in range(2, math.isqrt(p) + 1))


def _as_rational(value) -> Fraction:
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


@dataclass(frozen=True)
class RingSpec:
    """Coefficient ring ``R`` together with the unit ``q`` of the Hecke algebra."""

    kind: str
    q_value: Fraction = Fraction(1)
    p: int = 0

    def __post_init__(self):
        q = _as_rational(self.q_value)
        object.__setattr__(self, "q_value", q)
        if self.kind == RATIONALS:
            if q == 0:
                raise ValueError("q must be invertible")
        elif self.kind == PRIME_FIELD:
            if not _is_prime(self.p):
                raise ValueError(f"{self.p} is not prime")
            if q.denominator % self.p == 0 or q.numerator % self.p == 0:
                raise ValueError(f"q = {q} is not a unit mod {self.p}")
        elif self.kind == INTEGERS:
            if q not in (1, -1):
                raise ValueError("over the integers q must be +1 or -1")
        else:
            raise ValueError(f"unknown ring kind {self.kind!r}")

    # -- constructors -------------------------------------------------------
    @classmethod
    def rationals(cls, q=1) -> "RingSpec":
        return cls(RATIONALS, _as_rational(q))

    @classmethod
    def prime_field(cls, p: int, q=1) -> "RingSpec":
        return cls(PRIME_FIELD, _as_rational(q), int(p))

    @classmethod
    def integers(cls, q=1) -> "RingSpec":
        return cls(INTEGERS, _as_rational(q))

    @classmethod
    def parse(cls, ring: str, q: str | int | Fraction = 1) -> "RingSpec":
        """Parse the command-line descriptors ``q``, ``zz`` and ``fp:<p>``."""
        ring = ring.strip().lower()
        if ring in ("q", "qq", "rationals"):
            return cls.rationals(q)
        if ring in ("zz", "z", "integers"):
            return cls.integers(q)
        if ring.startswith("fp:"):
            return cls.prime_field(int(ring[3:]), q)
        raise ValueError(f"unknown ring {ring!r}")

    # -- descriptors ----------------------------------------------------------
    @property
    def is_field(self) -> bool:
        return self.kind != INTEGERS

    @property
    def tag(self) -> str:
        qtxt = str(self.q_value).replace("/", "o").replace("-", "m")
        if self.kind == RATIONALS:
            return f"qq_q{qtxt}"
        if self.kind == PRIME_FIELD:
            return f"fp{self.p}_q{qtxt}"
        return f"zz_q{qtxt}"

    def describe(self) -> dict:
        d = {"kind": self.kind, "q": str(self.q_value)}
        if self.kind == PRIME_FIELD:
            d["p"] = self.p
        return d

    def __str__(self):
        name = {RATIONALS: "Q", INTEGERS: "Z"}.get(self.kind, f"F_{self.p}")
        return f"{name}[q={self.q_value}]"

    # -- arithmetic -----------------------------------------------------------
    @property
    def q(self):
        return self.elem(self.q_value)

    @property
    def zero(self):
        return 0

    @property
    def one(self):
        return 1

    def elem(self, x):
        """Image of an integer or rational number in the ring."""
        if self.kind == PRIME_FIELD:
            x = Fraction(x)
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        x = Fraction(x)
        if x.denominator == 1:
            return int(x.numerator)
        if self.kind == INTEGERS:
            raise ValueError(f"{x} is not an integer")
        return x

    def norm(self, x):
        if self.kind == PRIME_FIELD:
            return x % self.p
        if type(x) is Fraction and x.denominator == 1:
            return int(x.numerator)
        return x

    def is_unit(self, x) -> bool:
        if self.kind == INTEGERS:
            return x in (1, -1)
        return x != 0

    def inv(self, x):
        if self.kind == PRIME_FIELD:
            return pow(x, -1, self.p)
        if self.kind == INTEGERS:
            if x not in (1, -1):
                raise ZeroDivisionError(f"{x} is not a unit of Z")
            return x
        return self.norm(1 / Fraction(x))

    def div(self, a, b):
        if self.kind == PRIME_FIELD:
            return a * pow(b, -1, self.p) % self.p
        if self.kind == INTEGERS:
            if a % b:
                raise ZeroDivisionError(f"{a} / {b} is not integral")
            return a // b
        return self.norm(Fraction(a) / b)

    def power(self, x, k: int):
        if k >= 0:
            return self.norm(x ** k) if self.kind != PRIME_FIELD else pow(x, k, self.p)
        return self.power(self.inv(x), -k)

    def to_str(self, x) -> str:
        return str(x)

    def residue(self, x, p: int) -> int:
        """Reduction of a ring element modulo a prime not dividing denominators."""
        if self.kind == PRIME_FIELD:
            if p != self.p:
                raise ValueError("cannot change characteristic")
            return x
        if type(x) is Fraction:
            return x.numerator * pow(x.denominator, -1, p) % p
        return x % p


# ---------------------------------------------------------------------------
# sparse matrices


class Matrix:
    """Sparse matrix stored column-wise: ``cols[j]`` maps row index to a nonzero entry."""

    __slots__ = ("nrows", "ncols", "cols")

    def __init__(self, nrows: int, ncols: int, cols: Sequence[dict] | None = None):
        self.nrows = nrows
        self.ncols = ncols
        if cols is None:
            cols = [dict() for _ in range(ncols)]
        elif len(cols) != ncols:
            raise ValueError("wrong number of columns")
        self.cols = list(cols)

    # -- constructors ---------------------------------------------------------
    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "Matrix":
        return cls(nrows, ncols)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, [{j: 1} for j in range(n)])

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], ring: RingSpec | None = None) -> "Matrix":
        nrows = len(rows)
        ncols = len(rows[0]) if rows else 0
        m = cls(nrows, ncols)
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise ValueError("ragged rows")
            for j, x in enumerate(row):
                if ring is not None:
                    x = ring.elem(x)
                if x != 0:
                    m.cols[j][i] = x
        return m

    @classmethod
    def from_entries(cls, nrows: int, ncols: int, entries: dict) -> "Matrix":
        m = cls(nrows, ncols)
        for (i, j), x in entries.items():
            if x != 0:
                m.cols[j][i] = x
        return m

    # -- views ----------------------------------------------------------------
    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def entries(self) -> dict:
        return {(i, j): x for j, col in enumerate(self.cols) for i, x in col.items()}

    def nnz(self) -> int:
        return sum(len(c) for c in self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.cols[j].get(i, 0)

    def to_rows(self) -> list[list]:
        rows = [[0] * self.ncols for _ in range(self.nrows)]
        for j, col in enumerate(self.cols):
            for i, x in col.items():
                rows[i][j] = x
        return rows

    def row_dicts(self) -> list[dict]:
        rows = [dict() for _ in range(self.nrows)]
        for j, col in enumerate(self.cols):
            for i, x in col.items():
                rows[i][j] = x
        return rows

    def transpose(self) -> "Matrix":
        return Matrix(self.ncols, self.nrows, self.row_dicts())

    def is_zero(self) -> bool:
        return all(not c for c in self.cols)

    def copy(self) -> "Matrix":
        return Matrix(self.nrows, self.ncols, [dict(c) for c in self.cols])

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.cols == other.cols

    def __repr__(self):
        return f"Matrix({self.nrows}x{self.ncols}, nnz={self.nnz()})"

    # -- arithmetic -----------------------------------------------------------
    def matmul(self, other: "Matrix", ring: RingSpec) -> "Matrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        norm = ring.norm
        out = []
        mine = self.cols
        for col in other.cols:
            acc = {}
            for k, b in col.items():
                for i, a in mine[k].items():
                    acc[i] = acc.get(i, 0) + a * b
            out.append({i: v for i, v in ((i, norm(v)) for i, v in acc.items()) if v != 0})
        return Matrix(self.nrows, other.ncols, out)

    def add(self, other: "Matrix", ring: RingSpec, scale=1) -> "Matrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        out = []
        for a, b in zip(self.cols, other.cols):
            acc = dict(a)
            for i, x in b.items():
                acc[i] = acc.get(i, 0) + scale * x
            out.append({i: v for i, v in ((i, ring.norm(v)) for i, v in acc.items()) if v != 0})
        return Matrix(self.nrows, self.ncols, out)

    def apply(self, vec: dict, ring: RingSpec) -> dict:
        acc = {}
        for j, b in vec.items():
            for i, a in self.cols[j].items():
                acc[i] = acc.get(i, 0) + a * b
        return {i: v for i, v in ((i, ring.norm(v)) for i, v in acc.items()) if v != 0}


def block_matrix(blocks_: Sequence[Sequence[Matrix]]) -> Matrix:
    """Assemble a block matrix from a rectangular grid of blocks."""
    row_sizes = [row[0].nrows for row in blocks_]
    col_sizes = [b.ncols for b in blocks_[0]]
    out = Matrix(sum(row_sizes), sum(col_sizes))
    r0 = 0
    for bi, row in enumerate(blocks_):
        c0 = 0
        for bj, blk in enumerate(row):
            for j, col in enumerate(blk.cols):
                tgt = out.cols[c0 + j]
                for i, x in col.items():
                    tgt[r0 + i] = x
            c0 += col_sizes[bj]
        r0 += row_sizes[bi]
    return out


# ---------------------------------------------------------------------------
# elimination over fields


def _row_echelon(rows: list[dict], ring: RingSpec, ncols: int, reduced: bool = False):
    """In-place row reduction of sparse rows; returns the list of (pivot col, row)."""
    norm = ring.norm
    pivots: dict[int, dict] = {}
    order = []
    for row in rows:
        row = {j: x for j, x in row.items() if x != 0}
        while row:
            lead = min(row)
            piv = pivots.get(lead)
            if piv is None:
                inv = ring.inv(row[lead])
                row = {j: norm(x * inv) for j, x in row.items()}
                pivots[lead] = row
                order.append(lead)
                break
            c = row[lead]
            for j, x in piv.items():
                v = norm(row.get(j, 0) - c * x)
                if v:
                    row[j] = v
                else:
                    row.pop(j, None)
    if reduced:
        for lead in sorted(order, reverse=True):
            piv = pivots[lead]
            for other in order:
                if other == lead:
                    continue
                row = pivots[other]
                c = row.get(lead)
                if c:
                    for j, x in piv.items():
                        v = norm(row.get(j, 0) - c * x)
                        if v:
                            row[j] = v
                        else:
                            row.pop(j, None)
    return [(lead, pivots[lead]) for lead in sorted(order)]


def rank(m: Matrix, ring: RingSpec) -> int:
    """Exact rank over a field by sparse Gaussian elimination."""
    if not ring.is_field:
        raise ValueError("rank over the integers: use smith_normal_form")
    rows = m.row_dicts() if m.nrows <= m.ncols else [dict(c) for c in m.cols]
    ncols = m.ncols if m.nrows <= m.ncols else m.nrows
    return len(_row_echelon(rows, ring, ncols))


def rref_rows(vectors: Sequence[dict], ring: RingSpec, ncols: int) -> list[dict]:
    """Reduced echelon basis of the span of sparse row vectors."""
    return [row for _, row in _row_echelon([dict(v) for v in vectors], ring, ncols, reduced=True)]


def solve(m: Matrix, b: Matrix, ring: RingSpec, unique: bool = False):
    """Some ``x`` with ``m x = b`` or ``None`` if the system is inconsistent."""
    if not ring.is_field:
        raise ValueError("solve needs a field")
    if b.nrows != m.nrows:
        raise ValueError("shape mismatch")
    n = m.ncols
    # augmented rows: [m | b]
    rows = []
    for i, row in enumerate(m.row_dicts()):
        rows.append(row)
    for j, col in enumerate(b.cols):
        for i, x in col.items():
            rows[i][n + j] = x
    ech = _row_echelon(rows, ring, n + b.ncols, reduced=True)
    if any(lead >= n for lead, _ in ech):
        return None
    if unique and len(ech) < n:
        raise ValueError("solution is not unique")
    x = Matrix(n, b.ncols)
    for lead, row in ech:
        for j, v in row.items():
            if j >= n:
                x.cols[j - n][lead] = v
    return x


# ---------------------------------------------------------------------------
# integer normal forms


def smith_normal_form(m: Matrix) -> tuple[list[int], int]:
    """Invariant factors ``d_1 | d_2 | ...`` (all positive) and their number.

    Row and column operations with a minimal-absolute-value pivot; entries must
    be integers.
    """
    a = [dict(r) for r in m.row_dicts()]
    for row in a:
        for x in row.values():
            if int(x) != x:
                raise ValueError("smith_normal_form needs integer entries")
    live_rows = {i for i, row in enumerate(a) if row}
    diag = []
    # column view kept in sync lazily: rebuild on demand
    while live_rows:
        # pick the entry of smallest absolute value
        best = None
        for i in live_rows:
            for j, x in a[i].items():
                ax = abs(x)
                if best is None or ax < best[0] or (ax == best[0] and (i, j) < best[1:]):
                    best = (ax, i, j)
                    if ax == 1:
                        break
            if best is not None and best[0] == 1:
                break
        _, pi, pj = best
        while True:
            p = a[pi][pj]
            done = True
            # clear column pj in other rows
            for i in list(live_rows):
                if i == pi:
                    continue
                x = a[i].get(pj)
                if not x:
                    continue
                c = x // p
                if c:
                    for j, y in a[pi].items():
                        v = a[i].get(j, 0) - c * y
                        if v:
                            a[i][j] = v
                        else:
                            a[i].pop(j, None)
                if a[i].get(pj):
                    done = False
            # clear row pi in other columns
            prow = a[pi]
            for j in list(prow):
                if j == pj:
                    continue
                x = prow.get(j)
                if not x:
                    continue
                c = x // p
                if c:
                    for i in live_rows:
                        y = a[i].get(pj)
                        if y:
                            v = a[i].get(j, 0) - c * y
                            if v:
                                a[i][j] = v
                            else:
                                a[i].pop(j, None)
                if prow.get(j):
                    done = False
            if done:
                break
            # a smaller remainder appeared; move the pivot there
            best = None
            for i in live_rows:
                x = a[i].get(pj)
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, pj)
            for j, x in a[pi].items():
                if abs(x) < best[0]:
                    best = (abs(x), pi, j)
            _, pi, pj = best
        diag.append(abs(a[pi][pj]))
        a[pi] = {}
        live_rows.discard(pi)
        for i in list(live_rows):
            a[i].pop(pj, None)
            if not a[i]:
                live_rows.discard(i)
    # enforce the divisibility chain
    diag.sort()
    changed = True
    while changed:
        changed = False
        for k in range(len(diag) - 1):
            g = math.gcd(diag[k], diag[k + 1])
            if g != diag[k]:
                l = diag[k] * diag[k + 1] // g
                diag[k], diag[k + 1] = g, l
                changed = True
        diag.sort()
    return diag, len(diag)


def hermite_basis(vectors: Sequence[dict]) -> list[dict]:
    """A Z-basis (echelon form) of the lattice spanned by integer sparse vectors."""
    pivots: dict[int, dict] = {}
    pending = [dict((j, int(x)) for j, x in v.items() if x) for v in vectors]
    while pending:
        row = pending.pop()
        while row:
            lead = min(row)
            piv = pivots.get(lead)
            if piv is None:
                if row[lead] < 0:
                    row = {j: -x for j, x in row.items()}
                pivots[lead] = row
                break
            a, b = piv[lead], row[lead]
            if b % a == 0:
                c = b // a
                for j, x in piv.items():
                    v = row.get(j, 0) - c * x
                    if v:
                        row[j] = v
                    else:
                        row.pop(j, None)
                continue
            # extended gcd combination keeps the lattice unchanged
            g, s, t = _xgcd(a, b)
            new_piv = {}
            for j in set(piv) | set(row):
                v = s * piv.get(j, 0) + t * row.get(j, 0)
                if v:
                    new_piv[j] = v
            u, w = a // g, b // g
            rest = {}
            for j in set(piv) | set(row):
                v = u * row.get(j, 0) - w * piv.get(j, 0)
                if v:
                    rest[j] = v
            pivots[lead] = new_piv
            row = rest
    # reduced form: positive pivots, entries above a pivot in [0, pivot)
    leads = sorted(pivots)
    for lead in leads:
        if pivots[lead][lead] < 0:
            pivots[lead] = {j: -x for j, x in pivots[lead].items()}
    for pos, lead in enumerate(leads):
        piv = pivots[lead]
        p = piv[lead]
        for other in leads[:pos]:
            row = pivots[other]
            c = row.get(lead, 0) // p
            if c:
                for j, x in piv.items():
                    v = row.get(j, 0) - c * x
                    if v:
                        row[j] = v
                    else:
                        row.pop(j, None)
    return [pivots[k] for k in leads]


def _xgcd(a: int, b: int):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        qq = old_r // r
        old_r, r = r, old_r - qq * r
        old_s, s = s, old_s - qq * s
        old_t, t = t, old_t - qq * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


# ---------------------------------------------------------------------------
# compressed column storage for the compiled kernels


class PackedMatrix:
    """Compressed sparse column matrix with ``int64`` entries.

    ``modulus`` is the prime the entries are reduced by, or ``None`` when the
    entries are exact integers.
    """

    __slots__ = ("nrows", "ncols", "indptr", "indices", "data", "modulus")

    def __init__(self, nrows, ncols, indptr, indices, data, modulus=None):
        import numpy as np

        self.nrows = int(nrows)
        self.ncols = int(ncols)
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int32)
        self.data = np.asarray(data, dtype=np.int64)
        self.modulus = modulus
        if len(self.indptr) != self.ncols + 1:
            raise ValueError("indptr has the wrong length")

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def nnz(self) -> int:
        return int(self.indptr[-1])

    def arrays(self):
        return self.indptr, self.indices, self.data

    @classmethod
    def from_matrix(cls, m: Matrix, ring: RingSpec, modulus: int | None = None) -> "PackedMatrix":
        """Pack ``m``; entries are reduced mod ``modulus`` or must be integers when it is ``None``."""
        indptr = [0]
        indices = []
        data = []
        for col in m.cols:
            for i in sorted(col):
                x = col[i]
                if modulus is not None:
                    x = ring.residue(x, modulus)
                    if x == 0:
                        continue
                else:
                    if int(x) != x:
                        raise ValueError("non-integral entry in an exact packing")
                    x = int(x)
                indices.append(i)
                data.append(x)
            indptr.append(len(indices))
        return cls(m.nrows, m.ncols, indptr, indices, data, modulus)

    def to_matrix(self) -> Matrix:
        cols = []
        ip, ix, dv = self.indptr, self.indices, self.data
        for j in range(self.ncols):
            cols.append({int(ix[t]): int(dv[t]) for t in range(int(ip[j]), int(ip[j + 1]))})
        return Matrix(self.nrows, self.ncols, cols)


class PackedBuilder:
    """Accumulates columns into :class:`PackedMatrix` form without keeping dicts around."""

    def __init__(self, nrows: int, ring: RingSpec, modulus: int | None):
        from array import array

        self.nrows = nrows
        self.ring = ring
        self.modulus = modulus
        self.indptr = array("q", [0])
        self.indices = array("i")
        self.data = array("q")

    def add_column(self, col: dict) -> None:
        ring, mod = self.ring, self.modulus
        for i in sorted(col):
            x = col[i]
            if mod is not None:
                x = ring.residue(x, mod)
                if x == 0:
                    continue
            self.indices.append(i)
            self.data.append(int(x))
        self.indptr.append(len(self.indices))

    def finish(self) -> PackedMatrix:
        import numpy as np

        return PackedMatrix(
            self.nrows,
            len(self.indptr) - 1,
            np.frombuffer(self.indptr, dtype=np.int64),
            np.frombuffer(self.indices, dtype=np.int32),
            np.frombuffer(self.data, dtype=np.int64),
            self.modulus,
        )
