"""Finite free chain complexes, their homology, and the bar resolution of a simple module.

The bar complex here resolves the rank one module ``L_lam`` on which the
idempotent ``psi_lam`` acts as the identity and every other basis element of
the Borel subalgebra acts by zero.  In degree ``k`` its basis is indexed by
strict dominance chains ``mu1 > ... > muk > lam`` together with a left factor
``psi^d_{nu mu1}`` and level-one factors ``psi_{mu_i} J_1 psi_{mu_{i+1}}``
between consecutive members.  The differential is the alternating sum of the
products of adjacent factors; the last product (with ``L_lam``) always
vanishes because ``J_1`` kills ``L_lam``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

from . import kernels
from .assembly import Block, BlockMap, Degree, SmallMatrix, height, products_vanish
from .combinatorics import Composition, all_dominance_chains, compositions, double_coset_reps, upper_reps
from .exact_linalg import (
    INTEGERS,
    PRIME_FIELD,
    RATIONALS,
    Matrix,
    PackedMatrix,
    RingSpec,
    rank as exact_rank,
    smith_normal_form,
)
from .qschur import SchurBasisLabel, StructureConstantTable, idempotent, weight_truncate

# primes just below 2**31 used for modular ranks over the rationals
LARGE_PRIMES = (2147483629, 2147483587, 2147483579, 2147483563, 2147483549, 2147483543)


class ChainLabel(NamedTuple):
    """Basis element ``left (x) homs[0] (x) ... (x) homs[-1]`` of a bar-type complex."""

    chain: tuple
    left: object
    homs: tuple

    @property
    def degree(self) -> int:
        return len(self.chain)

    def __str__(self):
        return " ⊗ ".join([str(self.left)] + [str(h) for h in self.homs])


def _dim(space) -> int:
    return space.size if isinstance(space, Degree) else len(space)


def _materialize(space) -> list:
    if isinstance(space, Degree):
        return [ChainLabel(b.key, lab[0], tuple(lab[1:])) for b in space.blocks for lab in b.labels()]
    return list(space)


@dataclass
class FreeChainComplex:
    """Free modules ``C_k`` and differentials ``d_k: C_k -> C_{k-1}``.

    ``spaces[k]`` is either a list of labels or a :class:`Degree` of blocks;
    differentials are :class:`Matrix`, :class:`PackedMatrix` or :class:`BlockMap`.
    """

    ring: RingSpec
    spaces: dict
    differentials: dict = field(default_factory=dict)
    name: str = ""

    @property
    def degrees(self) -> list[int]:
        return sorted(self.spaces)

    @property
    def min_degree(self) -> int:
        return min(self.spaces)

    @property
    def max_degree(self) -> int:
        return max(self.spaces)

    def dim(self, k: int) -> int:
        s = self.spaces.get(k)
        return 0 if s is None else _dim(s)

    def dims(self) -> dict:
        return {k: self.dim(k) for k in self.degrees}

    def labels(self, k: int) -> list:
        return _materialize(self.spaces[k])

    def differential(self, k: int):
        m = self.differentials.get(k)
        if m is None:
            return Matrix(self.dim(k - 1), self.dim(k))
        return m

    def matrix(self, k: int) -> Matrix:
        """``d_k`` as an exact sparse matrix."""
        m = self.differential(k)
        if isinstance(m, BlockMap):
            return m.matrix()
        if isinstance(m, PackedMatrix):
            return m.to_matrix()
        return m

    def top_degree(self) -> int:
        nonzero = [k for k in self.degrees if self.dim(k)]
        return max(nonzero) if nonzero else self.min_degree

    def euler_characteristic(self) -> int:
        return sum((-1) ** (k % 2) * self.dim(k) for k in self.degrees)

    def perturbed(self, k: int, row: int, col: int, delta=1) -> "FreeChainComplex":
        """Copy with one entry of ``d_k`` changed by ``delta``."""
        m = self.matrix(k).copy()
        v = self.ring.norm(m.cols[col].get(row, 0) + delta)
        if v:
            m.cols[col][row] = v
        else:
            m.cols[col].pop(row, None)
        diffs = dict(self.differentials)
        diffs[k] = m
        return FreeChainComplex(self.ring, self.spaces, diffs, self.name)

    def with_differentials(self, diffs: dict) -> "FreeChainComplex":
        return FreeChainComplex(self.ring, self.spaces, diffs, self.name)


def _check_shapes(c: FreeChainComplex) -> None:
    for k, m in c.differentials.items():
        if tuple(m.shape) != (c.dim(k - 1), c.dim(k)):
            raise ValueError(f"d_{k} has shape {m.shape}, expected {(c.dim(k - 1), c.dim(k))}")


def validate(c: FreeChainComplex) -> bool:
    """True iff every composite ``d_k d_{k+1}`` is exactly zero."""
    _check_shapes(c)
    for k in c.degrees:
        if k + 1 not in c.spaces:
            continue
        a, b = c.differential(k), c.differential(k + 1)
        if a.shape[0] == 0 or a.shape[1] == 0 or b.shape[1] == 0:
            continue
        if isinstance(a, Matrix) and isinstance(b, Matrix):
            if not a.matmul(b, c.ring).is_zero():
                return False
        elif not products_vanish([(a, b)], None, height, c.ring):
            return False
    return True


# ---------------------------------------------------------------------------
# ranks and homology


def _packed(m, ring: RingSpec, modulus: int | None) -> PackedMatrix:
    if isinstance(m, BlockMap):
        return m.packed(modulus)
    if isinstance(m, PackedMatrix):
        if m.modulus != modulus:
            raise ValueError("matrix is packed modulo a different prime")
        return m
    return PackedMatrix.from_matrix(m, ring, modulus)


def modular_rank(m, ring: RingSpec, p: int | None = None) -> int:
    """Rank of ``m`` reduced mod ``p`` (``p`` defaults to the characteristic of a prime field)."""
    if m.shape[0] == 0 or m.shape[1] == 0:
        return 0
    if ring.kind == PRIME_FIELD:
        p = ring.p
    packed = _packed(m, ring, p)
    return kernels.rank_mod_p(packed.nrows, packed.ncols, *packed.arrays(), p)


def integer_invariant_factors(m, ring: RingSpec | None = None) -> list[int]:
    """Smith invariant factors of an integer matrix (unit pivots first, then a full Smith form)."""
    if m.shape[0] == 0 or m.shape[1] == 0:
        return []
    packed = _packed(m, ring or RingSpec.integers(), None)
    try:
        k, rest = kernels.unit_pivot_reduce(packed.nrows, packed.ncols, *packed.arrays())
    except OverflowError:
        from . import _pykernels

        k, rest = _pykernels.unit_pivot_reduce(packed.nrows, packed.ncols, *packed.arrays())
    factors, _ = smith_normal_form(Matrix(packed.nrows, len(rest), rest)) if rest else ([], 0)
    return [1] * k + factors


def rational_modulus(ring: RingSpec) -> int:
    q = ring.q_value
    for p in LARGE_PRIMES:
        if q.numerator % p and q.denominator % p:
            return p
    raise ArithmeticError("no usable modulus")


@dataclass
class HomologyResult:
    ranks: dict            # degree -> homology rank (free rank over the integers)
    torsion: dict          # degree -> invariant factors > 1 (integers only)
    diff_ranks: dict       # degree -> rank of d_k
    method: str
    d2_zero: bool = True

    def is_zero(self) -> bool:
        return self.d2_zero and all(v == 0 for v in self.ranks.values()) and all(not t for t in self.torsion.values())


def compute_homology(c: FreeChainComplex, d2_zero: bool | None = None) -> HomologyResult:
    """Homology in every degree, including both ends.

    Over a prime field the ranks are exact.  Over the rationals ranks are
    taken modulo a large prime; those are lower bounds, so once ``d^2 = 0`` is
    known exactly and the resulting homology vanishes, it vanishes over the
    rationals too.  If it does not vanish, the differentials are eliminated
    exactly.  Over the integers the Smith form of every differential is used.
    """
    _check_shapes(c)
    ring = c.ring
    if d2_zero is None:
        d2_zero = validate(c)
    degs = c.degrees
    diff_degs = [k for k in degs if k - 1 in c.spaces]
    torsion = {k: [] for k in degs}
    if ring.kind == PRIME_FIELD:
        ranks = {k: modular_rank(c.differential(k), ring) for k in diff_degs}
        method = f"rank over F_{ring.p}"
    elif ring.kind == RATIONALS:
        p = rational_modulus(ring)
        ranks = {k: modular_rank(c.differential(k), ring, p) for k in diff_degs}
        method = f"rank mod {p} as a lower bound, certified by d^2 = 0"
        h = _homology_from_ranks(c, ranks)
        if not d2_zero or any(h.values()):
            ranks = {k: exact_rank(c.matrix(k), ring) for k in diff_degs}
            method = "exact rational elimination"
    else:
        ranks = {}
        for k in diff_degs:
            factors = integer_invariant_factors(c.differential(k), ring)
            ranks[k] = len(factors)
            # invariant factors of d_k above 1 are the torsion of H_{k-1}
            torsion[k - 1] = [f for f in factors if f != 1]
        method = "Smith normal form over Z"
    return HomologyResult(_homology_from_ranks(c, ranks), torsion, ranks, method, d2_zero)


def _homology_from_ranks(c: FreeChainComplex, ranks: dict) -> dict:
    return {k: c.dim(k) - ranks.get(k, 0) - ranks.get(k + 1, 0) for k in c.degrees}


def homology_ranks(c: FreeChainComplex) -> list[int]:
    """Homology ranks ordered from the top degree down to the bottom."""
    h = compute_homology(c)
    return [h.ranks[k] for k in sorted(h.ranks, reverse=True)]


def integral_homology(c: FreeChainComplex) -> dict:
    """Per degree: free rank and torsion invariant factors (ring must be the integers)."""
    if c.ring.kind != INTEGERS:
        raise ValueError("integral homology needs the integers")
    h = compute_homology(c)
    return {k: {"rank": h.ranks[k], "torsion": h.torsion[k]} for k in c.degrees}


# ---------------------------------------------------------------------------
# tensor-chain complexes


def level_one_factors(chain: Sequence, lam) -> list[list[SchurBasisLabel]]:
    """For ``mu1 > ... > muk > lam``, the basis of each ``psi_{mu_i} J_1 psi_{mu_{i+1}}``."""
    seq = list(chain) + [Composition(lam)]
    return [weight_truncate(seq[i], 1, seq[i + 1]) for i in range(len(chain))]


def borel_left_factors(pool: Sequence) -> Callable:
    """Left factors ``psi^d_{nu mu}`` of the Borel subalgebra with ``nu`` in the pool."""
    pool = [Composition(p) for p in pool]

    def fn(mu):
        return [SchurBasisLabel(nu, Composition(mu), d) for nu in pool for d in upper_reps(tuple(nu), tuple(mu))]

    return fn


def full_left_factors(n: int, r: int, tops: Sequence | None = None) -> Callable:
    """Left factors ``psi^d_{nu mu}`` of the whole algebra, ``nu`` over ``tops`` (default: all)."""
    tops = [Composition(t) for t in (tops if tops is not None else compositions(n, r))]

    def fn(mu):
        return [SchurBasisLabel(nu, Composition(mu), d) for nu in tops for d in double_coset_reps(nu, mu)]

    return fn


class TensorChains:
    """Degrees ``k >= 0`` and differentials of a complex built on dominance chains.

    Degree ``k`` has one block per chain ``mu1 > ... > muk > lam`` with factors
    ``[left(mu1), J(mu1, mu2), ..., J(muk, lam)]``.  ``left_merge(mu, nu)``
    returns the small matrix of ``left(mu) (x) J(mu, nu) -> left(nu)``.
    """

    def __init__(self, lam, pool: Sequence, left_fn: Callable, left_merge: Callable,
                 table: StructureConstantTable, max_degree: int | None = None):
        self.lam = Composition(lam)
        self.pool = tuple(Composition(p) for p in pool)
        self.left_fn = left_fn
        self.left_merge = left_merge
        self.table = table
        self.ring = table.ring
        self._left_cache: dict = {}
        self._merge_cache: dict = {}
        self._j_cache: dict = {}
        self.degrees: dict = {}
        for k, chains in sorted(all_dominance_chains(self.pool, self.lam).items()):
            if max_degree is not None and k > max_degree:
                break
            self.degrees[k] = Degree([Block(ch, self.factors(ch)) for ch in chains])

    def left(self, mu) -> list:
        out = self._left_cache.get(mu)
        if out is None:
            out = self._left_cache[mu] = list(self.left_fn(mu))
        return out

    def j(self, a, b) -> list:
        key = (a, b)
        out = self._j_cache.get(key)
        if out is None:
            out = self._j_cache[key] = weight_truncate(a, 1, b)
        return out

    def factors(self, chain) -> list:
        seq = list(chain) + [self.lam]
        return [self.left(seq[0])] + [self.j(seq[i], seq[i + 1]) for i in range(len(chain))]

    def _j_merge(self, a, b, c) -> SmallMatrix:
        key = (a, b, c)
        m = self._merge_cache.get(key)
        if m is None:
            ja, jb, jc = self.j(a, b), self.j(b, c), self.j(a, c)
            idx = {lab: i for i, lab in enumerate(jc)}
            triples = []
            for x, la in enumerate(ja):
                for y, lb in enumerate(jb):
                    for lab, coef in self.table.compose(la, lb).items():
                        triples.append((x * len(jb) + y, idx[lab], coef))
            m = self._merge_cache[key] = SmallMatrix.from_triples(triples)
        return m

    def _l_merge(self, a, b) -> SmallMatrix:
        key = ("left", a, b)
        m = self._merge_cache.get(key)
        if m is None:
            m = self._merge_cache[key] = self.left_merge(a, b)
        return m

    def differential(self, k: int) -> BlockMap:
        """``d_k`` for ``k >= 1``: alternating sum of adjacent products (the last one vanishes)."""
        src, tgt = self.degrees[k], self.degrees[k - 1]
        terms = []
        add = terms.append
        by_key = tgt.by_key
        lam = self.lam
        for blk in src.blocks:
            key = blk.key
            seq = key + (lam,)
            # t = 0: left factor times the first level-one factor
            add((blk, by_key[key[1:]], 0, 2, 1, self._l_merge(seq[0], seq[1]), 1))
            for t in range(1, k):
                m = self._j_merge(seq[t - 1], seq[t], seq[t + 1])
                add((blk, by_key[key[:t] + key[t + 1:]], t, 2, 1, m, -1 if t % 2 else 1))
        return BlockMap(src, tgt, terms, self.ring)

    def complex(self, name: str = "") -> FreeChainComplex:
        diffs = {k: self.differential(k) for k in self.degrees if k >= 1}
        return FreeChainComplex(self.ring, dict(self.degrees), diffs, name)


def schur_left_merge(table: StructureConstantTable, chains: TensorChains) -> Callable:
    """Left merge by composition in the algebra: ``psi^d_{nu mu} (x) j -> psi^d_{nu mu} j``."""

    def merge(mu, nu):
        left_mu, left_nu = chains.left(mu), chains.left(nu)
        jl = chains.j(mu, nu)
        idx = {lab: i for i, lab in enumerate(left_nu)}
        triples = []
        for x, a in enumerate(left_mu):
            for y, b in enumerate(jl):
                for lab, coef in table.compose(a, b).items():
                    try:
                        triples.append((x * len(jl) + y, idx[lab], coef))
                    except KeyError:
                        raise AssertionError(f"product {a} * {b} leaves the left factors") from None
        return SmallMatrix.from_triples(triples)

    return merge


def _schur_chains(lam, pool, table, left_fn) -> TensorChains:
    holder = {}

    def merge(mu, nu):
        return holder["merge"](mu, nu)

    tc = TensorChains(lam, pool, left_fn, merge, table)
    holder["merge"] = schur_left_merge(table, tc)
    return tc


# ---------------------------------------------------------------------------
# bar complex of the Borel subalgebra


@dataclass
class BarComplex:
    complex: FreeChainComplex
    splitting: dict          # degree k -> map s_k: C_k -> C_{k+1}
    lam: Composition
    pool: tuple
    chains: TensorChains


def bar_complex(lam, table: StructureConstantTable, pool: Sequence | None = None) -> BarComplex:
    """Bar resolution of ``L_lam`` over the Borel subalgebra cut down to ``pool``."""
    n, r, ring = table.n, table.r, table.ring
    lam = Composition(lam)
    pool = tuple(Composition(p) for p in (pool if pool is not None else compositions(n, r)))
    if lam not in pool:
        raise ValueError(f"{lam} is not in the pool")
    tc = _schur_chains(lam, pool, table, borel_left_factors(pool))
    cx = tc.complex(name=f"bar({lam})")
    cx.spaces[-1] = ["L"]
    e_lam = idempotent(lam)
    deg0 = tc.degrees[0]
    left0 = tc.left(lam)
    cx.differentials[0] = Matrix(1, deg0.size, [({0: 1} if a == e_lam else {}) for a in left0])

    # contracting homotopy: s(a (x) rest) = psi_nu (x) a (x) rest for a in J_1 psi_mu1, and 0 on psi_mu1
    split = {-1: Matrix(deg0.size, 1, [{left0.index(e_lam): 1}])}
    pieces: dict = {}

    def split_pieces(mu1):
        out = pieces.get(mu1)
        if out is None:
            by_nu: dict = {}
            for x, a in enumerate(tc.left(mu1)):
                if not a.is_idempotent():
                    by_nu.setdefault(a.lam, []).append((x, a))
            out = []
            for nu, items in by_nu.items():
                jl = tc.j(nu, mu1)
                idx = {lab: i for i, lab in enumerate(jl)}
                e_pos = tc.left(nu).index(idempotent(nu))
                out.append((nu, SmallMatrix.from_triples([(x, e_pos * len(jl) + idx[a], 1) for x, a in items])))
            pieces[mu1] = out
        return out

    for k in sorted(tc.degrees):
        src = tc.degrees[k]
        tgt = tc.degrees.get(k + 1, Degree([]))
        terms = []
        for blk in src.blocks:
            for nu, sm in split_pieces(blk.key[0] if blk.key else lam):
                terms.append((blk, tgt.by_key[(nu,) + blk.key], 0, 1, 2, sm, 1))
        split[k] = BlockMap(src, tgt, terms, ring)
    return BarComplex(cx, split, lam, pool, tc)


def splitting_check(bar: BarComplex, splitting: dict | None = None) -> bool:
    """``d_0 s_{-1} = id`` and ``d_{k+1} s_k + s_{k-1} d_k = id`` in every degree ``k >= 0``."""
    c = bar.complex
    ring = c.ring
    s = splitting if splitting is not None else bar.splitting
    d0 = c.differential(0)
    if d0.matmul(_exact(s[-1]), ring) != Matrix.identity(1):
        return False
    for k in range(0, c.max_degree + 1):
        pairs = []
        if c.dim(k + 1):
            pairs.append((c.differential(k + 1), s[k]))
        pairs.append((s[k - 1], c.differential(k)))
        if not products_vanish(pairs, c.dim(k), height, ring):
            return False
    return True


def _exact(m) -> Matrix:
    if isinstance(m, BlockMap):
        return m.matrix()
    return m


def induce_to_schur(bar: BarComplex, table: StructureConstantTable, tops: Sequence | None = None) -> FreeChainComplex:
    """Extend the left factors from the Borel subalgebra to the whole algebra.

    ``tops`` restricts the first index of the left factor; the differential
    never changes it, so this is the image under the corresponding idempotent
    (the Schur functor when ``tops`` is ``[(1, ..., 1, 0, ...)]``).  Degree
    ``-1`` is dropped.
    """
    n, r = table.n, table.r
    tc = _schur_chains(bar.lam, bar.pool, table, full_left_factors(n, r, tops))
    return tc.complex(name=f"induced({bar.lam})")


def bar_differential_column(label: ChainLabel, table: StructureConstantTable) -> dict:
    """``d_k`` on one basis element of degree ``k >= 1``, straight from the alternating-sum formula."""
    ring = table.ring
    out: dict = {}
    chain, homs = label.chain, label.homs
    for lab, c in table.compose(label.left, homs[0]).items():
        key = ChainLabel(chain[1:], lab, homs[1:])
        out[key] = out.get(key, 0) + c
    for t in range(1, len(chain)):
        sign = -1 if t % 2 else 1
        for lab, c in table.compose(homs[t - 1], homs[t]).items():
            key = ChainLabel(chain[:t] + chain[t + 1:], label.left, homs[: t - 1] + (lab,) + homs[t + 1:])
            out[key] = out.get(key, 0) + sign * c
    if homs[-1].level is None or homs[-1].level < 1:
        raise AssertionError("last tensor factor is not in J_1")
    norm = ring.norm
    return {k: v for k, v in ((k, norm(v)) for k, v in out.items()) if v != 0}
