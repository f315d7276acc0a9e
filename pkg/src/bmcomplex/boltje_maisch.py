"""The complex of duals of permutation modules resolving the dual Specht module.

Degree ``-1`` is ``Hom_R(S^lam, R)``, degree ``0`` is ``Hom_R(M^lam, R)`` and
degree ``k >= 1`` is the sum over strict dominance chains ``mu1 > ... > muk > lam``
of ``Hom_R(M^mu1, R) (x) Hom^(M^mu2, M^mu1) (x) ... (x) Hom^(M^lam, M^muk)``,
where each ``Hom^`` is spanned by the level-one basis maps.  The differential
composes adjacent factors: ``d(f0 (x) ... (x) fk) = sum_{t<k} (-1)^t f0 (x) ... (x) ft fk+1 (x) ...``.

The Schur functor image of the induced bar resolution is the same complex
with ``Hom_R(M^mu1, R)`` replaced by ``Hom_H(M^mu1, H)``; the map ``phi``
reading off the ``T_e`` coefficient identifies the two.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Sequence

from .assembly import BlockMap, SmallMatrix, Term, height, products_vanish
from .combinatorics import (
    Composition,
    canonical_multi_index,
    compositions,
    double_coset_reps,
    min_coset_reps,
    multi_indices,
    parse_composition,
    partitions,
    standard_tableaux_count,
)
from .exact_linalg import INTEGERS, Matrix, RingSpec, rank as exact_rank, smith_normal_form
from .hecke import index_of, specht_basis
from .qschur import SchurBasisLabel, StructureConstantTable
from .resolutions import (
    FreeChainComplex,
    TensorChains,
    bar_complex,
    compute_homology,
    induce_to_schur,
    validate,
)

POOLS = ("compositions", "partitions")


def pool_weights(n: int, r: int, pool: str | Sequence = "compositions") -> tuple:
    """Weights allowed in chains: all compositions, all partitions, or an explicit list."""
    if isinstance(pool, str):
        if pool == "compositions":
            return compositions(n, r)
        if pool == "partitions":
            return partitions(n, r)
        raise ValueError(f"unknown pool {pool!r}; expected one of {POOLS}")
    return tuple(Composition(p) for p in pool)


def delta(n: int, r: int) -> Composition:
    """``(1, ..., 1, 0, ..., 0)`` with ``r`` ones; ``M^delta`` is the regular module."""
    if n < r:
        raise ValueError(f"the Schur functor needs n >= r (got n={n}, r={r})")
    return Composition([1] * r + [0] * (n - r))


def _as_partition(lam, n: int | None) -> Composition:
    lam = parse_composition(lam) if isinstance(lam, str) else Composition(lam)
    if not lam.is_partition():
        raise ValueError(f"{tuple(lam)} is not a partition")
    if n is not None:
        if len(lam) > n and any(lam[n:]):
            raise ValueError(f"{tuple(lam)} has more than {n} nonzero parts")
        lam = Composition(tuple(lam[:n]) + (0,) * (n - len(lam)))
    return lam


def dual_merge(table: StructureConstantTable):
    """``Hom_R(M^mu, R) (x) Hom^(M^nu, M^mu) -> Hom_R(M^nu, R)``: a functional composed with a map.

    In dual coordinates the functional ``m_a^*`` composed with ``psi`` is row ``a`` of its matrix.
    """

    def build(chains: TensorChains, mu, nu) -> SmallMatrix:
        jl = chains.j(mu, nu)
        triples = []
        for y, h in enumerate(jl):
            for a, row in enumerate(table.psi_rows(h)):
                for b, x in row.items():
                    triples.append((a * len(jl) + y, b, x))
        return SmallMatrix.from_triples(triples)

    return build


@dataclass
class BMComplex:
    complex: FreeChainComplex
    lam: Composition
    pool: tuple
    chains: TensorChains
    specht: list           # basis vectors of S^lam in M^lam coordinates


def build_bm_complex(lam, pool: str | Sequence = "compositions", ring: RingSpec | None = None,
                     n: int | None = None, table: StructureConstantTable | None = None) -> BMComplex:
    """Build the complex for the partition ``lam`` (``n`` defaults to ``r``)."""
    if table is not None:
        ring, n = table.ring, table.n
    ring = ring or RingSpec.rationals()
    lam = _as_partition(lam, n if n is not None else sum(Composition(lam)))
    n, r = len(lam), sum(lam)
    table = table or StructureConstantTable(n, r, ring)
    weights = pool_weights(n, r, pool)
    if lam not in weights:
        weights = weights + (lam,)
    merge = dual_merge(table)
    holder: dict = {}
    tc = TensorChains(lam, weights, lambda mu: min_coset_reps(tuple(mu)),
                      lambda mu, nu: merge(holder["tc"], mu, nu), table)
    holder["tc"] = tc
    cx = tc.complex(name=f"bm({lam})")
    spe = specht_basis(lam, ring)
    if ring.kind == "rationals":
        spe = [_primitive(v) for v in spe]
    cx.spaces[-1] = [f"S*{i}" for i in range(len(spe))]
    dim0 = tc.degrees[0].size
    # restriction of functionals to S^lam: column b holds the b-th coordinates of the basis vectors
    cols = [dict() for _ in range(dim0)]
    for i, v in enumerate(spe):
        for b, x in v.items():
            cols[b][i] = x
    cx.differentials[0] = Matrix(len(spe), dim0, cols)
    return BMComplex(cx, lam, weights, tc, spe)


def _primitive(v: dict) -> dict:
    """Scale a rational vector to a primitive integer vector (same line)."""
    from fractions import Fraction
    from math import gcd, lcm

    vals = [Fraction(x) for x in v.values()]
    den = lcm(*[x.denominator for x in vals]) if vals else 1
    ints = {k: int(Fraction(x) * den) for k, x in v.items()}
    g = 0
    for x in ints.values():
        g = gcd(g, x)
    g = g or 1
    return {k: Fraction(x // g) for k, x in ints.items()}


def schur_functor_image(bar, table: StructureConstantTable) -> FreeChainComplex:
    """``psi_delta`` times the induced bar complex: left factors ``psi^d_{delta mu1}``.

    The differential never changes the first index of the left factor, so the
    image is the subcomplex built on those left factors alone.
    """
    return induce_to_schur(bar, table, tops=[delta(table.n, table.r)])


def phi_iso(nu, table: StructureConstantTable) -> Matrix:
    """Matrix of ``phi_nu: Hom_H(M^nu, H) -> Hom_R(M^nu, R)``.

    Columns are the maps ``psi^d_{delta nu}``; rows are the dual basis of
    ``{x_nu T_b}``; the entry is the ``T_e`` coefficient of ``psi^d_{delta nu}(x_nu T_b)``.
    """
    nu = Composition(nu)
    dl = delta(table.n, table.r)
    e_pos = index_of(tuple(dl))[canonical_multi_index(dl)]
    reps = double_coset_reps(dl, nu)
    cols = []
    for d in reps:
        col = {}
        for b, image in enumerate(table.psi(SchurBasisLabel(dl, nu, d))):
            x = image.get(e_pos, 0)
            if x:
                col[b] = x
        cols.append(col)
    return Matrix(len(multi_indices(tuple(nu))), len(reps), cols)


def phi_invertible(nu, table: StructureConstantTable) -> bool:
    m = phi_iso(nu, table)
    if m.nrows != m.ncols:
        return False
    if table.ring.kind == INTEGERS:
        factors, _ = smith_normal_form(m)
        return len(factors) == m.nrows and all(f == 1 for f in factors)
    return exact_rank(m, table.ring) == m.nrows


class ChainIsoError(ValueError):
    pass


def _chain_map(bm: BMComplex, sf: FreeChainComplex, k: int, phis: dict, sign: int = 1) -> BlockMap:
    src, tgt = sf.spaces[k], bm.complex.spaces[k]
    terms = []
    for blk in src.blocks:
        mu1 = blk.key[0] if blk.key else bm.lam
        terms.append(Term(blk, tgt.by_key[blk.key], 0, 1, 1, phis[(mu1, sign)]))
    return BlockMap(src, tgt, terms, sf.ring)


def chain_iso_check(bm: BMComplex, sf: FreeChainComplex, table: StructureConstantTable) -> bool:
    """``Phi = phi_mu1 (x) id (x) ... (x) id`` is an isomorphism of complexes in degrees ``>= 0``."""
    ring = table.ring
    bcx = bm.complex
    for k in sorted(set(sf.spaces) | {d for d in bcx.spaces if d >= 0}):
        a, b = sf.spaces.get(k), bcx.spaces.get(k)
        ka = {blk.key for blk in a.blocks} if a is not None else set()
        kb = {blk.key for blk in b.blocks} if b is not None else set()
        if ka != kb:
            missing = sorted(ka ^ kb)
            raise ChainIsoError(f"degree {k}: unmatched chains {[tuple(map(tuple, c)) for c in missing][:10]}")
        for blk in a.blocks if a is not None else ():
            if blk.factors[1:] != b.by_key[blk.key].factors[1:]:
                raise ChainIsoError(f"degree {k}: chain {blk.key} has different Hom factors")
    phis: dict = {}
    for mu in set(blk.key[0] if blk.key else bm.lam for k in sf.spaces for blk in sf.spaces[k].blocks):
        if not phi_invertible(mu, table):
            return False
        m = phi_iso(mu, table)
        trip = [(j, i, x) for j, col in enumerate(m.cols) for i, x in col.items()]
        phis[(mu, 1)] = SmallMatrix.from_triples(trip)
        phis[(mu, -1)] = SmallMatrix.from_triples([(j, i, -x) for j, i, x in trip])
    top = max(sf.spaces)
    for k in range(1, top + 1):
        if not sf.spaces[k].size:
            continue
        lhs = (bcx.differential(k), _chain_map(bm, sf, k, phis))
        rhs = (_chain_map(bm, sf, k - 1, phis, -1), sf.differential(k))
        if not products_vanish([lhs, rhs], None, height, ring):
            return False
    return True


def exactness_report(lam, ring: RingSpec, pool: str | Sequence = "compositions", n: int | None = None,
                     table: StructureConstantTable | None = None) -> dict:
    """Build the complex, check ``d^2 = 0`` and compute its homology in every degree."""
    t0 = time.perf_counter()
    bm = build_bm_complex(lam, pool, ring, n=n, table=table)
    c = bm.complex
    d2 = validate(c)
    h = compute_homology(c, d2)
    dims = c.dims()
    top = c.top_degree()
    return {
        "lambda": list(bm.lam),
        "pool": pool if isinstance(pool, str) else "custom",
        "ring": ring.describe(),
        "dims": {str(k): v for k, v in sorted(dims.items())},
        "top_degree": top,
        "d2_zero": d2,
        "homology": {str(k): h.ranks[k] for k in sorted(h.ranks)},
        "torsion": {str(k): h.torsion[k] for k in sorted(h.torsion) if h.torsion[k]},
        "euler_characteristic": c.euler_characteristic(),
        "specht_rank_matches_syt": len(bm.specht) == standard_tableaux_count([x for x in bm.lam if x]),
        "exact": h.is_zero(),
        "method": h.method,
        "elapsed_ms": round((time.perf_counter() - t0) * 1000),
    }


def iso_report(lam, table: StructureConstantTable, pool: str | Sequence = "compositions") -> dict:
    """Compare the complex with the Schur functor image of the induced bar resolution."""
    bm = build_bm_complex(lam, pool, table=table)
    bar = bar_complex(bm.lam, table, bm.pool)
    sf = schur_functor_image(bar, table)
    try:
        ok = chain_iso_check(bm, sf, table)
        err = None
    except ChainIsoError as exc:
        ok, err = False, str(exc)
    return {
        "lambda": list(bm.lam),
        "dims_bm": {str(k): v for k, v in sorted(bm.complex.dims().items()) if k >= 0},
        "dims_schur_functor": {str(k): v for k, v in sorted(sf.dims().items())},
        "isomorphic": ok,
        "error": err,
    }
