"""Iwahori-Hecke algebra of the symmetric group and its permutation modules.

``HeckeElement`` is the reference implementation working in the ``T_w``
basis.  The permutation module ``M^mu = x_mu H`` has the basis
``m_j = x_mu T_d`` indexed by the multi-indices ``j = i_mu . d``; since
``x_mu T_d`` is the sum of ``T_w`` over the coset ``S_mu d`` the right action
of a generator has a closed form on these labels (:func:`act_generator`),
which is what the homomorphism matrices are built from.  The ``T_w``
expansion is kept as an independent check.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

from .combinatorics import (
    Composition,
    conjugate,
    identity,
    is_double_coset_rep,
    min_coset_reps,
    multi_indices,
    omega_matrix,
    omega_of_multi_index,
    perm_inverse,
    perm_length,
    perm_mul,
    reduced_word,
    simple_reflection,
    standard_tableaux_count,
    young_subgroup,
)
from .exact_linalg import Matrix, RingSpec, hermite_basis, rref_rows


class HeckeElement:
    """Element of ``H_r`` over ``ring`` as a sparse map ``w -> coefficient``."""

    __slots__ = ("r", "ring", "coeffs")

    def __init__(self, r: int, ring: RingSpec, coeffs: Mapping | None = None):
        self.r = r
        self.ring = ring
        self.coeffs = {}
        for w, c in (coeffs or {}).items():
            c = ring.norm(c)
            if c != 0:
                self.coeffs[tuple(w)] = c

    @classmethod
    def basis(cls, w, ring: RingSpec) -> "HeckeElement":
        return cls(len(w), ring, {tuple(w): 1})

    @classmethod
    def generator(cls, i: int, r: int, ring: RingSpec) -> "HeckeElement":
        """``T_i`` with 1-based ``i``."""
        return cls.basis(simple_reflection(i, r), ring)

    @classmethod
    def one(cls, r: int, ring: RingSpec) -> "HeckeElement":
        return cls.basis(identity(r), ring)

    def _check(self, other):
        if self.r != other.r or self.ring != other.ring:
            raise ValueError("Hecke elements over different algebras")

    def __eq__(self, other):
        return isinstance(other, HeckeElement) and self.r == other.r and self.coeffs == other.coeffs

    def __repr__(self):
        terms = " + ".join(f"{c}*T{list(w)}" for w, c in sorted(self.coeffs.items()))
        return f"HeckeElement({terms or '0'})"

    def __add__(self, other):
        self._check(other)
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            out[w] = out.get(w, 0) + c
        return HeckeElement(self.r, self.ring, out)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "HeckeElement":
        return HeckeElement(self.r, self.ring, {w: c * x for w, x in self.coeffs.items()})

    def times_generator(self, i: int) -> "HeckeElement":
        """Right multiplication by ``T_i`` (1-based ``i``)."""
        ring = self.ring
        q = ring.q
        k = i - 1
        out: dict = {}
        for w, c in self.coeffs.items():
            ws = list(w)
            ws[k], ws[k + 1] = ws[k + 1], ws[k]
            ws = tuple(ws)
            if w[k] < w[k + 1]:
                out[ws] = out.get(ws, 0) + c
            else:
                out[ws] = out.get(ws, 0) + q * c
                out[w] = out.get(w, 0) + (q - 1) * c
        return HeckeElement(self.r, ring, out)

    def times_basis(self, w) -> "HeckeElement":
        h = self
        for i in reduced_word(w):
            h = h.times_generator(i)
        return h

    def __mul__(self, other):
        if not isinstance(other, HeckeElement):
            return self.scale(other)
        self._check(other)
        acc = HeckeElement(self.r, self.ring)
        for w, c in other.coeffs.items():
            acc = acc + self.times_basis(w).scale(c)
        return acc

    def __rmul__(self, c):
        return self.scale(c)


def hecke_multiply(a: HeckeElement, b: HeckeElement) -> HeckeElement:
    return a * b


def x_element(mu: Sequence[int], ring: RingSpec) -> HeckeElement:
    """Sum of ``T_w`` over the Young subgroup of ``mu``."""
    return HeckeElement(sum(mu), ring, {w: 1 for w in young_subgroup(mu)})


def y_element(nu: Sequence[int], ring: RingSpec) -> HeckeElement:
    """``sum (-q)^(-l(w)) T_w`` over the Young subgroup of ``nu``."""
    mq = ring.elem(-ring.q_value)
    return HeckeElement(sum(nu), ring, {w: ring.power(mq, -perm_length(w)) for w in young_subgroup(nu)})


def chi(h: HeckeElement) -> HeckeElement:
    """The anti-automorphism ``T_w -> T_{w^-1}``."""
    return HeckeElement(h.r, h.ring, {perm_inverse(w): c for w, c in h.coeffs.items()})


# ---------------------------------------------------------------------------
# permutation modules


@dataclass(frozen=True)
class PermModule:
    """``M^mu`` with basis ``x_mu T_d`` for ``d`` in ``D_mu``."""

    mu: Composition
    ring: RingSpec

    @property
    def r(self) -> int:
        return sum(self.mu)

    @property
    def labels(self) -> tuple:
        return min_coset_reps(tuple(self.mu))

    @property
    def multi_indices(self) -> tuple:
        return multi_indices(tuple(self.mu))

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, j) -> int:
        return index_of(tuple(self.mu))[tuple(j)]

    def basis_element(self, k: int) -> HeckeElement:
        """``x_mu T_d`` expanded in the ``T_w`` basis."""
        d = self.labels[k]
        return HeckeElement(self.r, self.ring, {perm_mul(w, d): 1 for w in young_subgroup(self.mu)})

    def to_hecke(self, vec: Mapping[int, object]) -> HeckeElement:
        acc = HeckeElement(self.r, self.ring)
        for k, c in vec.items():
            acc = acc + self.basis_element(k).scale(c)
        return acc

    def act(self, vec: Mapping[int, object], i: int) -> dict:
        """Right action of ``T_i`` (1-based) on a coordinate vector."""
        return act_generator(tuple(self.mu), vec, i - 1, self.ring)

    def act_basis(self, vec: Mapping[int, object], w) -> dict:
        for i in reduced_word(w):
            vec = self.act(vec, i)
        return dict(vec)


@lru_cache(maxsize=None)
def index_of(mu: tuple) -> dict:
    return {j: k for k, j in enumerate(multi_indices(mu))}


@lru_cache(maxsize=None)
def _generator_table(mu: tuple, k: int) -> tuple:
    """For each basis index, ``(kind, target)`` describing the action of ``T_{k+1}``.

    kind 0: ``m_j T = m_{j s}``; kind 1: ``m_j T = q m_{j s} + (q-1) m_j``;
    kind 2: ``m_j T = q m_j``.
    """
    idx = index_of(mu)
    out = []
    for j in multi_indices(mu):
        a, b = j[k], j[k + 1]
        if a == b:
            out.append((2, idx[j]))
            continue
        js = list(j)
        js[k], js[k + 1] = b, a
        out.append((0 if a < b else 1, idx[tuple(js)]))
    return tuple(out)


def act_generator(mu: tuple, vec: Mapping[int, object], k: int, ring: RingSpec) -> dict:
    """``vec . T_{k+1}`` in ``M^mu`` coordinates (0-based position ``k``)."""
    table = _generator_table(mu, k)
    q = ring.q
    out: dict = {}
    for a, c in vec.items():
        kind, b = table[a]
        if kind == 0:
            out[b] = out.get(b, 0) + c
        elif kind == 1:
            out[b] = out.get(b, 0) + q * c
            out[a] = out.get(a, 0) + (q - 1) * c
        else:
            out[a] = out.get(a, 0) + q * c
    norm = ring.norm
    return {a: v for a, v in ((a, norm(v)) for a, v in out.items()) if v != 0}


def perm_module_coords(mu: Sequence[int], h: HeckeElement):
    """Coordinates of ``h`` in the basis ``x_mu T_d`` or ``None`` if ``h`` is not in ``M^mu``."""
    mod = PermModule(Composition(mu), h.ring)
    vec = {}
    for k, d in enumerate(mod.labels):
        c = h.coeffs.get(d, 0)
        if c != 0:
            vec[k] = c
    if mod.to_hecke(vec) != h:
        return None
    return vec


# ---------------------------------------------------------------------------
# homomorphisms between permutation modules


@dataclass
class HomMatrix:
    """``matrix[a, b]`` is the coefficient of ``m_a`` (target) in the image of ``m_b`` (source)."""

    source: Composition
    target: Composition
    matrix: Matrix

    def commutes_with_generators(self, ring: RingSpec) -> bool:
        r = sum(self.source)
        for k in range(r - 1):
            for b in range(self.matrix.ncols):
                lhs = act_generator(tuple(self.target), self.matrix.cols[b], k, ring)
                rhs = self.matrix.apply(act_generator(tuple(self.source), {b: 1}, k, ring), ring)
                if lhs != rhs:
                    return False
        return True


def psi_image_of_x(lam: tuple, mu: tuple, d) -> dict:
    """``psi^d_{lam mu}(x_mu)`` in ``M^lam`` coordinates: the indicator of a double coset."""
    n = max(len(lam), len(mu))
    lam_p = tuple(lam) + (0,) * (n - len(lam))
    mu_p = tuple(mu) + (0,) * (n - len(mu))
    om = omega_matrix(lam_p, mu_p, d)
    return {k: 1 for k, j in enumerate(multi_indices(tuple(lam)))
            if omega_of_multi_index(j, mu_p, n) == om}


def hom_columns(lam: tuple, mu: tuple, first: Mapping[int, object], ring: RingSpec) -> list[dict]:
    """Columns of the H-linear map ``M^mu -> M^lam`` sending ``x_mu`` to ``first``.

    The column of ``m_j`` is reached from ``x_mu`` along generators that raise
    the length of the coset representative.
    """
    labels = multi_indices(mu)
    idx = index_of(mu)
    cols: list = [None] * len(labels)
    cols[0] = {a: ring.norm(c) for a, c in first.items() if ring.norm(c) != 0}
    frontier = [0]
    while frontier:
        nxt = []
        for b in frontier:
            j = labels[b]
            for k in range(len(j) - 1):
                if j[k] < j[k + 1]:
                    js = list(j)
                    js[k], js[k + 1] = j[k + 1], j[k]
                    t = idx[tuple(js)]
                    if cols[t] is None:
                        cols[t] = act_generator(lam, cols[b], k, ring)
                        nxt.append(t)
        frontier = nxt
    return cols


def psi_hom(lam: Sequence[int], mu: Sequence[int], d, ring: RingSpec) -> HomMatrix:
    """Matrix of ``psi^d_{lam mu}``, the map ``x_mu -> sum of T_w over S_lam d S_mu``."""
    lam, mu, d = Composition(lam), Composition(mu), tuple(d)
    if not is_double_coset_rep(lam, mu, d):
        raise ValueError(f"{d} is not a distinguished double coset representative")
    cols = hom_columns(tuple(lam), tuple(mu), psi_image_of_x(tuple(lam), tuple(mu), d), ring)
    return HomMatrix(mu, lam, Matrix(len(multi_indices(tuple(lam))), len(cols), cols))


def psi_image_direct(lam: Sequence[int], mu: Sequence[int], d, ring: RingSpec) -> HeckeElement:
    """``sum T_w`` over the double coset ``S_lam d S_mu``, enumerated as a set."""
    left = young_subgroup(lam)
    right = young_subgroup(mu)
    coset = {perm_mul(perm_mul(u, d), v) for u in left for v in right}
    return HeckeElement(sum(lam), ring, {w: 1 for w in coset})


# ---------------------------------------------------------------------------
# Specht modules


def row_to_column_perm(lam: Sequence[int]):
    """The permutation carrying the row-filled tableau of shape ``lam`` to the column-filled one."""
    r = sum(lam)
    row_fill = []
    k = 0
    for part in lam:
        row_fill.append(list(range(k, k + part)))
        k += part
    col_fill = [[0] * part for part in lam]
    k = 0
    for c in range(lam[0] if lam else 0):
        for row in range(len(lam)):
            if c < lam[row]:
                col_fill[row][c] = k
                k += 1
    w = [0] * r
    for rr, cc in zip(row_fill, col_fill):
        for a, b in zip(rr, cc):
            w[a] = b
    return tuple(w)


def specht_generator(lam: Sequence[int], ring: RingSpec) -> dict:
    """``z_lam = x_lam T_{w_lam} y_{lam'}`` in ``M^lam`` coordinates."""
    lam = tuple(Composition(lam))
    mod = PermModule(Composition(lam), ring)
    w = perm_inverse(row_to_column_perm(lam))
    vec = mod.act_basis({0: 1}, w)
    y = y_element(conjugate(lam), ring)
    acc: dict = {}
    for u, c in y.coeffs.items():
        for a, v in mod.act_basis(vec, u).items():
            acc[a] = acc.get(a, 0) + c * v
    return {a: x for a, x in ((a, ring.norm(x)) for a, x in acc.items()) if x != 0}


def cyclic_submodule(mu: tuple, gen: Mapping[int, object], ring: RingSpec) -> list[dict]:
    """Spanning vectors of ``gen . H`` closed under all generators."""
    r = sum(mu)
    ncols = len(multi_indices(mu))
    span = [dict(gen)]
    basis = rref_rows(span, ring, ncols) if ring.is_field else hermite_basis(span)
    while True:
        new = list(basis)
        for v in basis:
            for k in range(r - 1):
                new.append(act_generator(mu, v, k, ring))
        nb = rref_rows(new, ring, ncols) if ring.is_field else hermite_basis(new)
        if nb == basis:
            return basis
        basis = nb


def specht_basis(lam: Sequence[int], ring: RingSpec) -> list[dict]:
    """Basis of ``S^lam = z_lam H`` inside ``M^lam`` (echelon form)."""
    lam = Composition(lam)
    if not lam.is_partition():
        raise ValueError(f"{lam} is not a partition")
    return cyclic_submodule(tuple(lam), specht_generator(lam, ring), ring)


def specht_rank_ok(lam: Sequence[int], ring: RingSpec) -> bool:
    return len(specht_basis(lam, ring)) == standard_tableaux_count(lam)
