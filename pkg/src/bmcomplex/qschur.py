"""The q-Schur algebra ``S(n, r)`` in its basis ``psi^d_{lam mu}``.

Products are computed from the homomorphism matrices of :mod:`.hecke`:
``psi1 psi2`` is applied to ``x_nu`` and the image is split along the double
coset classes of ``M^lam``, whose indicator vectors are exactly the images
``psi^d_{lam nu}(x_nu)``.  The split is checked to be exact, so every stored
structure constant is certified.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Mapping, NamedTuple

from .combinatorics import (
    Composition,
    compositions,
    dominates,
    double_coset_reps,
    format_perm,
    is_double_coset_rep,
    multi_indices,
    omega_of_multi_index,
    pair_level,
    parse_composition,
    parse_perm,
    perm_inverse,
    upper_reps,
    _double_coset_table,
    canonical_multi_index,
    act,
)
from .exact_linalg import Matrix, RingSpec, rref_rows
from .hecke import hom_columns, index_of, psi_image_of_x

CACHE_VERSION = 2


class SchurBasisLabel(NamedTuple):
    lam: Composition
    mu: Composition
    d: tuple

    def __str__(self):
        return f"{self.lam}|{self.mu}|{format_perm(self.d)}"

    @property
    def level(self):
        return label_level(self)

    def is_idempotent(self) -> bool:
        return self.lam == self.mu and self.d == tuple(range(len(self.d)))


def make_label(lam, mu, d) -> SchurBasisLabel:
    lam, mu, d = Composition(lam), Composition(mu), tuple(d)
    if not is_double_coset_rep(lam, mu, d):
        raise ValueError(f"{format_perm(d)} is not in D_({lam}),({mu})")
    return SchurBasisLabel(lam, mu, d)


def parse_label(text: str) -> SchurBasisLabel:
    lam, mu, d = text.split("|")
    return make_label(parse_composition(lam), parse_composition(mu), parse_perm(d))


def idempotent(lam) -> SchurBasisLabel:
    lam = Composition(lam)
    return SchurBasisLabel(lam, lam, tuple(range(lam.r)))


@lru_cache(maxsize=None)
def _upper_set(lam: tuple, mu: tuple) -> frozenset:
    return frozenset(upper_reps(lam, mu))


def label_level(label: SchurBasisLabel):
    """Level of the weight matrix of the label, ``None`` if it is not upper triangular."""
    if label.d in _upper_set(tuple(label.lam), tuple(label.mu)):
        return pair_level(label.lam, label.mu)
    return None


def labels_between(lam, mu) -> list[SchurBasisLabel]:
    lam, mu = Composition(lam), Composition(mu)
    return [SchurBasisLabel(lam, mu, d) for d in double_coset_reps(lam, mu)]


def all_labels(n: int, r: int) -> list[SchurBasisLabel]:
    comps = compositions(n, r)
    return [lab for lam in comps for mu in comps for lab in labels_between(lam, mu)]


def schur_dimension(n: int, r: int) -> int:
    """``sum |D_{lam mu}|`` over pairs of compositions; equals ``C(n^2 + r - 1, r)``."""
    comps = compositions(n, r)
    total = sum(len(double_coset_reps(a, b)) for a in comps for b in comps)
    if total != comb(n * n + r - 1, r):
        raise AssertionError("double coset count disagrees with the closed formula")
    return total


def weight_truncate(nu, m: int, mu) -> list[SchurBasisLabel]:
    """Labels ``psi^d_{nu mu}`` with ``d`` of level at least ``m``."""
    nu, mu = Composition(nu), Composition(mu)
    reps = upper_reps(tuple(nu), tuple(mu))
    if not reps or pair_level(nu, mu) < m:
        return []
    return [SchurBasisLabel(nu, mu, d) for d in reps]


def ideal_basis(n: int, r: int, m: int) -> list[SchurBasisLabel]:
    """Basis of ``J_m``; ``m = 0`` is the Borel subalgebra."""
    if m < 0:
        raise ValueError("level must be non-negative")
    comps = compositions(n, r)
    return [lab for lam in comps for mu in comps for lab in weight_truncate(lam, m, mu)]


@lru_cache(maxsize=None)
def _class_data(lam: tuple, nu: tuple):
    """Split ``M^lam`` into the double coset classes of ``(lam, nu)``.

    Returns ``(reps, rep_index, class_of)``: the representatives ``d``, the basis
    index of ``x_lam T_d`` and the class number of every basis index.
    """
    n = len(lam)
    table = _double_coset_table(lam, nu)
    by_omega = {om: c for c, (_, om) in enumerate(table)}
    idx = index_of(lam)
    reps = tuple(d for d, _ in table)
    rep_index = tuple(idx[act(canonical_multi_index(lam), d)] for d in reps)
    class_of = tuple(by_omega[omega_of_multi_index(j, nu, n)] for j in multi_indices(lam))
    return reps, rep_index, class_of


class StructureConstantTable:
    """Cached products of basis elements of ``S(n, r)`` over a fixed ring."""

    def __init__(self, n: int, r: int, ring: RingSpec):
        self.n = n
        self.r = r
        self.ring = ring
        self._psi: dict = {}
        self._rows: dict = {}
        self._products: dict = {}

    # -- homomorphism matrices ---------------------------------------------
    def psi(self, label: SchurBasisLabel) -> list[dict]:
        """Columns of ``psi`` in ``M^lam`` coordinates, one per basis element of ``M^mu``."""
        cols = self._psi.get(label)
        if cols is None:
            lam, mu = tuple(label.lam), tuple(label.mu)
            cols = hom_columns(lam, mu, psi_image_of_x(lam, mu, label.d), self.ring)
            self._psi[label] = cols
        return cols

    def psi_matrix(self, label: SchurBasisLabel) -> Matrix:
        cols = self.psi(label)
        return Matrix(len(multi_indices(tuple(label.lam))), len(cols), cols)

    def psi_rows(self, label: SchurBasisLabel) -> list[dict]:
        """Rows of ``psi``: entry ``b`` of row ``a`` is the ``m_a`` coefficient of ``psi(m_b)``."""
        rows = self._rows.get(label)
        if rows is None:
            rows = [dict() for _ in multi_indices(tuple(label.lam))]
            for b, col in enumerate(self.psi(label)):
                for a, x in col.items():
                    rows[a][b] = x
            self._rows[label] = rows
        return rows

    # -- products ---------------------------------------------------------------
    def compose(self, a: SchurBasisLabel, b: SchurBasisLabel) -> dict:
        """``a b`` (apply ``b`` first) as a map label -> coefficient."""
        if a.mu != b.lam:
            return {}
        key = (a, b)
        out = self._products.get(key)
        if out is None:
            out = self._compose(a, b)
            self._products[key] = out
        return out

    def _compose(self, a: SchurBasisLabel, b: SchurBasisLabel) -> dict:
        ring = self.ring
        norm = ring.norm
        lam, nu = tuple(a.lam), tuple(b.mu)
        acols = self.psi(a)
        image: dict = {}
        for k, c in self.psi(b)[0].items():
            for i, x in acols[k].items():
                image[i] = image.get(i, 0) + c * x
        image = {i: v for i, v in ((i, norm(v)) for i, v in image.items()) if v != 0}
        reps, rep_index, class_of = _class_data(lam, nu)
        coeff = [image.get(i, 0) for i in rep_index]
        for i, c in enumerate(class_of):
            if image.get(i, 0) != coeff[c]:
                raise ArithmeticError(f"product {a} * {b} is not a combination of basis maps")
        return {SchurBasisLabel(a.lam, b.mu, reps[c]): x for c, x in enumerate(coeff) if x != 0}

    def multiply(self, x: Mapping, y: Mapping) -> dict:
        norm = self.ring.norm
        acc: dict = {}
        for la, ca in x.items():
            for lb, cb in y.items():
                if la.mu != lb.lam:
                    continue
                for lab, c in self.compose(la, lb).items():
                    acc[lab] = acc.get(lab, 0) + ca * cb * c
        return {k: v for k, v in ((k, norm(v)) for k, v in acc.items()) if v != 0}

    def element(self, coeffs: Mapping | None = None) -> "SchurElement":
        return SchurElement(self, coeffs or {})

    def unit(self) -> "SchurElement":
        return SchurElement(self, {idempotent(lam): 1 for lam in compositions(self.n, self.r)})

    def fill(self, labels_a: Iterable[SchurBasisLabel], labels_b: Iterable[SchurBasisLabel]) -> None:
        labels_b = list(labels_b)
        for a in labels_a:
            for b in labels_b:
                self.compose(a, b)

    # -- persistence ---------------------------------------------------------
    def header(self) -> dict:
        return {"version": CACHE_VERSION, "n": self.n, "r": self.r, "ring": self.ring.describe()}

    def to_json(self) -> dict:
        products = {}
        for (a, b), out in sorted(self._products.items(), key=lambda kv: (str(kv[0][0]), str(kv[0][1]))):
            products[f"{a} ⊗ {b}"] = [[str(lab), str(c)] for lab, c in sorted(out.items(), key=lambda kv: str(kv[0]))]
        header = dict(self.header(), checksum=_checksum(products))
        return {"header": header, "products": products}

    def load_json(self, data: dict) -> int:
        """Merge products from ``to_json`` output.

        Raises ``ValueError`` on a header or checksum mismatch or a malformed
        entry; nothing is merged in that case.
        """
        header = dict(data.get("header") or {})
        checksum = header.pop("checksum", None)
        if header != self.header():
            raise ValueError("cache header does not match this table")
        products = data["products"]
        if checksum != _checksum(products):
            raise ValueError("cache checksum mismatch")
        loaded = {}
        for key, entries in products.items():
            left, right = key.split(" ⊗ ")
            a, b = parse_label(left), parse_label(right)
            if a.mu != b.lam:
                raise ValueError(f"bad cache key {key!r}")
            out = {}
            for lab, c in entries:
                lab = parse_label(lab)
                if lab.lam != a.lam or lab.mu != b.mu:
                    raise ValueError(f"bad cache entry under {key!r}")
                out[lab] = self.ring.elem(Fraction(c))
            loaded[(a, b)] = out
        self._products.update(loaded)
        return len(loaded)

    def __len__(self):
        return len(self._products)


def _checksum(products: dict) -> str:
    text = json.dumps(products, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class SchurElement:
    """Element of ``S(n, r)`` as a sparse map label -> coefficient."""

    __slots__ = ("table", "coeffs")

    def __init__(self, table: StructureConstantTable, coeffs: Mapping):
        self.table = table
        norm = table.ring.norm
        self.coeffs = {k: norm(v) for k, v in coeffs.items() if norm(v) != 0}

    @property
    def ring(self):
        return self.table.ring

    def __add__(self, other):
        acc = dict(self.coeffs)
        for k, v in other.coeffs.items():
            acc[k] = acc.get(k, 0) + v
        return SchurElement(self.table, acc)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return SchurElement(self.table, {k: c * v for k, v in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, SchurElement):
            return SchurElement(self.table, self.table.multiply(self.coeffs, other.coeffs))
        return self.scale(other)

    def __eq__(self, other):
        return isinstance(other, SchurElement) and self.coeffs == other.coeffs

    def is_zero(self) -> bool:
        return not self.coeffs

    def __repr__(self):
        terms = " + ".join(f"{c}*psi[{k}]" for k, c in sorted(self.coeffs.items(), key=lambda kv: str(kv[0])))
        return f"SchurElement({terms or '0'})"


def xi_label(label: SchurBasisLabel) -> SchurBasisLabel:
    dinv = perm_inverse(label.d)
    if not is_double_coset_rep(label.mu, label.lam, dinv):
        raise AssertionError("inverse of a distinguished representative is not distinguished")
    return SchurBasisLabel(label.mu, label.lam, dinv)


def xi(el: SchurElement) -> SchurElement:
    """The anti-automorphism ``psi^d_{lam mu} -> psi^{d^-1}_{mu lam}``."""
    return SchurElement(el.table, {xi_label(k): v for k, v in el.coeffs.items()})


def longest_chain_length(n: int, r: int) -> int:
    """Number of strict steps in the longest dominance chain of ``Lambda(n, r)``."""
    comps = compositions(n, r)

    @lru_cache(maxsize=None)
    def longest(c):
        return max((1 + longest(o) for o in comps if o != c and dominates(c, o)), default=0)

    return max(longest(c) for c in comps)


def radical_nilpotency(n: int, r: int, table: StructureConstantTable) -> int:
    """Smallest ``N`` with ``J_1^N = 0``."""
    ring = table.ring
    if not ring.is_field:
        raise ValueError("nilpotency degree is computed over a field")
    basis = ideal_basis(n, r, 1)
    if not basis:
        return 1
    order = {lab: k for k, lab in enumerate(all_labels(n, r))}
    rev = {k: lab for lab, k in order.items()}

    def span(elements):
        vecs = [{order[k]: v for k, v in el.items()} for el in elements]
        return [{rev[k]: v for k, v in row.items()} for row in rref_rows(vecs, ring, len(order))]

    j1 = [{lab: 1} for lab in basis]
    power = span(j1)
    degree = 1
    while power:
        power = span([table.multiply(x, y) for x in power for y in j1])
        degree += 1
    return degree


def borel_basis(n: int, r: int) -> list[SchurBasisLabel]:
    return ideal_basis(n, r, 0)


def triangularity_violations(table: StructureConstantTable, limit: int = 10) -> list[tuple]:
    """Products ``a b`` of Borel basis elements with support below level ``level(a) + level(b)``.

    A label of level ``m`` lies in every ``J_k`` with ``k <= m``, so checking
    against the exact levels covers all pairs ``J_m x J_m'``.  Products leaving
    the Borel subalgebra are reported too.
    """
    basis = borel_basis(table.n, table.r)
    by_left: dict = {}
    for b in basis:
        by_left.setdefault(b.lam, []).append(b)
    bad = []
    for a in basis:
        la = a.level
        for b in by_left.get(a.mu, ()):
            need = la + b.level
            for lab in table.compose(a, b):
                lv = lab.level
                if lv is None or lv < need:
                    bad.append((a, b, lab))
                    if len(bad) >= limit:
                        return bad
    return bad


def split_basis_ok(n: int, r: int, table: StructureConstantTable) -> bool:
    """``S+ = R_Lambda (+) J_1`` on stored bases, and the idempotents multiply like ``R_Lambda``."""
    borel = set(borel_basis(n, r))
    j1 = set(ideal_basis(n, r, 1))
    idem = {idempotent(lam) for lam in compositions(n, r)}
    if idem & j1 or (idem | j1) != borel:
        return False
    for a in idem:
        for b in idem:
            prod = table.compose(a, b)
            want = {a: table.ring.one} if a == b else {}
            if prod != want:
                return False
    return True
