import itertools
import json
from fractions import Fraction
from math import comb

import pytest

from bmcomplex.combinatorics import identity
from bmcomplex.exact_linalg import Matrix, RingSpec
from bmcomplex.qschur import (
    StructureConstantTable,
    all_labels,
    ideal_basis,
    idempotent,
    longest_chain_length,
    make_label,
    parse_label,
    radical_nilpotency,
    schur_dimension,
    split_basis_ok,
    triangularity_violations,
    weight_truncate,
    xi,
    xi_label,
)

QQ2 = RingSpec.rationals(2)


def L(lam, mu, d=None):
    d = d if d is not None else identity(sum(lam))
    return make_label(lam, mu, d)


class TestCompose:
    def test_examples(self, tables):
        t = tables(2, 2, QQ2)
        a = L((2, 0), (1, 1))
        b = L((1, 1), (0, 2))
        assert t.compose(a, b) == {L((2, 0), (0, 2)): 1 + QQ2.q}
        assert t.compose(idempotent((2, 0)), a) == {a: 1}
        assert t.compose(a, L((2, 0), (0, 2))) == {}

    @pytest.mark.parametrize("ring", [RingSpec.rationals(2), RingSpec.prime_field(5, 4), RingSpec.integers(1)], ids=str)
    def test_matches_matrix_product(self, ring, tables):
        """Structure constants reproduce the product of the homomorphism matrices."""
        t = tables(3, 3, ring)
        labels = all_labels(3, 3)
        for a in labels:
            pa = t.psi_matrix(a)
            for b in labels:
                if a.mu != b.lam:
                    continue
                want = pa.matmul(t.psi_matrix(b), ring)
                got = Matrix.zeros(want.nrows, want.ncols)
                for lab, c in t.compose(a, b).items():
                    got = got.add(t.psi_matrix(lab), ring, c)
                assert got == want, (a, b)

    def test_associative(self, tables):
        t = tables(2, 3, QQ2)
        labels = all_labels(2, 3)
        for a, b, c in itertools.product(labels, repeat=3):
            if a.mu != b.lam or b.mu != c.lam:
                continue
            x = t.element({a: 1}) * t.element({b: 1})
            assert x * t.element({c: 1}) == t.element({a: 1}) * (t.element({b: 1}) * t.element({c: 1}))

    def test_unit(self, tables):
        t = tables(2, 2, QQ2)
        one = t.unit()
        for lab in all_labels(2, 2):
            e = t.element({lab: 3})
            assert one * e == e and e * one == e


class TestDimensions:
    def test_examples(self):
        assert schur_dimension(2, 2) == 10
        assert schur_dimension(1, 5) == 1
        assert schur_dimension(3, 2) == 45

    @pytest.mark.parametrize("n,r", [(n, r) for n in range(1, 5) for r in range(1, 5)])
    def test_closed_form(self, n, r):
        assert schur_dimension(n, r) == comb(n * n + r - 1, r)
        assert len(all_labels(n, r)) == comb(n * n + r - 1, r)


class TestIdeals:
    def test_examples(self):
        assert len(ideal_basis(2, 2, 0)) == 6
        assert set(ideal_basis(2, 2, 1)) == {L((2, 0), (1, 1)), L((1, 1), (0, 2)), L((2, 0), (0, 2))}
        assert ideal_basis(2, 2, 2) == [L((2, 0), (0, 2))]
        assert weight_truncate((2, 0), 1, (1, 1)) == [L((2, 0), (1, 1))]
        assert weight_truncate((1, 1), 1, (2, 0)) == []
        assert weight_truncate((1, 1), 0, (2, 0)) == []
        assert weight_truncate((1, 1), 1, (1, 1)) == []
        with pytest.raises(ValueError):
            ideal_basis(2, 2, -1)

    def test_nested(self):
        for m in range(4):
            assert set(ideal_basis(3, 3, m + 1)) <= set(ideal_basis(3, 3, m))

    def test_triangularity_small(self, tables):
        assert triangularity_violations(tables(2, 3, QQ2)) == []


class TestXi:
    def test_examples(self):
        assert xi_label(idempotent((2, 1))) == idempotent((2, 1))
        assert xi_label(L((2, 0), (1, 1))) == L((1, 1), (2, 0))

    def test_anti_automorphism(self, tables):
        t = tables(3, 3, QQ2)
        labels = all_labels(3, 3)
        for a in labels:
            assert xi_label(xi_label(a)) == a
        for a in labels:
            for b in labels:
                if a.mu != b.lam:
                    continue
                ab = t.element({a: 1}) * t.element({b: 1})
                assert xi(ab) == xi(t.element({b: 1})) * xi(t.element({a: 1}))


class TestRadical:
    def test_examples(self, tables):
        assert radical_nilpotency(2, 2, tables(2, 2, QQ2)) == 3
        assert radical_nilpotency(1, 3, tables(1, 3, QQ2)) == 1

    def test_integers_rejected(self, tables):
        with pytest.raises(ValueError):
            radical_nilpotency(2, 2, tables(2, 2, RingSpec.integers()))

    def test_powers_land_in_ideals(self, tables):
        t = tables(3, 3, QQ2)
        j1 = ideal_basis(3, 3, 1)
        elems = [{lab: 1} for lab in j1]
        for k in range(2, 5):
            allowed = set(ideal_basis(3, 3, k))
            elems = [t.multiply(x, {y: 1}) for x in elems for y in j1]
            for e in elems:
                assert set(e) <= allowed

    def test_split_basis(self, tables):
        assert split_basis_ok(3, 3, tables(3, 3, QQ2))
        assert longest_chain_length(2, 2) == 2


class TestLabels:
    def test_parse_round_trip(self):
        for lab in all_labels(3, 3):
            assert parse_label(str(lab)) == lab

    def test_bad_label(self):
        with pytest.raises(ValueError):
            make_label((2, 0), (1, 1), (1, 0))


class TestPersistence:
    @pytest.mark.parametrize("ring", [RingSpec.rationals(Fraction(1, 3)), RingSpec.prime_field(3, 2), RingSpec.integers(1)], ids=str)
    def test_round_trip_r3(self, ring):
        t = StructureConstantTable(3, 3, ring)
        labels = all_labels(3, 3)
        t.fill(labels, labels)
        data = json.loads(json.dumps(t.to_json()))
        u = StructureConstantTable(3, 3, ring)
        assert u.load_json(data) == len(t)
        fresh = StructureConstantTable(3, 3, ring)
        for a in labels:
            for b in labels:
                assert u.compose(a, b) == t.compose(a, b) == fresh.compose(a, b)

    def test_header_mismatch(self):
        t = StructureConstantTable(2, 2, QQ2)
        t.compose(L((2, 0), (1, 1)), L((1, 1), (0, 2)))
        data = t.to_json()
        with pytest.raises(ValueError):
            StructureConstantTable(2, 2, RingSpec.rationals(3)).load_json(data)
        data["header"]["version"] = 999
        with pytest.raises(ValueError):
            StructureConstantTable(2, 2, QQ2).load_json(data)
