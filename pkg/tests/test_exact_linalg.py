from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.polys.matrices import DomainMatrix
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from bmcomplex import _pykernels, kernels
from bmcomplex.exact_linalg import (
    Matrix,
    PackedMatrix,
    RingSpec,
    hermite_basis,
    rank,
    smith_normal_form,
    solve,
)

QQ = RingSpec.rationals()
ZZ = RingSpec.integers()
F5 = RingSpec.prime_field(5)

small_ints = st.integers(min_value=-4, max_value=4)


def int_matrices(max_dim=6):
    return st.integers(1, max_dim).flatmap(
        lambda r: st.integers(1, max_dim).flatmap(
            lambda c: st.lists(st.lists(small_ints, min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


def sympy_invariants(rows):
    m = sympy.Matrix(rows)
    d = sympy_snf(m, domain=sympy.ZZ)
    vals = [abs(int(d[i, i])) for i in range(min(d.shape))]
    return sorted(v for v in vals if v)


def gf_rank(rows, p):
    gf = sympy.GF(p)
    dm = DomainMatrix([[gf(x) for x in row] for row in rows], (len(rows), len(rows[0])), gf)
    return dm.rank()


class TestRing:
    def test_parse(self):
        assert RingSpec.parse("q", "1/3").q_value == Fraction(1, 3)
        assert RingSpec.parse("fp:5", "2").p == 5
        assert RingSpec.parse("zz").kind == ZZ.kind
        for bad in ("fp:4", "rr"):
            with pytest.raises(ValueError):
                RingSpec.parse(bad)

    def test_q_must_be_unit(self):
        with pytest.raises(ValueError):
            RingSpec.integers(2)
        with pytest.raises(ValueError):
            RingSpec.prime_field(5, 5)

    def test_field_arithmetic(self):
        assert F5.inv(2) == 3
        assert QQ.inv(Fraction(2, 3)) == Fraction(3, 2)
        with pytest.raises(ZeroDivisionError):
            ZZ.inv(2)


class TestRank:
    def test_examples(self):
        assert rank(Matrix.identity(3), QQ) == 3
        assert rank(Matrix.zeros(3, 4), QQ) == 0
        assert rank(Matrix.from_rows([[1, 2], [2, 4]]), QQ) == 1

    @settings(max_examples=60, deadline=None)
    @given(int_matrices())
    def test_rational_rank_matches_sympy(self, rows):
        assert rank(Matrix.from_rows(rows), QQ) == sympy.Matrix(rows).rank()

    @settings(max_examples=60, deadline=None)
    @given(int_matrices())
    def test_mod_p_rank(self, rows):
        got = rank(Matrix.from_rows(rows, F5), F5)
        assert got == gf_rank(rows, 5)


class TestSolve:
    def test_examples(self):
        b = Matrix.from_rows([[1], [2]])
        assert solve(Matrix.identity(2), b, QQ) == b
        assert solve(Matrix.from_rows([[2]]), Matrix.from_rows([[1]]), QQ) == Matrix.from_rows([[Fraction(1, 2)]])
        assert solve(Matrix.from_rows([[1, 1], [1, 1]]), Matrix.from_rows([[0], [1]]), QQ) is None

    @settings(max_examples=40, deadline=None)
    @given(int_matrices(5), st.lists(small_ints, min_size=5, max_size=5))
    def test_solution_satisfies_system(self, rows, xs):
        m = Matrix.from_rows(rows)
        x0 = Matrix.from_rows([[v] for v in xs[: m.ncols]])
        b = m.matmul(x0, QQ)
        x = solve(m, b, QQ)
        assert x is not None and m.matmul(x, QQ) == b


class TestSmith:
    def test_examples(self):
        assert smith_normal_form(Matrix.from_rows([[2, 0], [0, 6]]))[0] == [2, 6]
        assert smith_normal_form(Matrix.from_rows([[2, 4], [0, 6]]))[0] == [2, 6]
        assert smith_normal_form(Matrix.zeros(2, 3)) == ([], 0)

    @settings(max_examples=80, deadline=None)
    @given(int_matrices())
    def test_matches_sympy(self, rows):
        factors, r = smith_normal_form(Matrix.from_rows(rows))
        assert factors == sympy_invariants(rows)
        assert all(b % a == 0 for a, b in zip(factors, factors[1:]))
        assert r == len(factors)

    def test_rejects_fractions(self):
        with pytest.raises(ValueError):
            smith_normal_form(Matrix.from_rows([[Fraction(1, 2)]]))


class TestHermite:
    @settings(max_examples=40, deadline=None)
    @given(int_matrices(5))
    def test_same_lattice(self, rows):
        vecs = [{j: x for j, x in enumerate(row) if x} for row in rows]
        basis = hermite_basis(vecs)
        ncols = len(rows[0])
        as_rows = [[b.get(j, 0) for j in range(ncols)] for b in basis]
        # same rank and same elementary divisors means the same lattice up to the index
        assert len(basis) == sympy.Matrix(rows).rank()
        if basis:
            assert sympy_invariants(as_rows) == sympy_invariants(rows)
            # every input vector is an integer combination of the basis
            full = sympy.Matrix(as_rows).T
            for row in rows:
                sol = full.gauss_jordan_solve(sympy.Matrix(row))[0]
                assert all(v.is_integer for v in sol.subs({s: 0 for s in sol.free_symbols}))


def _packed(rows, modulus=None, ring=QQ):
    return PackedMatrix.from_matrix(Matrix.from_rows(rows), ring, modulus)


class TestKernels:
    @settings(max_examples=60, deadline=None)
    @given(int_matrices(8))
    def test_rank_mod_p_backends_agree(self, rows):
        p = 7
        m = _packed(rows, p)
        args = (m.nrows, m.ncols, *m.arrays(), p)
        expect = gf_rank(rows, p)
        assert _pykernels.rank_mod_p(*args) == expect
        assert kernels.rank_mod_p(*args) == expect

    @settings(max_examples=60, deadline=None)
    @given(int_matrices(8))
    def test_unit_pivot_then_smith(self, rows):
        m = _packed(rows)
        expect = sympy_invariants(rows)
        for mod in (_pykernels, kernels):
            k, rest = mod.unit_pivot_reduce(m.nrows, m.ncols, *m.arrays())
            tail = smith_normal_form(Matrix(m.nrows, len(rest), rest))[0]
            assert sorted([1] * k + tail) == expect

    def test_product_is_zero(self):
        a = _packed([[1, 1], [2, 2]], 5)
        b = _packed([[1, 1], [4, 4]], 5)
        c = _packed([[1, 0], [0, 1]], 5)
        for mod in (_pykernels, kernels):
            assert mod.product_is_zero_mod_p(a.shape, *a.arrays(), b.shape, *b.arrays(), 5)
            assert not mod.product_is_zero_mod_p(a.shape, *a.arrays(), c.shape, *c.arrays(), 5)

    def test_backend_selected(self):
        assert kernels.BACKEND in ("cython", "python")


def test_pure_python_fallback_end_to_end():
    import os
    import subprocess
    import sys

    code = (
        "from bmcomplex import kernels; assert kernels.BACKEND == 'python';"
        "from bmcomplex.boltje_maisch import exactness_report;"
        "from bmcomplex.exact_linalg import RingSpec;"
        "assert exactness_report((2, 1, 1), RingSpec.integers(1))['exact'];"
        "assert exactness_report((2, 1, 1), RingSpec.prime_field(5, 4))['exact']"
    )
    env = dict(os.environ, BMCOMPLEX_PURE_PYTHON="1")
    assert subprocess.run([sys.executable, "-c", code], env=env).returncode == 0
