import pytest

from bmcomplex.assembly import BlockMap, SMALL_PRIMES, height, primes_for_bound, products_vanish
from bmcomplex.boltje_maisch import build_bm_complex
from bmcomplex.exact_linalg import Matrix, PackedMatrix, RingSpec
from bmcomplex.resolutions import bar_complex


@pytest.mark.parametrize("ring", [RingSpec.rationals(2), RingSpec.integers(1), RingSpec.prime_field(5, 4)], ids=str)
def test_packed_matches_exact(ring, tables):
    t = tables(4, 4, ring)
    c = build_bm_complex((2, 1, 1, 0), table=t).complex
    for k in range(1, c.top_degree() + 1):
        d = c.differential(k)
        assert isinstance(d, BlockMap)
        exact = d.matrix()
        if ring.kind == "prime_field":
            p = ring.p
            assert d.packed(p).to_matrix() == PackedMatrix.from_matrix(exact, ring, p).to_matrix()
        else:
            assert d.packed(None).to_matrix() == exact
            p = SMALL_PRIMES[0]
            assert d.packed(p).to_matrix() == PackedMatrix.from_matrix(exact, ring, p).to_matrix()


def test_products_vanish_detects_nonzero(tables):
    ring = RingSpec.rationals(2)
    bar = bar_complex((1, 1, 1), tables(3, 3, ring))
    c = bar.complex
    d1, d2 = c.differential(1), c.differential(2)
    assert products_vanish([(d1, d2)], None, height, ring)
    bad = c.matrix(2).copy()
    bad.cols[0][0] = bad.cols[0].get(0, 0) + 1
    assert not products_vanish([(d1, bad)], None, height, ring)
    # identity target: d s + s d = id holds, 2 id does not
    s0, sm1 = bar.splitting[0], bar.splitting[-1]
    pairs = [(d1, s0), (sm1, c.differential(0))]
    assert products_vanish(pairs, c.dim(0), height, ring)
    assert not products_vanish(pairs + [(Matrix.identity(c.dim(0)), Matrix.identity(c.dim(0)))], c.dim(0), height, ring)


def test_prime_budget_covers_bound():
    ring = RingSpec.rationals(2)
    ps = primes_for_bound(10**40, ring)
    prod = 1
    for p in ps:
        prod *= p
    assert prod > 2 * 10**40
