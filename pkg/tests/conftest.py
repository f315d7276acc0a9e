from fractions import Fraction

import pytest

from bmcomplex.exact_linalg import RingSpec
from bmcomplex.qschur import StructureConstantTable

QQ2 = RingSpec.rationals(2)


@pytest.fixture(scope="session")
def tables():
    """Shared structure-constant tables keyed by (n, r, ring)."""
    store = {}

    def get(n, r, ring):
        key = (n, r, ring)
        if key not in store:
            store[key] = StructureConstantTable(n, r, ring)
        return store[key]

    return get


def field_rings():
    return [
        RingSpec.rationals(1),
        RingSpec.rationals(2),
        RingSpec.rationals(Fraction(1, 3)),
        RingSpec.prime_field(3, 2),
        RingSpec.prime_field(5, 2),
        RingSpec.prime_field(5, 4),
    ]



def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for num in sorted(results):
            terminalreporter.write_line(results[num])
