"""Time the compiled kernels against the pure Python ones on real differentials.

    python3 benchmarks/bench_kernels.py [--lambda 2,1,1] [--repeat 3]

Both backends must agree on every result; a mismatch aborts the run.
"""

import argparse
import time

from bmcomplex import _pykernels
from bmcomplex.boltje_maisch import build_bm_complex
from bmcomplex.combinatorics import parse_composition
from bmcomplex.exact_linalg import RingSpec
from bmcomplex.qschur import StructureConstantTable

try:
    from bmcomplex import _ckernels
except ImportError:
    _ckernels = None

P = 1_000_003


def _best(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--lambda", dest="lam", default="2,1,1")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if _ckernels is None:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation`")

    lam = parse_composition(args.lam)
    r = sum(lam)
    ring = RingSpec.integers(1)
    table = StructureConstantTable(r, r, ring)
    cx = build_bm_complex(lam, table=table).complex
    print(f"lambda={tuple(lam)} dims={cx.dims()}")
    print(f"{'kernel':<20}{'deg':>4}{'shape':>16}{'nnz':>9}{'python s':>11}{'cython s':>11}{'speedup':>9}")
    for k in range(1, cx.top_degree() + 1):
        m = cx.differential(k).packed(None)
        nr, nc = m.shape
        ip, ix, dt = m.arrays()
        dp = dt % P
        cases = [
            ("rank_mod_p", lambda mod: mod.rank_mod_p(nr, nc, ip, ix, dp, P)),
            ("unit_pivot_reduce", lambda mod: mod.unit_pivot_reduce(nr, nc, ip, ix, dt)[0]),
        ]
        for name, call in cases:
            tp, rp = _best(lambda: call(_pykernels), args.repeat)
            tc, rc = _best(lambda: call(_ckernels), args.repeat)
            if rp != rc:
                raise SystemExit(f"backends disagree on {name} degree {k}: {rp} != {rc}")
            print(f"{name:<20}{k:>4}{f'{nr}x{nc}':>16}{m.nnz():>9}{tp:>11.4f}{tc:>11.4f}{tp / max(tc, 1e-9):>8.1f}x")


if __name__ == "__main__":
    main()
