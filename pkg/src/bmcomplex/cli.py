"""Command-line driver: ``bmcomplex enumerate|build|check|cache``.

Every run writes one JSON report (to ``--out`` or stdout).  Exit status is 0
when all requested checks pass, 1 when a check fails and 2 on bad usage.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from math import comb

from . import __version__
from .boltje_maisch import (
    POOLS,
    ChainIsoError,
    build_bm_complex,
    chain_iso_check,
    pool_weights,
    schur_functor_image,
)
from .combinatorics import (
    Composition,
    compositions,
    min_coset_reps,
    parse_composition,
    partitions,
    standard_tableaux_count,
)
from .exact_linalg import RingSpec
from .qschur import (
    StructureConstantTable,
    borel_basis,
    longest_chain_length,
    radical_nilpotency,
    schur_dimension,
    split_basis_ok,
    triangularity_violations,
)
from .resolutions import bar_complex, compute_homology, splitting_check, validate

log = logging.getLogger("bmcomplex")

CHECKS = ("dims", "d2", "exactness", "splitting", "triangularity", "chain-iso")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# configuration


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, help="number of parts of the compositions")
    common.add_argument("--r", type=int, help="degree (size of the compositions)")
    common.add_argument("--lambda", dest="lam", help="comma-separated parts, e.g. 2,1,0")
    common.add_argument("--ring", default="q", help="q (rationals), zz (integers) or fp:<p>")
    common.add_argument("--q", default="1", help="the parameter q, an integer or num/den")
    common.add_argument("--pool", default="compositions", choices=POOLS)
    common.add_argument("--cache", help="directory holding structure-constant caches")
    common.add_argument("--out", help="report file (default: stdout)")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--timing", action="store_true", help="record wall-clock time in the report")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="bmcomplex", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("enumerate", parents=[common], help="list weights and dimensions")
    sub.add_parser("build", parents=[common], help="build the complex and report its ranks")
    chk = sub.add_parser("check", parents=[common], help="run checks")
    chk.add_argument("targets", nargs="+", choices=CHECKS + ("all",))
    cache = sub.add_parser("cache", parents=[common], help="structure-constant cache")
    cache.add_argument("action", choices=["warm"])
    return p


def _config(args) -> dict:
    if args.jobs < 1:
        raise UsageError("--jobs must be positive")
    try:
        ring = RingSpec.parse(args.ring, args.q)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad ring: {exc}") from None
    lam = None
    if args.lam:
        try:
            lam = parse_composition(args.lam)
        except ValueError as exc:
            raise UsageError(f"bad --lambda: {exc}") from None
    n, r = args.n, args.r
    if lam is not None:
        r = sum(lam) if r is None else r
        n = len(lam) if n is None else n
        if sum(lam) != r:
            raise UsageError(f"--lambda {args.lam} does not sum to r={r}")
        if len(lam) > n:
            if any(lam[n:]):
                raise UsageError(f"--lambda {args.lam} has more than n={n} nonzero parts")
            lam = Composition(lam[:n])
        lam = Composition(tuple(lam) + (0,) * (n - len(lam)))
    if r is None:
        raise UsageError("--r (or --lambda) is required")
    if n is None:
        n = r
    if n < 1 or r < 0:
        raise UsageError("need n >= 1 and r >= 0")
    return {"n": n, "r": r, "lambda": lam, "ring": ring, "pool": args.pool, "cache": args.cache}


def _config_json(cfg: dict, extra: dict | None = None) -> dict:
    out = {
        "n": cfg["n"],
        "r": cfg["r"],
        "lambda": None if cfg["lambda"] is None else ",".join(map(str, cfg["lambda"])),
        "ring": cfg["ring"].describe(),
        "pool": cfg["pool"],
    }
    out.update(extra or {})
    return out


# ---------------------------------------------------------------------------
# cache


def cache_path(cache_dir: str, n: int, r: int, ring: RingSpec) -> str:
    return os.path.join(cache_dir, f"sc_n{n}_r{r}_{ring.tag}.json")


def load_table(n: int, r: int, ring: RingSpec, cache_dir: str | None) -> StructureConstantTable:
    """A table pre-filled from the cache when the cache is present and valid."""
    table = StructureConstantTable(n, r, ring)
    if cache_dir:
        path = cache_path(cache_dir, n, r, ring)
        try:
            with open(path, encoding="utf-8") as fh:
                count = table.load_json(json.load(fh))
            log.info("loaded %d products from %s", count, path)
        except FileNotFoundError:
            pass
        except (ValueError, KeyError, TypeError, AttributeError) as exc:
            # corrupt or stale: start over
            log.warning("ignoring cache %s: %s", path, exc)
            table = StructureConstantTable(n, r, ring)
    return table


def save_table(table: StructureConstantTable, cache_dir: str) -> str:
    os.makedirs(cache_dir, exist_ok=True)
    path = cache_path(cache_dir, table.n, table.r, table.ring)
    fd, tmp = tempfile.mkstemp(dir=cache_dir, suffix=".tmp")
    with os.fdopen(fd, "w", encoding="utf-8") as fh:
        json.dump(table.to_json(), fh, ensure_ascii=False, sort_keys=True)
    os.replace(tmp, path)
    return path


def warm(table: StructureConstantTable) -> int:
    """Every product of two Borel basis elements."""
    basis = borel_basis(table.n, table.r)
    by_left: dict = {}
    for b in basis:
        by_left.setdefault(b.lam, []).append(b)
    for a in basis:
        for b in by_left.get(a.mu, ()):
            table.compose(a, b)
    return len(table)


# ---------------------------------------------------------------------------
# jobs


def _ok(passed: bool, **detail) -> dict:
    out = {"status": "pass" if passed else "fail"}
    out.update(detail)
    return out


def _homology_json(h) -> dict:
    out = {}
    for k in sorted(h.ranks):
        if h.torsion[k]:
            out[str(k)] = {"rank": h.ranks[k], "torsion": h.torsion[k]}
        else:
            out[str(k)] = h.ranks[k]
    return out


def _dims_json(c, low: int = -1) -> dict:
    return {str(k): v for k, v in sorted(c.dims().items()) if k >= low}


_TABLE: StructureConstantTable | None = None


def _table_for(cfg: dict) -> StructureConstantTable:
    global _TABLE
    t = _TABLE
    if t is None or (t.n, t.r, t.ring) != (cfg["n"], cfg["r"], cfg["ring"]):
        t = _TABLE = load_table(cfg["n"], cfg["r"], cfg["ring"], cfg["cache"])
    return t


def _lambda_job(cfg: dict, lam: Composition, targets: tuple) -> dict:
    """All per-weight checks for one ``lam``; returns a JSON-ready dict."""
    table = _table_for(cfg)
    pool = cfg["pool"]
    out: dict = {"checks": {}}
    checks = out["checks"]
    is_part = lam.is_partition()
    bm = None
    if is_part and any(t in targets for t in ("dims", "d2", "exactness", "chain-iso")) or "build" in targets:
        if not is_part:
            raise UsageError(f"{tuple(lam)} is not a partition")
        bm = build_bm_complex(lam, pool, table=table)
        c = bm.complex
        out["dims"] = _dims_json(c)
        out["top_degree"] = c.top_degree()
    if bm is not None and "dims" in targets:
        c = bm.complex
        syt = standard_tableaux_count([x for x in lam if x])
        m0 = len(min_coset_reps(tuple(lam)))
        euler = c.euler_characteristic()
        checks["dims"] = _ok(c.dim(-1) == syt and c.dim(0) == m0 and euler == 0,
                             specht_rank=c.dim(-1), syt=syt, degree0=c.dim(0), cosets=m0, euler=euler)
    if bm is not None and ("d2" in targets or "exactness" in targets):
        d2 = validate(bm.complex)
        out["d2_zero"] = d2
        if "d2" in targets:
            checks["d2"] = _ok(d2)
        if "exactness" in targets:
            h = compute_homology(bm.complex, d2)
            out["homology"] = _homology_json(h)
            checks["exactness"] = _ok(h.is_zero(), method=h.method)
    if "splitting" in targets:
        weights = pool_weights(cfg["n"], cfg["r"], pool)
        bar = bar_complex(lam, table, weights if lam in weights else None)
        d2 = validate(bar.complex)
        split = splitting_check(bar)
        h = compute_homology(bar.complex, d2)
        out["bar"] = {"dims": _dims_json(bar.complex), "d2_zero": d2, "homology": _homology_json(h)}
        checks["splitting"] = _ok(d2 and split and h.is_zero(), d2_zero=d2, identities=split, exact=h.is_zero())
    if "chain-iso" in targets and is_part:
        if cfg["n"] < cfg["r"]:
            raise UsageError("chain-iso needs n >= r")
        bar = bar_complex(lam, table, bm.pool)
        sf = schur_functor_image(bar, table)
        try:
            iso = chain_iso_check(bm, sf, table)
            checks["chain-iso"] = _ok(iso, dims=_dims_json(sf, 0))
        except ChainIsoError as exc:
            checks["chain-iso"] = _ok(False, error=str(exc))
    return out


def _run_job(args):
    cfg, lam, targets = args
    return _lambda_job(cfg, lam, targets)


def _run_jobs(cfg: dict, lams: list, targets: tuple, jobs: int) -> list:
    work = [(cfg, lam, targets) for lam in lams]
    if jobs == 1 or len(work) <= 1:
        return [_run_job(w) for w in work]
    with ProcessPoolExecutor(max_workers=min(jobs, len(work))) as ex:
        return list(ex.map(_run_job, work))


def _global_checks(cfg: dict, targets: tuple) -> dict:
    checks = {}
    if "triangularity" in targets:
        table = _table_for(cfg)
        bad = triangularity_violations(table)
        detail = {"violations": [" ; ".join(map(str, b)) for b in bad]}
        if cfg["ring"].is_field:
            n, r = cfg["n"], cfg["r"]
            nil = radical_nilpotency(n, r, table)
            bound = 1 + longest_chain_length(n, r)
            detail.update(nilpotency=nil, bound=bound, split_basis=split_basis_ok(n, r, table))
            passed = not bad and nil <= bound and detail["split_basis"]
        else:
            passed = not bad
        checks["triangularity"] = _ok(passed, **detail)
    return checks


def _weights_for(cfg: dict, targets: tuple) -> list:
    if cfg["lambda"] is not None:
        return [cfg["lambda"]]
    per_weight = [t for t in targets if t not in ("triangularity",)]
    if not per_weight:
        return []
    if "splitting" in per_weight:
        return list(compositions(cfg["n"], cfg["r"]))
    return list(partitions(cfg["n"], cfg["r"]))


# ---------------------------------------------------------------------------
# commands


def cmd_enumerate(cfg: dict) -> tuple[dict, int]:
    n, r = cfg["n"], cfg["r"]
    comps = compositions(n, r)
    parts = partitions(n, r)
    report = {
        "compositions": [",".join(map(str, c)) for c in comps],
        "partitions": [",".join(map(str, c)) for c in parts],
        "counts": {"compositions": len(comps), "partitions": len(parts), "expected": comb(n + r - 1, n - 1)},
        "schur_dimension": schur_dimension(n, r),
        "borel_dimension": len(borel_basis(n, r)),
        "longest_chain": longest_chain_length(n, r),
    }
    return report, 0 if len(comps) == comb(n + r - 1, n - 1) else 1


def cmd_build(cfg: dict, jobs: int) -> tuple[dict, int]:
    lams = [cfg["lambda"]] if cfg["lambda"] is not None else list(partitions(cfg["n"], cfg["r"]))
    for lam in lams:
        if not lam.is_partition():
            raise UsageError(f"{tuple(lam)} is not a partition")
    results = _run_jobs(cfg, lams, ("build", "dims"), jobs)
    report = {"dims": {}, "checks": {}}
    for lam, res in zip(lams, results):
        key = ",".join(map(str, lam))
        report["dims"][key] = res["dims"]
        report["checks"][f"dims[{key}]"] = res["checks"]["dims"]
    status = 0 if all(c["status"] == "pass" for c in report["checks"].values()) else 1
    return report, status


def cmd_check(cfg: dict, targets: tuple, jobs: int) -> tuple[dict, int]:
    if "all" in targets:
        targets = CHECKS
    if "chain-iso" in targets and cfg["n"] < cfg["r"]:
        raise UsageError("chain-iso needs n >= r")
    lams = _weights_for(cfg, targets)
    if cfg["lambda"] is not None:
        lam = cfg["lambda"]
        if not lam.is_partition() and any(t in targets for t in ("dims", "d2", "exactness", "chain-iso")):
            raise UsageError(f"{tuple(lam)} is not a partition")
    results = _run_jobs(cfg, lams, targets, jobs)
    report: dict = {"dims": {}, "d2_zero": None, "homology": {}, "checks": {}}
    d2_all = []
    for lam, res in zip(lams, results):
        key = ",".join(map(str, lam))
        if "dims" in res:
            report["dims"][key] = res["dims"]
        if "d2_zero" in res:
            d2_all.append(res["d2_zero"])
        if "homology" in res:
            report["homology"][key] = res["homology"]
        if "bar" in res:
            report.setdefault("bar", {})[key] = res["bar"]
        for name, verdict in res["checks"].items():
            report["checks"][f"{name}[{key}]"] = verdict
    report["d2_zero"] = all(d2_all) if d2_all else None
    report["checks"].update(_global_checks(cfg, targets))
    status = 0 if all(c["status"] == "pass" for c in report["checks"].values()) else 1
    return report, status


def cmd_cache(cfg: dict) -> tuple[dict, int]:
    if not cfg["cache"]:
        raise UsageError("cache warm needs --cache")
    table = load_table(cfg["n"], cfg["r"], cfg["ring"], cfg["cache"])
    before = len(table)
    count = warm(table)
    path = save_table(table, cfg["cache"])
    return {"cache": {"file": os.path.basename(path), "products": count, "new": count - before}}, 0


def _emit(report: dict, out: str | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    t0 = time.perf_counter()
    try:
        cfg = _config(args)
        if args.command == "enumerate":
            body, status = cmd_enumerate(cfg)
            extra = {}
        elif args.command == "build":
            body, status = cmd_build(cfg, args.jobs)
            extra = {}
        elif args.command == "check":
            targets = tuple(dict.fromkeys(args.targets))
            body, status = cmd_check(cfg, targets, args.jobs)
            extra = {"targets": list(targets)}
        else:
            body, status = cmd_cache(cfg)
            extra = {}
        if cfg["cache"] and args.command in ("build", "check") and _TABLE is not None:
            save_table(_TABLE, cfg["cache"])
    except UsageError as exc:
        print(f"bmcomplex: error: {exc}", file=sys.stderr)
        return 2
    elapsed = round((time.perf_counter() - t0) * 1000)
    report = {"version": __version__, "command": args.command, "config": _config_json(cfg, extra)}
    report.update({k: body.get(k) for k in ("dims", "d2_zero", "homology", "checks")})
    for k, v in body.items():
        report.setdefault(k, v)
    # wall-clock time would make otherwise identical reports differ
    report["elapsed_ms"] = elapsed if args.timing else None
    _emit(report, args.out)
    if args.timing:
        log.info("elapsed %d ms", elapsed)
    return status


if __name__ == "__main__":
    sys.exit(main())
