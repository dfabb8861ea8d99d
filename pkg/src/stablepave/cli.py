"""Batch experiment driver.

Subcommands
-----------
gen         write a reproducible instance file (process or kernel matrix)
pave-matrix pave a PSD contraction and report partition + operator norms
pave-poly   pave a multi-affine kernel polynomial (exhaustive or descent),
            optionally adding the certified barrier bound
sr-pave     entropy paving of a point process for a target gap delta
verify      run a named verification suite (or all of them)

All randomness flows through one seeded generator; identical configuration
and seed give identical reports up to timings.  Exit code 0 means every
requested check passed.  STABLEPAVE_TOL overrides the default tolerance;
STABLEPAVE_NUMBA=0 selects the pure-numpy kernels.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np

from . import jsonio
from . import multiaffine as ma
from . import paving as pv
from . import processes as pr
from .suites import SUITES


def _default_tol() -> float:
    return float(os.environ.get("STABLEPAVE_TOL", "1e-9"))


def _load_or_generate_process(args) -> pr.PointProcess:
    if args.infile:
        return jsonio.process_from_dict(jsonio.load_json(args.infile))
    rng = np.random.default_rng(args.seed)
    return pr.random_process(args.gen, args.n, rng)


def cmd_gen(args) -> int:
    rng = np.random.default_rng(args.seed)
    if args.as_matrix:
        if args.kind != "determinantal":
            print("--as-matrix is only meaningful for determinantal instances")
            return 2
        K = pr.random_psd_contraction(args.n, rng, diag_cap=args.diag_cap)
        payload = jsonio.matrix_to_dict(K)
    else:
        X = pr.random_process(args.kind, args.n, rng)
        payload = jsonio.process_to_dict(X)
    jsonio.save_json(payload, args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_pave_matrix(args) -> int:
    if args.infile:
        K = jsonio.matrix_from_dict(jsonio.load_json(args.infile))
    else:
        rng = np.random.default_rng(args.seed)
        K = pr.random_psd_contraction(args.n, rng, diag_cap=args.alpha)
    t0 = time.perf_counter()
    method = pv.Method.DESCENT if args.method == "descent" else pv.Method.EXHAUSTIVE
    report = pv.matrix_paving(
        K, pv.PavingParams(args.r, alpha=args.alpha), method=method
    )
    ms = 1000.0 * (time.perf_counter() - t0)
    payload = jsonio.paving_report_dict(
        report.result, args.r, alpha=args.alpha, runtime_ms=ms,
        operator_norms=list(report.operator_norms),
    )
    _emit(payload, args)
    return 0


def cmd_pave_poly(args) -> int:
    g = jsonio.multiaffine_from_dict(jsonio.load_json(args.infile))
    params = pv.PavingParams(args.r, alpha=args.alpha)
    t0 = time.perf_counter()
    if args.method == "descent":
        result = pv.interlacing_descent(g, params)
    else:
        result = pv.exhaustive_paving(g, params)
    extra = {}
    if args.certify:
        extra["certified_maxroot_bound"] = pv.certified_maxroot_bound(g, args.r)
    ms = 1000.0 * (time.perf_counter() - t0)
    payload = jsonio.paving_report_dict(
        result, args.r, alpha=args.alpha, runtime_ms=ms, **extra
    )
    _emit(payload, args)
    return 0


def cmd_sr_pave(args) -> int:
    X = _load_or_generate_process(args)
    if args.r is not None:
        r = args.r
        delta = None
    else:
        delta = args.delta
        r = pr.r_for_delta(delta)
    t0 = time.perf_counter()
    report = pr.sr_paving(X, r)
    ms = 1000.0 * (time.perf_counter() - t0)
    payload = {
        "method": "two-stage",
        "r": r,
        "alpha": None,
        "lambda": 1.0,
        "delta": delta,
        "bound": report.bound,
        "partition": [ma.indices_of(m) for m in report.partition.masks],
        "num_parts": report.partition.num_parts,
        "per_part_maxroot": list(report.per_part_root_norm),
        "entropy_gaps": list(report.entropy_gaps),
        "certified": bool(
            max(report.per_part_root_norm, default=0.0) <= report.bound + 1e-8
        ),
        "runtime_ms": ms,
    }
    _emit(payload, args)
    if delta is not None and any(g >= delta for g in report.entropy_gaps):
        return 1
    return 0


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    overrides = {}
    if args.count is not None:
        overrides["count"] = args.count
    if args.n is not None:
        overrides["max_n"] = args.n
    if args.seed is not None:
        overrides["seed"] = args.seed
    all_ok = True
    rows = []
    reports = {}
    for name in names:
        fn = SUITES[name]
        kwargs = dict(overrides)
        if name == "majorization-conjecture" and "count" in kwargs:
            kwargs["total"] = kwargs.pop("count")
        if name == "kernel-classification" and "count" in kwargs:
            c = kwargs.pop("count")
            kwargs["valid"] = c
            kwargs["invalid"] = c
        rep = fn(**kwargs)
        print(rep.summary())
        for msg in rep.failures[:10]:
            print(f"    failure: {msg}")
        all_ok = all_ok and rep.ok
        rows.append(
            {
                "suite": rep.name,
                "count": rep.count,
                "passes": rep.passes,
                "ok": rep.ok,
                "runtime_s": round(rep.runtime_s, 3),
            }
        )
        reports[rep.name] = {
            "count": rep.count,
            "passes": rep.passes,
            "failures": rep.failures,
            "info": _json_safe(rep.info),
            "runtime_s": rep.runtime_s,
        }
    if args.out:
        jsonio.save_json({"suites": reports, "all_ok": all_ok}, args.out)
    if args.csv:
        jsonio.save_csv(rows, args.csv)
    return 0 if all_ok else 1


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


def _emit(payload, args) -> None:
    payload = _json_safe(payload)
    if args.out:
        jsonio.save_json(payload, args.out)
        print(f"wrote {args.out}")
    else:
        jsonio.save_json(payload, "/dev/stdout")
    if getattr(args, "csv", None):
        flat = {
            k: v
            for k, v in payload.items()
            if isinstance(v, (int, float, str, bool, type(None)))
        }
        jsonio.save_csv([flat], args.csv)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stablepave",
        description="Paving experiments for stable kernels and point processes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a reproducible instance file")
    p.add_argument("--kind", required=True, choices=pr.GENERATOR_KINDS)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--as-matrix", action="store_true",
                   help="write the kernel matrix instead of the pmf")
    p.add_argument("--diag-cap", type=float, default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("pave-matrix", help="pave a PSD contraction")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--in", dest="infile", default=None)
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", choices=["exhaustive", "descent"],
                   default="exhaustive")
    p.add_argument("--out", default=None)
    p.add_argument("--csv", default=None)
    p.set_defaults(func=cmd_pave_matrix)

    p = sub.add_parser("pave-poly", help="pave a multi-affine kernel polynomial")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--method", choices=["exhaustive", "descent"],
                   default="exhaustive")
    p.add_argument("--certify", action="store_true",
                   help="also run the barrier bound")
    p.add_argument("--out", default=None)
    p.add_argument("--csv", default=None)
    p.set_defaults(func=cmd_pave_poly)

    p = sub.add_parser("sr-pave", help="entropy paving of a point process")
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--in", dest="infile", default=None)
    p.add_argument("--gen", choices=pr.GENERATOR_KINDS, default="determinantal")
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.add_argument("--csv", default=None)
    p.set_defaults(func=cmd_sr_pave)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("--suite", default="all",
                   choices=["all"] + sorted(SUITES))
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--tol", type=float, default=_default_tol())
    p.add_argument("--out", default=None)
    p.add_argument("--csv", default=None)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "delta", "x") is None and getattr(args, "r", "x") is None:
        print("sr-pave needs --delta or --r", file=sys.stderr)
        return 2
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
