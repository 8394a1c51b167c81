"""Command-line front end.

Subcommands: solve, eta, sturmian, check, scan, validate.  Every run
writes its artifacts into <out>/run-<confighash>/ with the configuration
echoed to config.json, so identical configurations produce byte-identical
outputs.  Exit codes: 0 pass/success, 1 criterion fail, 2 inconclusive,
3 usage or convergence error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .convexity import convexity_defect
from .criteria import (
    ClassAParams,
    check_class_a,
    check_class_b,
    check_kappa,
    check_theorem_sturm,
    scan_translates,
    search_c,
)
from .sturmian import best_sturmian, sturmian_measure
from .torus import spec_from_dict
from .transfer import beta_lower_bound, solve_calibrated
from .validate import run_all

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INCONCLUSIVE = 2
EXIT_ERROR = 3

_STATUS_EXIT = {"pass": EXIT_PASS, "fail": EXIT_FAIL, "inconclusive": EXIT_INCONCLUSIVE}


def _canonical(obj):
    """Make an object JSON-serializable with deterministic content."""
    if isinstance(obj, dict):
        return {str(k): _canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canonical(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    return obj


def _json_text(obj) -> str:
    return json.dumps(_canonical(obj), sort_keys=True, indent=2) + "\n"


def _run_dir(out: str, config: dict) -> Path:
    text = json.dumps(_canonical(config), sort_keys=True)
    digest = hashlib.sha256(text.encode()).hexdigest()[:12]
    path = Path(out) / f"run-{digest}"
    path.mkdir(parents=True, exist_ok=True)
    (path / "config.json").write_text(_json_text(config))
    return path


def _load_spec(path: str):
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise SystemExit(f"cannot read spec file {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise SystemExit(f"spec file {path} is not valid JSON: {exc}")
    try:
        return spec_from_dict(data)
    except ValueError as exc:
        raise SystemExit(f"malformed function spec in {path}: {exc}")


def _common_config(args, subcommand: str) -> dict:
    cfg = {"subcommand": subcommand, "version": __version__}
    for key in ("spec", "d", "n", "tol", "max_iter", "orbit_period_cap", "max_q", "omega_count", "seed", "cases"):
        if hasattr(args, key) and getattr(args, key) is not None:
            cfg[key] = getattr(args, key)
    return cfg


def cmd_solve(args) -> int:
    f = _load_spec(args.spec)
    if args.n % args.d != 0:
        print(f"error: d={args.d} must divide N={args.n}", file=sys.stderr)
        return EXIT_ERROR
    cfg = _common_config(args, "solve")
    rundir = _run_dir(args.out, cfg)
    sol = solve_calibrated(f, d=args.d, grid_n=args.n, tol=args.tol, max_iter=args.max_iter)
    table = beta_lower_bound(f, d=args.d, max_period=args.orbit_period_cap)
    gap = sol.beta - table.best.average
    cross_tol = max(10.0 * sol.tol, 1e-9)
    beta_ok = gap >= -cross_tol
    doc = sol.to_dict()
    doc["orbit_check"] = {
        "best_orbit_average": table.best.average,
        "best_orbit_period": table.best.period,
        "beta_minus_best": gap,
        "tolerance": cross_tol,
        "ok": beta_ok,
    }
    (rundir / "solution.json").write_text(_json_text(doc))
    (rundir / "g.csv").write_text(sol.g.to_csv())
    print(f"beta = {sol.beta!r}  residual = {sol.residual:.3e}  iterations = {sol.iterations}")
    print(f"artifacts in {rundir}")
    if not sol.converged or not beta_ok:
        return EXIT_ERROR
    return EXIT_PASS


def cmd_eta(args) -> int:
    f = _load_spec(args.spec)
    cfg = _common_config(args, "eta")
    cfg["mode"] = args.mode
    rundir = _run_dir(args.out, cfg)
    try:
        rep = convexity_defect(f, args.mode, args.n)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    (rundir / "convexity.json").write_text(_json_text(rep.to_dict()))
    print(f"eta = {rep.eta!r}  ({rep.method}, {rep.bound_direction})")
    print(f"artifacts in {rundir}")
    return EXIT_PASS


def cmd_sturmian(args) -> int:
    try:
        mu = sturmian_measure(args.p, args.q)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    cfg = _common_config(args, "sturmian")
    cfg.update({"p": args.p, "q": args.q})
    rundir = _run_dir(args.out, cfg)
    doc = mu.to_dict()
    if args.spec:
        f = _load_spec(args.spec)
        doc["integral"] = mu.integrate(f)
        best_mu, best_val = best_sturmian(f, args.max_q)
        doc["best"] = {"p": best_mu.p, "q": best_mu.q, "value": best_val}
    (rundir / "sturmian.json").write_text(_json_text(doc))
    print(f"orbit of {args.p}/{args.q}: {[str(x) for x in mu.orbit]}")
    if "integral" in doc:
        print(f"integral = {doc['integral']!r}; best over q <= {args.max_q}: "
              f"{doc['best']['p']}/{doc['best']['q']} -> {doc['best']['value']!r}")
    print(f"artifacts in {rundir}")
    return EXIT_PASS


def cmd_check(args) -> int:
    f = _load_spec(args.spec)
    cfg = _common_config(args, "check")
    cfg.update({"criterion": args.criterion, "a": args.a, "b": args.b, "v": args.v})
    rundir = _run_dir(args.out, cfg)
    try:
        if args.criterion == "sturm":
            if args.a is None or args.b is None:
                print("error: --criterion sturm needs --a and --b", file=sys.stderr)
                return EXIT_ERROR
            rep = check_theorem_sturm(f, args.a, args.b, args.n)
        elif args.criterion == "classA":
            if args.a is None or args.b is None:
                print("error: --criterion classA needs --a and --b (and optionally --v)", file=sys.stderr)
                return EXIT_ERROR
            rep = check_class_a(f, ClassAParams(args.a, args.b, args.v or 0.0), args.n)
        elif args.criterion == "classB":
            rep = check_class_b(f, args.n)
        elif args.criterion == "kappa":
            rep = check_kappa(f, args.n)
        else:  # search-c
            _, rep = search_c(f, args.n)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    (rundir / "criterion.json").write_text(_json_text(rep.to_dict()))
    worst = min(rep.margins.values()) if rep.margins else float("nan")
    print(f"{rep.criterion}: {rep.status} (worst net margin {worst!r})")
    print(f"artifacts in {rundir}")
    return _STATUS_EXIT[rep.status]


def cmd_scan(args) -> int:
    f = _load_spec(args.spec)
    if args.n % 2 != 0:
        print("error: scan needs an even N", file=sys.stderr)
        return EXIT_ERROR
    cfg = _common_config(args, "scan")
    rundir = _run_dir(args.out, cfg)
    res = scan_translates(
        f,
        args.omega_count,
        grid_n=args.n,
        max_q=args.max_q,
        tol=args.tol,
        max_iter=args.max_iter,
    )
    (rundir / "scan.csv").write_text(res.to_csv())
    (rundir / "scan.json").write_text(_json_text(res.to_dict()))
    n_pass = sum(1 for r in res.rows if r.certificate.passed)
    print(f"{n_pass}/{len(res.rows)} certificates pass; artifacts in {rundir}")
    if res.all_pass:
        return EXIT_PASS
    if any(r.certificate.status == "fail" or not r.converged for r in res.rows):
        return EXIT_FAIL
    return EXIT_INCONCLUSIVE


def cmd_validate(args) -> int:
    cfg = _common_config(args, "validate")
    rundir = _run_dir(args.out, cfg)
    results = run_all(seed=args.seed, cases=args.cases)
    (rundir / "validate.json").write_text(_json_text([r.to_dict() for r in results]))
    ok = True
    for r in results:
        print(f"{r.name:22s} cases={r.cases:5d} violations={r.violations} worst_slack={r.worst_slack!r}")
        ok = ok and r.passed
    print(f"artifacts in {rundir}")
    return EXIT_PASS if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="circleopt",
        description="Ergodic optimization toolkit for circle expanding maps",
    )
    ap.add_argument("--version", action="version", version=f"circleopt {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_common(p, spec_required=True):
        if spec_required:
            p.add_argument("--spec", required=True, help="path to a function-spec JSON file")
        p.add_argument("--out", default="runs", help="output directory (default: runs)")
        p.add_argument("--n", "--N", dest="n", type=int, default=4096, help="grid size (default 4096)")

    p = sub.add_parser("solve", help="solve the calibrated sub-action equation")
    add_common(p)
    p.add_argument("--d", type=int, default=2, help="expansion factor (default 2)")
    p.add_argument("--tol", type=float, default=None, help="step tolerance (default 1e-9 * range)")
    p.add_argument("--max-iter", dest="max_iter", type=int, default=100_000)
    p.add_argument("--orbit-period-cap", dest="orbit_period_cap", type=int, default=16,
                   help="period cap for the periodic-orbit cross-check")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("eta", help="convexity defect of an observable")
    add_common(p)
    p.add_argument("--mode", choices=["auto", "second_derivative", "finite_difference"], default="auto")
    p.set_defaults(func=cmd_eta)

    p = sub.add_parser("sturmian", help="construct a Sturmian measure, optionally integrate a spec")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--spec", default=None, help="optional spec to integrate")
    p.add_argument("--max-q", dest="max_q", type=int, default=32)
    p.add_argument("--out", default="runs")
    p.set_defaults(func=cmd_sturmian)

    p = sub.add_parser("check", help="run a criterion checker")
    add_common(p)
    p.add_argument("--criterion", choices=["sturm", "classA", "classB", "kappa", "search-c"], required=True)
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--b", type=float, default=None)
    p.add_argument("--v", type=float, default=None)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("scan", help="solve and certify all translates of an observable")
    add_common(p)
    p.add_argument("--omega-count", dest="omega_count", type=int, default=64)
    p.add_argument("--max-q", dest="max_q", type=int, default=32)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--max-iter", dest="max_iter", type=int, default=100_000)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("validate", help="run the randomized invariant suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=200)
    p.add_argument("--out", default="runs")
    p.set_defaults(func=cmd_validate)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
            return EXIT_ERROR
        raise


if __name__ == "__main__":
    sys.exit(main())
