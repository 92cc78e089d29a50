"""Command-line front end: bounds, sweeps, quasimode certificates, checks.

Result rows go to standard output, as CSV under the header

    alpha,k,n,r_max,quantity,value,lambda_star,converged,elapsed_ms

or as a single JSON document {"rows": [...], "fit": {...}?, "meta": {...}}.
Real values carry 9 significant digits, randomness is seeded, and rows
are emitted in input order, so identical invocations print identical
values (elapsed_ms is wall time and is the one column that varies).
beta_k and nu_k are derived from alpha and echoed in the JSON meta block,
never accepted as inputs.  Diagnostics go to standard error.  Exit codes:
0 on success, 1 when a computation fails or a verification check does
not pass, 2 on usage errors.
"""

import argparse
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from . import __version__, analysis, solver, specfun, verify
from .grids import ModeSpec, default_grid, make_grid

CSV_HEADER = "alpha,k,n,r_max,quantity,value,lambda_star,converged,elapsed_ms"

_GRID_POLICY = ("r_max = max(30, 3 r_k + 10) when the critical radius exists; "
                "sigma and range paths raise it to 4.4 |beta_k|^{1/4}")


class UsageError(Exception):
    """Bad argument values (well-formed flags, inadmissible content)."""


def _fmt(x):
    return "%.9g" % x


def _row(alpha, k, n, r_max, quantity, value, lambda_star, converged, elapsed_ms):
    return {"alpha": float(alpha), "k": int(k), "n": int(n),
            "r_max": float(r_max), "quantity": quantity, "value": float(value),
            "lambda_star": None if lambda_star is None else float(lambda_star),
            "converged": bool(converged), "elapsed_ms": int(elapsed_ms)}


def _csv_line(row):
    lam = "" if row["lambda_star"] is None else _fmt(row["lambda_star"])
    return ",".join([_fmt(row["alpha"]), "%d" % row["k"], "%d" % row["n"],
                     _fmt(row["r_max"]), row["quantity"], _fmt(row["value"]),
                     lam, "true" if row["converged"] else "false",
                     "%d" % row["elapsed_ms"]])


def _emit(rows, fmt, meta, fit=None, out=None):
    out = out or sys.stdout
    if fmt == "json":
        doc = {"rows": rows, "meta": meta}
        if fit is not None:
            doc["fit"] = fit
        print(json.dumps(doc), file=out)
    else:
        print(CSV_HEADER, file=out)
        for row in rows:
            print(_csv_line(row), file=out)
        if fit is not None:
            print(json.dumps(fit), file=out)


def _mode_meta(mode):
    return {"alpha": mode.alpha, "k": mode.k,
            "beta_k": mode.beta_k, "nu_k": mode.nu_k}


def _meta(**extra):
    meta = {"version": __version__, "grid_policy": _GRID_POLICY}
    meta.update(extra)
    return meta


def _check_common(args):
    if not math.isfinite(args.alpha):
        raise UsageError("alpha must be finite, got %r" % args.alpha)
    if getattr(args, "k", 1) < 1:
        raise UsageError("k must be >= 1, got %d" % args.k)
    n = getattr(args, "n", None)
    if n is not None and n < 16:
        raise UsageError("n must be >= 16, got %d" % n)
    rmax = getattr(args, "rmax", None)
    if rmax is not None and not (math.isfinite(rmax) and rmax >= 10):
        raise UsageError("rmax must be >= 10, got %r" % rmax)


def cmd_spectrum(args):
    _check_common(args)
    mode = ModeSpec(alpha=args.alpha, k=args.k)
    grid = (make_grid(args.n, args.rmax) if args.rmax is not None
            else analysis.sigma_grid(mode, n=args.n))
    t0 = time.perf_counter()
    res = analysis.spectral_bound(mode, grid)
    ms = round(1000 * (time.perf_counter() - t0))
    rows = [_row(args.alpha, args.k, res.grid_n, grid.r_max, "sigma",
                 res.sigma_bound, None, res.converged, ms)]
    _emit(rows, args.format, _meta(**_mode_meta(mode)))
    return 0


def cmd_pseudo(args):
    _check_common(args)
    if args.lambda_points < 8:
        raise UsageError("lambda-points must be >= 8, got %d" % args.lambda_points)
    if not (0 < args.refine_tol < 1):
        raise UsageError("refine-tol must be in (0, 1), got %g" % args.refine_tol)
    mode = ModeSpec(alpha=args.alpha, k=args.k)
    grid = (make_grid(args.n, args.rmax) if args.rmax is not None
            else default_grid(mode, n=args.n))
    t0 = time.perf_counter()
    res = analysis.pseudospectral_bound(mode, grid,
                                        lambda_points=args.lambda_points,
                                        refine_tol=args.refine_tol)
    ms = round(1000 * (time.perf_counter() - t0))
    rows = [_row(args.alpha, args.k, res.grid_n, grid.r_max, "psi",
                 res.psi_bound, res.lambda_star, res.converged, ms)]
    _emit(rows, args.format, _meta(**_mode_meta(mode)))
    return 0


def cmd_sweep(args):
    try:
        alphas = [float(tok) for tok in args.alphas.split(",") if tok.strip()]
    except ValueError as exc:
        raise UsageError("bad --alphas list: %s" % exc) from None
    if not alphas:
        raise UsageError("--alphas is empty")
    for alpha in alphas:
        if not math.isfinite(alpha):
            raise UsageError("alpha must be finite, got %r" % alpha)
    if args.k < 1:
        raise UsageError("k must be >= 1, got %d" % args.k)
    if args.n < 16:
        raise UsageError("n must be >= 16, got %d" % args.n)
    if args.fit:
        if len(alphas) < 4:
            raise UsageError("--fit needs at least 4 alphas, got %d" % len(alphas))
        if max(alphas) <= 0 or abs(math.log(max(map(abs, alphas)))
                                   - math.log(min(map(abs, alphas)))) < 1e-12:
            raise UsageError("--fit needs alphas spanning a range")

    def work(alpha):
        t0 = time.perf_counter()
        pt = analysis.sweep_point(ModeSpec(alpha=alpha, k=args.k),
                                  args.quantity, n=args.n)
        return pt, round(1000 * (time.perf_counter() - t0))

    with ThreadPoolExecutor(max_workers=min(4, len(alphas))) as pool:
        results = list(pool.map(work, alphas))
    rows = [_row(a, args.k, pt.grid_n, pt.r_max, args.quantity, pt.value,
                 pt.lambda_star, pt.converged, ms)
            for a, (pt, ms) in zip(alphas, results)]
    fit = None
    if args.fit:
        pts = [(math.log(abs(a)), math.log(pt.value))
               for a, (pt, _) in zip(alphas, results)
               if pt.converged and pt.value > 0]
        excluded = [a for a, (pt, _) in zip(alphas, results)
                    if not (pt.converged and pt.value > 0)]
        res = analysis.fit_loglog(pts, excluded_alphas=tuple(excluded))
        fit = {"slope": res.slope, "intercept": res.intercept,
               "max_residual": res.max_residual,
               "excluded_alphas": list(res.excluded_alphas)}
    meta = _meta(quantity=args.quantity, n_base=args.n,
                 points=[_mode_meta(ModeSpec(alpha=a, k=args.k)) for a in alphas])
    _emit(rows, args.format, meta, fit=fit)
    return 0


def cmd_quasimode(args):
    _check_common(args)
    beta_1 = args.alpha / (8.0 * math.pi)
    if abs(beta_1) < 1.0:
        raise UsageError("quasimode needs |alpha| >= 8 pi (|beta_1| >= 1), "
                         "got alpha = %g" % args.alpha)
    r1 = abs(beta_1) ** (1.0 / 6.0)
    r_max = args.rmax if args.rmax is not None else max(12.0, r1 + 2.0 / r1 + 1.0)
    n = args.n if args.n is not None else int(math.ceil(20.0 * r1 * r_max)) + 8
    grid = make_grid(n, r_max)
    t0 = time.perf_counter()
    v, ratio = analysis.quasimode(beta_1, grid)
    ms = round(1000 * (time.perf_counter() - t0))
    lam = beta_1 * specfun.sigma(r1)
    scaled = ratio / abs(beta_1) ** (1.0 / 3.0)
    rows = [_row(args.alpha, 1, grid.n, grid.r_max, "quasimode_ratio",
                 ratio, lam, True, ms),
            _row(args.alpha, 1, grid.n, grid.r_max, "quasimode_scaled",
                 scaled, None, True, 0)]
    _emit(rows, args.format, _meta(beta_1=beta_1, r_1=r1, lam=lam))
    return 0


def cmd_verify(args):
    config = verify.VerifyConfig(seed=args.seed)
    reports = verify.run_all(config, suite=args.suite)
    failed = [r for r in reports if not r.passed]
    if args.format == "json":
        doc = {"rows": [{"check_id": r.check_id, "passed": r.passed,
                         "measured": r.measured, "tolerance": r.tolerance,
                         "samples": r.samples} for r in reports],
               "meta": _meta(suite=args.suite, seed=args.seed)}
        print(json.dumps(doc))
    else:
        for r in reports:
            print("%-22s %s  measured=%.6g  tolerance=%.6g  samples=%d"
                  % (r.check_id, "PASS" if r.passed else "FAIL",
                     r.measured, r.tolerance, r.samples))
        if failed:
            print("%d of %d checks failed" % (len(failed), len(reports)))
        else:
            print("%d checks passed" % len(reports))
    return 1 if failed else 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="oseenspec",
        description="Spectral and pseudospectral bounds for the radial "
                    "vortex mode family.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_k=True):
        p.add_argument("--alpha", type=float, required=True,
                       help="circulation parameter (beta_k = alpha k / 8 pi)")
        if with_k:
            p.add_argument("--k", type=int, default=1,
                           help="angular mode number, k >= 1 (default 1)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("spectrum", help="smallest real part of the mode spectrum")
    add_common(p)
    p.add_argument("--n", type=int, default=600)
    p.add_argument("--rmax", type=float, default=None)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("pseudo", help="pseudospectral bound min_lam s_min(H - i lam)")
    add_common(p)
    p.add_argument("--n", type=int, default=600)
    p.add_argument("--rmax", type=float, default=None)
    p.add_argument("--lambda-points", type=int, default=64,
                   help="shifts in the coarse scan window (default 64)")
    p.add_argument("--refine-tol", type=float, default=1e-3,
                   help="relative width target of the golden refinement")
    p.set_defaults(func=cmd_pseudo)

    p = sub.add_parser("sweep", help="bounds across alphas, optionally with a log-log fit")
    p.add_argument("--alphas", required=True, help="comma-separated alpha values")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--quantity", choices=("sigma", "psi", "range"), required=True)
    p.add_argument("--n", type=int, default=600)
    p.add_argument("--fit", action="store_true",
                   help="append the fitted slope as a JSON line")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("quasimode", help="localized test field and its residual ratio")
    add_common(p, with_k=False)
    p.add_argument("--n", type=int, default=None,
                   help="grid size (default: resolves the support)")
    p.add_argument("--rmax", type=float, default=None)
    p.set_defaults(func=cmd_quasimode)

    p = sub.add_parser("verify", help="run the identity and inequality registry")
    p.add_argument("--suite", choices=sorted(verify.SUITES), default="all")
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print("usage error: %s" % exc, file=sys.stderr)
        return 2
    except (ValueError, solver.SolverError, specfun.PoleError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
