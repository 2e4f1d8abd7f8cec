"""Command-line front end.

Examples::

    disc-hitting eval-w --lambda 1e6 --method all
    disc-hitting eval-density --r 1 --x 2 --t-grid 0.1:100:log7
    disc-hitting compare --r 1 --x 10 --t-grid 1e2:1e6:log10 --suite thm1
    disc-hitting mc-run --r 1 --x 2 --paths 100000 --seed 7 --output mc.csv
    disc-hitting calibrate --output constants.json

Every command writes one table, as CSV (the default) or JSON. CSV files start
with a ``#`` comment line carrying the package version; JSON files hold a
``meta`` object and a ``rows`` list. Exit status is 0 on success, 2 for
invalid input and 3 when a numerical scheme fails to converge.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from . import asymptotics as asy
from . import calibration
from .brownian_mc import McConfig, hitting_time_histogram, simulate_survival
from .errors import ConvergenceError, DomainError
from .hitting_density import (CutoffPolicy, HittingQuery, InversionConfig, cdf,
                              density_branchcut)
from .w_ramanujan import w_asymptotic, w_fourier, w_quadrature

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3

COMPARISON_COLUMNS = ["t", "x_radius", "r", "value_inversion", "value_thm1",
                      "value_thm2_or_3", "value_mc", "mc_std_err", "envelope"]


class UsageError(ValueError):
    pass


def parse_grid(text):
    """``a:b:logN``, ``a:b:linN``, a comma list, or a single number."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            values = [float(v) for v in text.split(",")]
        elif len(parts) == 3:
            a, b = float(parts[0]), float(parts[1])
            kind, n = parts[2][:3], int(parts[2][3:])
            if n < 1:
                raise UsageError(f"grid needs at least one point: {text!r}")
            if kind == "log":
                if a <= 0 or b <= 0:
                    raise UsageError(f"log grid needs positive ends: {text!r}")
                values = list(np.geomspace(a, b, n))
            elif kind == "lin":
                values = list(np.linspace(a, b, n))
            else:
                raise UsageError(f"grid spacing must be log or lin: {text!r}")
        else:
            raise UsageError(f"cannot parse grid {text!r}")
    except ValueError as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"cannot parse grid {text!r}") from None
    return [float(v) for v in values]


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _jsonable(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    return v


def render(rows, columns, meta, fmt):
    if fmt == "json":
        doc = {"meta": meta,
               "rows": [{c: _jsonable(row.get(c)) for c in columns} for row in rows]}
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    buf.write(f"# disc-hitting {meta['version']} command={meta['command']}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def emit(args, rows, columns, params):
    fmt = args.format
    if fmt is None:
        fmt = "json" if args.output and args.output.endswith(".json") else "csv"
    meta = {"version": __version__, "command": args.command,
            "parameters": {k: _jsonable(v) for k, v in sorted(params.items())}}
    text = render(rows, columns, meta, fmt)
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text, encoding="utf-8")


def _times(args):
    if args.t is not None and args.t_grid is not None:
        raise UsageError("give either --t or --t-grid, not both")
    if args.t is not None:
        return [args.t]
    if args.t_grid is not None:
        return parse_grid(args.t_grid)
    raise UsageError("one of --t or --t-grid is required")


def _inversion_config(args):
    return InversionConfig(abs_tol=args.abs_tol, rel_tol=args.rel_tol,
                           upper_cutoff_policy=CutoffPolicy(args.cutoff))


# ---------------------------------------------------------------------------
# Commands


def cmd_eval_w(args):
    lam = args.lam
    methods = (["quadrature", "fourier_sine", "fourier_cosine", "asymptotic"]
               if args.method == "all" else [args.method])
    rows = []
    for m in methods:
        if m == "quadrature":
            ev = w_quadrature(lam)
        elif m == "fourier_sine":
            ev = w_fourier(lam, "sine")
        elif m == "fourier_cosine":
            ev = w_fourier(lam, "cosine")
        else:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                ev = w_asymptotic(lam, args.n_terms)
        rows.append({"lambda": ev.lam, "method": ev.method.value,
                     "value": ev.value, "error_estimate": ev.error_estimate})
    emit(args, rows, ["lambda", "method", "value", "error_estimate"],
         {"lambda": lam, "method": args.method, "n_terms": args.n_terms})


def _eval_exact(args, fn):
    cfg = _inversion_config(args)
    rows = []
    for t in _times(args):
        ev = fn(HittingQuery(args.r, args.x, t), cfg)
        rows.append({"t": t, "x_radius": args.x, "r": args.r, "value": ev.value,
                     "error_estimate": ev.error_estimate, "method": ev.method.value})
    emit(args, rows, ["t", "x_radius", "r", "value", "error_estimate", "method"],
         {"r": args.r, "x": args.x, "abs_tol": args.abs_tol,
          "rel_tol": args.rel_tol, "cutoff": args.cutoff})


def cmd_eval_density(args):
    _eval_exact(args, density_branchcut)


def cmd_eval_cdf(args):
    _eval_exact(args, cdf)


_FORMULAS = {
    "thm1": (asy.thm1_density, asy.thm1_envelope),
    "thm2": (asy.thm2_density, asy.thm2_envelope),
    "thm3": (asy.thm3_cdf, asy.thm3_envelope),
    "thm3-derivative": (asy.thm3_cdf_derivative, None),
    "remark4": (None, asy.remark4_envelope),
}


def cmd_eval_asymptotic(args):
    k = asy.Constants(args.r_ref)
    names = list(_FORMULAS) if args.formula == "all" else [args.formula]
    rows = []
    for t in _times(args):
        for name in names:
            fn, env = _FORMULAS[name]
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                if name == "remark4":
                    value = asy.remark4_tail(args.x, t, k, args.n_terms)
                else:
                    value = fn(args.x, t, k)
            rows.append({"t": t, "x_radius": args.x, "r_ref": args.r_ref,
                         "formula": name, "value": value,
                         "envelope": None if env is None else env(args.x, t)})
    emit(args, rows, ["t", "x_radius", "r_ref", "formula", "value", "envelope"],
         {"r_ref": args.r_ref, "x": args.x, "formula": args.formula,
          "n_terms": args.n_terms})


def _mc_config(args, times, t_max=None):
    t_max = max(times) if t_max is None else t_max
    return McConfig(n_paths=args.paths, seed=args.seed, t_max=t_max,
                    time_grid=tuple(times), step_scale=args.step_scale,
                    dt_cap=args.dt_cap)


def cmd_mc_run(args):
    times = parse_grid(args.t_grid)
    cfg = _mc_config(args, times, args.t_max)
    curve = simulate_survival(HittingQuery(args.r, args.x), cfg)
    rows = [dict(row, x_radius=args.x, r=args.r) for row in curve.rows()]
    emit(args, rows, ["t", "x_radius", "r", "survival", "std_err"],
         {"r": args.r, "x": args.x, "paths": args.paths, "seed": args.seed,
          "t_max": cfg.t_max, "step_scale": args.step_scale,
          "dt_cap": args.dt_cap})


def comparison_rows(r, x, times, suite, mc_paths=0, seed=0, step_scale=0.05,
                    dt_cap=1.0, env=None, cfg=None):
    """Rows of ComparisonRow data for one suite; MC columns are None if skipped."""
    k = asy.Constants(r)
    cfg = InversionConfig() if cfg is None else cfg
    env = calibration.load() if env is None else env
    rows = []
    for t in times:
        q = HittingQuery(r, x, t)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            if suite in ("thm1", "thm2"):
                exact = density_branchcut(q, cfg).value
                v1 = asy.thm1_density(x, t, k)
                v23 = asy.thm2_density(x, t, k)
                envelope = (env["thm1"] * asy.thm1_envelope(x, t) if suite == "thm1"
                            else env["thm2"] * asy.thm2_envelope(x, t))
            else:
                exact = cdf(q, cfg).value
                v1 = 1.0 - asy.remark4_tail(x, t, k)
                v23 = asy.thm3_cdf(x, t, k)
                envelope = env["thm3"] * asy.thm3_envelope(x, t)
        rows.append({"t": t, "x_radius": x, "r": r, "value_inversion": exact,
                     "value_thm1": v1, "value_thm2_or_3": v23, "value_mc": None,
                     "mc_std_err": None, "envelope": envelope})
    if mc_paths:
        q = HittingQuery(r, x)
        if suite == "thm3":
            mc = McConfig(mc_paths, seed, max(times), tuple(times), step_scale, dt_cap)
            curve = simulate_survival(q, mc)
            for row, s, e in zip(rows, curve.survival, curve.std_err):
                row["value_mc"], row["mc_std_err"] = 1.0 - s, e
        else:
            # One narrow log bin around each requested time.
            half = 0.05
            edges = sorted({v for t in times for v in (t * math.exp(-half),
                                                       t * math.exp(half))})
            mc = McConfig(mc_paths, seed, edges[-1], (), step_scale, dt_cap)
            hist = hitting_time_histogram(q, mc, edges)
            for row in rows:
                i = int(np.searchsorted(hist.edges, row["t"])) - 1
                row["value_mc"] = hist.density[i]
                row["mc_std_err"] = hist.std_err[i]
    return rows


def cmd_compare(args):
    times = parse_grid(args.t_grid)
    rows = comparison_rows(args.r, args.x, times, args.suite, args.mc_paths,
                           args.seed, args.step_scale, args.dt_cap,
                           cfg=_inversion_config(args))
    emit(args, rows, COMPARISON_COLUMNS,
         {"r": args.r, "x": args.x, "suite": args.suite,
          "mc_paths": args.mc_paths, "seed": args.seed})


def cmd_calibrate(args):
    path = Path(args.output) if args.output else calibration.DEFAULT_PATH
    if path.exists() and not args.force:
        raise UsageError(f"{path} exists; use --force to overwrite")
    env = calibration.calibrate()
    calibration.save(env, path, force=True)
    rows = [{"name": n, "raw": env.raw[n], "constant": env.constants[n]}
            for n in sorted(env.constants)]
    text = render(rows, ["name", "raw", "constant"],
                  {"version": __version__, "command": "calibrate",
                   "parameters": {"output": str(path)}}, "csv")
    sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Argument parsing


def _positive(text):
    v = float(text)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _add_output(p, default_output=None):
    p.add_argument("--output", "-o", default=default_output,
                   help="output file ('-' or omitted: stdout)")
    p.add_argument("--format", choices=["csv", "json"], default=None,
                   help="output format (default: from extension, else csv)")


def _add_geometry(p):
    p.add_argument("--r", type=_positive, required=True, help="disc radius")
    p.add_argument("--x", type=_positive, required=True, help="start distance |x|")


def _add_times(p):
    p.add_argument("--t", type=_positive, help="a single time")
    p.add_argument("--t-grid", help="time grid a:b:logN, a:b:linN or a,b,c")


def _add_inversion(p):
    p.add_argument("--abs-tol", type=_positive, default=1e-15)
    p.add_argument("--rel-tol", type=_positive, default=1e-11)
    p.add_argument("--cutoff", choices=[c.value for c in CutoffPolicy],
                   default=CutoffPolicy.CONSERVATIVE.value,
                   help="upper cut-off policy for the branch-cut integral")


def _add_mc(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--step-scale", type=_positive, default=0.05)
    p.add_argument("--dt-cap", type=_positive, default=1.0,
                   help="largest step before scaling, used far from the disc")


def build_parser():
    ap = argparse.ArgumentParser(prog="disc-hitting", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval-w", help="evaluate W(lambda)")
    p.add_argument("--lambda", dest="lam", type=_positive, required=True)
    p.add_argument("--method", default="quadrature",
                   choices=["quadrature", "fourier_sine", "fourier_cosine",
                            "asymptotic", "all"])
    p.add_argument("--n-terms", type=int, default=6)
    _add_output(p)
    p.set_defaults(func=cmd_eval_w)

    for name, func, what in (("eval-density", cmd_eval_density, "density"),
                             ("eval-cdf", cmd_eval_cdf, "distribution function")):
        p = sub.add_parser(name, help=f"hitting-time {what} by branch-cut inversion")
        _add_geometry(p)
        _add_times(p)
        _add_inversion(p)
        _add_output(p)
        p.set_defaults(func=func)

    p = sub.add_parser("eval-asymptotic", help="asymptotic formulas")
    p.add_argument("--r-ref", type=_positive, default=1.0)
    p.add_argument("--x", type=_positive, required=True)
    _add_times(p)
    p.add_argument("--formula", default="all", choices=list(_FORMULAS) + ["all"])
    p.add_argument("--n-terms", type=int, default=3)
    _add_output(p)
    p.set_defaults(func=cmd_eval_asymptotic)

    p = sub.add_parser("mc-run", help="Monte Carlo survival curve")
    _add_geometry(p)
    p.add_argument("--paths", type=int, required=True)
    p.add_argument("--t-grid", default="1:100:log5")
    p.add_argument("--t-max", type=_positive, default=None)
    _add_mc(p)
    _add_output(p)
    p.set_defaults(func=cmd_mc_run)

    p = sub.add_parser("compare", help="inversion vs asymptotics (and MC)")
    _add_geometry(p)
    p.add_argument("--t-grid", required=True)
    p.add_argument("--suite", choices=["thm1", "thm2", "thm3"], required=True)
    p.add_argument("--mc-paths", type=int, default=0,
                   help="Monte Carlo paths (0: MC columns left empty)")
    _add_mc(p)
    _add_inversion(p)
    _add_output(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("calibrate", help="refit the envelope constants")
    p.add_argument("--output", "-o", default=None,
                   help="constants file (default: the packaged data file)")
    p.add_argument("--force", action="store_true", help="overwrite an existing file")
    p.set_defaults(func=cmd_calibrate)
    return ap


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (ConvergenceError, calibration.CalibrationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
