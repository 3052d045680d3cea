"""``gbias`` command line: kernels, densities, samples and verification.

Exit codes: 0 success (or every verdict passes), 1 a verdict failed,
2 usage or domain error, 3 numerical non-convergence. Errors are reported
as a JSON object on stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .distributions import (
    BetaR1,
    Gamma,
    GammaBiased,
    PointMass,
    ProductBetaVn,
    ProductGamma,
    ProductNormal,
    cdf_with_error,
    describe,
    pdf_with_error,
    sample,
)
from .errors import ConvergenceError, GbiasError
from .meijer_kernel import (
    ContourConfig,
    eval_g_0n_with_error,
    eval_g_nn_beta_with_error,
    pn_density_with_error,
)
from .rng import DEFAULT_SEED
from .verifier import SUITES, report_from_dict, reports_to_csv, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# argument parsing


def _vector(text):
    try:
        vals = [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not vals or not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"expected finite numbers, got {text!r}")
    return vals


def parse_grid(text):
    """``lo:hi:count`` (geometric spacing) or a comma-separated list."""
    text = str(text)
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError("grid must be lo:hi:count")
        try:
            lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad grid {text!r}")
        if not (lo > 0 and hi >= lo and count >= 1):
            raise argparse.ArgumentTypeError("grid needs 0 < lo <= hi and count >= 1")
        if count == 1:
            return [lo]
        return [float(v) for v in np.geomspace(lo, hi, count)]
    return _vector(text)


def _add_common(p, seed=False, formats=("json", "csv")):
    p.add_argument("--format", choices=formats, default=formats[0])
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--config", help="JSON file whose keys mirror the long flags")
    if seed:
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)


def _add_law(p):
    kind = p.add_mutually_exclusive_group(required=True)
    kind.add_argument("--gamma", action="store_true", help="Gamma(r), r from --r")
    kind.add_argument("--beta", action="store_true", help="Beta(r, 1), r from --r")
    kind.add_argument("--pg", action="store_true", help="product gamma PG(r)")
    kind.add_argument("--vn", action="store_true", help="product of Beta(r_k, 1)")
    kind.add_argument("--pn", action="store_true", help="product of n standard normals")
    kind.add_argument("--point", type=float, metavar="C", help="point mass at C")
    kind.add_argument("--gbias", action="store_true",
                      help="gamma bias of order n of the law chosen by --w")
    p.add_argument("--r", type=_vector, help="shape vector, comma separated")
    p.add_argument("--n", type=int, help="order for --pn")
    p.add_argument("--w", choices=("pg", "gamma", "point"), default="pg",
                   help="base law for --gbias, with mean prod(r)")


def build_parser():
    parser = _Parser(prog="gbias", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"gbias {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", help="evaluate a Meijer G kernel")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--g0n", action="store_true", help="G^{n,0}_{0,n}(x | a)")
    which.add_argument("--gnn", action="store_true", help="G^{n,0}_{n,n}(x | r ; r-1)")
    which.add_argument("--pn", action="store_true", help="product normal density")
    p.add_argument("--a", type=_vector, help="lower parameters for --g0n")
    p.add_argument("--r", type=_vector, help="shapes for --gnn")
    p.add_argument("--n", type=int, help="order for --pn")
    _add_points(p)
    p.add_argument("--tolerance", type=float, default=1e-12,
                   help="contour refinement tolerance")
    p.add_argument("--abscissa", type=float, help="contour abscissa c")
    _add_common(p)

    p = sub.add_parser("density", help="density and CDF of a law")
    _add_law(p)
    _add_points(p)
    _add_common(p)

    p = sub.add_parser("sample", help="draw a sample batch")
    _add_law(p)
    p.add_argument("--N", type=int, default=1000)
    _add_common(p, seed=True, formats=("csv",))

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("--suite", choices=SUITES, default="all")
    p.add_argument("--a", type=_vector, help="parameter vector (theorem suites); "
                   "a single value for theorem-equal")
    p.add_argument("--n", type=int, help="order for theorem-equal")
    p.add_argument("--r", type=_vector, help="shape vector (stein, fixed-point, vn, wgn)")
    p.add_argument("--w", choices=("pg", "gamma", "point"), default="pg",
                   help="base law for the wgn suite")
    p.add_argument("--grid", type=parse_grid, help="x grid for the theorem suites")
    p.add_argument("--tol", type=float, help="replace each suite's tolerance")
    p.add_argument("--N", type=int, help="Monte Carlo sample size (default 1e5)")
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--timing", action="store_true",
                   help="record runtime_ms (otherwise null, so output is reproducible)")
    _add_common(p, seed=True)

    p = sub.add_parser("report", help="re-emit or summarise saved verification reports")
    p.add_argument("inputs", nargs="+", help="JSON files written by 'gbias verify'")
    p.add_argument("--summary", action="store_true", help="one line per report")
    _add_common(p)
    return parser


def _add_points(p):
    pts = p.add_mutually_exclusive_group(required=True)
    pts.add_argument("--x", type=_vector, help="evaluation point(s), comma separated")
    pts.add_argument("--grid", type=parse_grid, help="lo:hi:count (geometric) or a list")


# flags that exclude each other: a command-line choice hides the config's
_EXCLUSIVE = (
    {"--x", "--grid"},
    {"--g0n", "--gnn", "--pn"},
    {"--gamma", "--beta", "--pg", "--vn", "--pn", "--point", "--gbias"},
)


def _config_path(argv):
    for i, tok in enumerate(argv):
        if tok == "--config":
            if i + 1 >= len(argv):
                raise UsageError("--config needs a path")
            return argv[i + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def parse_args(argv):
    """Parse ``argv``; keys of the ``--config`` JSON file stand in for flags
    that are not given on the command line."""
    parser = build_parser()
    path = _config_path(argv)
    if path is None or not argv:
        return parser.parse_args(argv)
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}")
    if not isinstance(data, dict):
        raise UsageError("config must be a flat JSON object")
    given = {tok.split("=", 1)[0] for tok in argv if tok.startswith("--")}
    extra = []
    for key, val in data.items():
        flag = "--" + str(key).replace("_", "-").lstrip("-")
        if key in ("config", "command") or flag in given:
            continue
        if any(flag in grp and grp & given for grp in _EXCLUSIVE):
            continue
        if isinstance(val, bool):
            if val:
                extra.append(flag)
        elif isinstance(val, list):
            extra += [flag, ",".join(repr(float(v)) for v in val)]
        else:
            extra += [flag, str(val)]
    return parser.parse_args(argv[:1] + extra + argv[1:])


# ---------------------------------------------------------------------------
# output


def _points(args):
    return args.x if args.x is not None else args.grid


def _emit(args, text):
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _json(obj):
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _num(v):
    return None if v is None or not math.isfinite(v) else float(v)


# ---------------------------------------------------------------------------
# commands


def cmd_eval(args):
    xs = _points(args)
    if args.g0n:
        if args.a is None:
            raise UsageError("--g0n needs --a")
        kernel, params = "g0n", {"a": args.a}
        cfg = ContourConfig(abscissa=args.abscissa, tolerance=args.tolerance)
        fn = lambda x: eval_g_0n_with_error(x, args.a, cfg)
    elif args.gnn:
        if args.r is None:
            raise UsageError("--gnn needs --r")
        kernel, params = "gnn", {"r": args.r}
        fn = lambda x: eval_g_nn_beta_with_error(x, args.r)
    else:
        if args.n is None:
            raise UsageError("--pn needs --n")
        kernel, params = "pn", {"n": args.n}
        cfg = ContourConfig(abscissa=args.abscissa, tolerance=args.tolerance)
        fn = lambda x: pn_density_with_error(x, args.n, cfg)
    rows = []
    for x in xs:
        val, err = fn(x)
        rows.append({"x": float(x), "value": float(val), "error": float(err)})
    if args.format == "csv":
        _emit(args, _csv(["x", "value", "error"],
                         [[repr(r["x"]), repr(r["value"]), repr(r["error"])] for r in rows]))
    else:
        _emit(args, _json({"command": "eval", "kernel": kernel, "params": params,
                           "results": rows}))
    return EXIT_OK


def _law(args):
    r = args.r
    if args.pn:
        if args.n is None:
            raise UsageError("--pn needs --n")
        return ProductNormal(args.n)
    if args.point is not None:
        return PointMass(args.point)
    if r is None:
        raise UsageError("this law needs --r")
    if args.gamma:
        if len(r) != 1:
            raise UsageError("--gamma takes a single shape")
        return Gamma(r[0])
    if args.beta:
        if len(r) != 1:
            raise UsageError("--beta takes a single shape")
        return BetaR1(r[0])
    if args.pg:
        return ProductGamma(r)
    if args.vn:
        return ProductBetaVn(r)
    return GammaBiased(_base_law(args.w, r), r)


def _base_law(kind, r):
    if kind == "pg":
        return ProductGamma(r)
    if kind == "gamma":
        return Gamma(math.prod(r))
    return PointMass(math.prod(r))


def cmd_density(args):
    d = _law(args)
    rows = []
    for x in _points(args):
        try:
            p, perr = pdf_with_error(d, x)
        except GbiasError as exc:
            if isinstance(exc, ConvergenceError):
                raise
            p, perr = None, None
        F, ferr = cdf_with_error(d, x)
        rows.append({"x": float(x), "pdf": _num(p), "pdf_error": _num(perr),
                     "cdf": float(F), "cdf_error": float(ferr)})
    if args.format == "csv":
        fmt = lambda v: "" if v is None else repr(v)
        _emit(args, _csv(["x", "pdf", "pdf_error", "cdf", "cdf_error"],
                         [[fmt(r[k]) for k in ("x", "pdf", "pdf_error", "cdf", "cdf_error")]
                          for r in rows]))
    else:
        _emit(args, _json({"command": "density", "law": describe(d), "results": rows}))
    return EXIT_OK


def cmd_sample(args):
    d = _law(args)
    batch = sample(d, args.N, args.seed)
    if args.out:
        path, side = batch.to_csv(args.out)
        v = batch.values
        se = float(v.std(ddof=1) / math.sqrt(v.size)) if v.size > 1 else None
        sys.stdout.write(_json({"command": "sample", "csv": str(path), "sidecar": str(side),
                                **batch.sidecar(),
                                "sample_mean": float(v.mean()), "standard_error": se}))
    else:
        sys.stdout.write(_csv(["value"], [[repr(float(v))] for v in batch.values]))
    return EXIT_OK


def cmd_verify(args):
    kw = {"alpha": args.alpha, "tol": args.tol, "grid": args.grid}
    if args.N is not None:
        kw["n_samples"] = args.N
        kw["stein_samples"] = args.N
    suite = args.suite
    if args.a is not None:
        if suite == "theorem-equal":
            if len(args.a) != 1 or args.n is None:
                raise UsageError("theorem-equal takes a single --a and --n")
            kw["equal_suites"] = [(args.a[0], args.n)]
        elif suite in ("theorem-general", "theorem-distinct", "kernel"):
            kw["a_suites"] = [args.a]
        else:
            raise UsageError(f"--a does not apply to suite {suite}")
    elif args.n is not None and suite == "theorem-equal":
        kw["equal_suites"] = [(a, args.n) for a in (0.0, 0.5)]
    if args.r is not None:
        if suite == "wgn":
            kw["wgn_suites"] = [(_base_law(args.w, args.r), args.r)]
        elif suite in ("stein", "fixed-point", "vn"):
            kw["r_suites"] = [args.r]
        else:
            raise UsageError(f"--r does not apply to suite {suite}")
    reports = run_suite(suite, args.seed, **kw)
    passed = all(rep.verdict for rep in reports)
    if args.format == "csv":
        text = reports_to_csv(reports)
    else:
        text = _json({
            "suite": suite,
            "seed": args.seed,
            "verdict": "pass" if passed else "fail",
            "reports": [json.loads(rep.to_json(timing=args.timing)) for rep in reports],
        })
    _emit(args, text)
    for rep in reports:
        sys.stderr.write(rep.summary() + "\n")
    if any(rep.nonconvergent for rep in reports):
        return EXIT_NUMERIC
    return EXIT_OK if passed else EXIT_FAIL


def _load_reports(paths):
    reports = []
    for path in paths:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read report {path}: {exc}")
        items = data.get("reports", [data]) if isinstance(data, dict) else data
        try:
            reports += [report_from_dict(item) for item in items]
        except (KeyError, TypeError, AttributeError):
            raise UsageError(f"{path} is not a verification report")
    return reports


def cmd_report(args):
    reports = _load_reports(args.inputs)
    passed = all(rep.verdict for rep in reports)
    if args.summary:
        lines = [rep.summary() for rep in reports]
        lines.append(f"{'PASS' if passed else 'FAIL'} overall: "
                     f"{sum(rep.verdict for rep in reports)}/{len(reports)} reports")
        _emit(args, "\n".join(lines) + "\n")
    elif args.format == "csv":
        _emit(args, reports_to_csv(reports))
    else:
        _emit(args, _json({"verdict": "pass" if passed else "fail",
                           "reports": [json.loads(rep.to_json()) for rep in reports]}))
    return EXIT_OK if passed else EXIT_FAIL


COMMANDS = {"eval": cmd_eval, "density": cmd_density, "sample": cmd_sample,
            "verify": cmd_verify, "report": cmd_report}


def _error(kind, exc, code):
    sys.stderr.write(json.dumps({"error": kind, "message": str(exc), "exit_code": code}) + "\n")
    return code


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        return _error("UsageError", exc, EXIT_USAGE)
    except ConvergenceError as exc:
        return _error("ConvergenceError", exc, EXIT_NUMERIC)
    except GbiasError as exc:
        return _error(type(exc).__name__, exc, EXIT_USAGE)
    except (ValueError, OverflowError) as exc:
        return _error("DomainError", exc, EXIT_USAGE)


if __name__ == "__main__":
    sys.exit(main())
