"""Command-line front end.

Exit codes: 0 success, 1 reproduction failure, 2 invalid input,
3 hypothesis violation (values reported as null with reasons), 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from pathlib import Path

import numpy as np

from . import carpet, dimest, driftfn, figures, fbm, io, reproduce
from ._validation import HypothesisError

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_HYPOTHESIS, EXIT_IO = 0, 1, 2, 3, 4

BUILTIN_SYSTEMS = {"ab": driftfn.ab_system}


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def load_system(spec: str) -> carpet.LabeledSystem:
    """A pattern/system JSON path, or the name of a built-in system."""
    if spec in BUILTIN_SYSTEMS:
        return BUILTIN_SYSTEMS[spec]()
    return io.load_system(spec)


_RANGE = re.compile(r"^\s*(\d+(?:\.\d+)?)\^-(\d+)\s*\.\.\s*(?:\1\^)?-(\d+)\s*$")


def parse_scales(text: str) -> list[float]:
    """``"0.1,0.05,0.01"`` or a geometric range such as ``"2^-5..2^-12"``."""
    m = _RANGE.match(text)
    if m:
        base, a, b = float(m.group(1)), int(m.group(2)), int(m.group(3))
        step = 1 if b >= a else -1
        return [base ** -k for k in range(a, b + step, step)]
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse scales {text!r}") from None


def parse_levels(text: str) -> list[int]:
    """``"1..8"`` or ``"1,2,3"``."""
    if ".." in text:
        a, b = text.split("..", 1)
        return list(range(int(a), int(b) + 1))
    return [int(v) for v in text.split(",") if v.strip()]


def _hurst(text: str) -> float:
    try:
        H = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid Hurst index {text!r}") from None
    if not 0 < H < 1:
        raise argparse.ArgumentTypeError(f"Hurst index must lie in (0, 1), got {H}")
    return H


def _emit_json(doc, out) -> None:
    text = json.dumps(io.round_json(doc), indent=2) + "\n"
    _emit_text(text, out)


def _emit_text(text: str, out) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="")
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# subcommands


def _guarded(fn, *args):
    """``(value, status)``; ``status`` names the hypothesis when it fails."""
    try:
        return fn(*args), {"ok": True}
    except HypothesisError as exc:
        return None, {"ok": False, "reason": str(exc), "condition": exc.condition}


def cmd_dims(args) -> int:
    s = load_system(args.system)
    H = args.hurst
    graph = s.is_function_graph
    report, status = {}, {}
    report["hausdorff"], status["hausdorff"] = _guarded(carpet.hausdorff_dim_carpet, s)
    report["minkowski"], status["minkowski"] = _guarded(carpet.minkowski_dim_carpet, s)
    report["parabolic"], status["parabolic"] = _guarded(carpet.parabolic_dim_carpet, s, H)
    if not status["parabolic"]["ok"]:
        status["parabolic"]["reason"] = "log_n(m) >= H: " + status["parabolic"]["reason"]
    alpha = report["parabolic"]
    if alpha is None:
        report["image"] = None
        status["image"] = {"ok": False, "reason": "needs the parabolic dimension",
                           "condition": "log_n(m) < H"}
    else:
        report["image"] = carpet.image_dim_from_alpha(alpha, H)
        status["image"] = {"ok": True}
    na = {"ok": False, "reason": "pattern is not a function graph", "condition": "not-applicable"}
    if graph:
        report["perturbed_graph"], status["perturbed_graph"] = _guarded(
            carpet.perturbed_graph_dim_carpet, s, H)
        cmp_, status["comparison"] = _guarded(carpet.dimension_comparison, s, H)
        report["comparison"] = None if cmp_ is None else cmp_.as_dict()
    else:
        report["perturbed_graph"], status["perturbed_graph"] = None, dict(na)
        report["comparison"], status["comparison"] = None, dict(na)
    report["hurst"] = H
    report["status"] = status
    violated = [k for k, v in status.items()
                if not v["ok"] and v.get("condition") != "not-applicable"]
    if args.format == "table":
        lines = [f"{k:16s} {'null' if report[k] is None else format(report[k], '.15g')}"
                 f"{'' if status[k]['ok'] else '  (' + status[k]['reason'] + ')'}"
                 for k in ("hausdorff", "minkowski", "parabolic", "perturbed_graph", "image")]
        _emit_text("\n".join(lines) + "\n", args.out)
    else:
        _emit_json(report, args.out)
    for k in violated:
        print(f"{k}: {status[k]['reason']}", file=sys.stderr)
    return EXIT_HYPOTHESIS if violated else EXIT_OK


def cmd_eval(args) -> int:
    s = load_system(args.system)
    try:
        x = driftfn.as_fraction(args.x)
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError(f"invalid x {args.x!r}: {exc}", EXIT_INPUT) from None
    br = driftfn.eval_f(s, x, args.depth)
    doc = {"x": str(x), "depth": args.depth, "lo": float(br.lo), "hi": float(br.hi),
           "lo_exact": str(br.lo), "hi_exact": str(br.hi)}
    _emit_json(doc, args.out)
    return EXIT_OK


def cmd_sample(args) -> int:
    N = args.points
    if args.drift:
        s = load_system(args.drift)
        t, x, f = fbm.sample_perturbed_graph(s, args.hurst, N, args.seed, args.depth,
                                             args.method)
        header, cols = ["t", "x", "f", "x+f"], [t, x, f, x + f]
    else:
        path = fbm.sample_fbm(args.hurst, N, args.seed, args.method)
        header, cols = ["t", "x"], [path.times, path.values]
    if args.out:
        io.write_csv(header, cols, args.out)
        print(args.out)
    else:
        io.write_csv(header, cols, sys.stdout)
    return EXIT_OK


def _graph_points(cols: dict, column: str) -> np.ndarray:
    if "t" not in cols or column not in cols:
        raise CliError(f"points CSV needs columns 't' and {column!r}; "
                       f"found {', '.join(cols)}", EXIT_INPUT)
    return np.column_stack([cols["t"], cols[column]])


def cmd_estimate(args) -> int:
    if (args.input is None) == (args.system is None):
        raise CliError("give exactly one of --in or --system", EXIT_INPUT)
    if args.system:
        s = load_system(args.system)
        if args.mode != "euclidean":
            raise CliError("exact carpet counts are euclidean only", EXIT_INPUT)
        sc = dimest.carpet_scale_counts(s, parse_levels(args.levels))
        report = dimest.fit_dimension(sc, method="carpet:exact")
        doc = report.as_dict()
    else:
        if args.scales is None:
            raise CliError("--scales is required with --in", EXIT_INPUT)
        cols = io.read_csv_columns(args.input)
        column = args.column or list(cols)[-1]
        pts = _graph_points(cols, column)
        report = dimest.empirical_dim_graph(pts, args.scales, args.hurst, args.mode,
                                            connect=not args.points_only)
        doc = report.as_dict()
        doc["column"] = column
        if args.compare:
            other = dimest.empirical_dim_graph(_graph_points(cols, args.compare), args.scales,
                                               args.hurst, args.mode,
                                               connect=not args.points_only)
            doc["compare"] = {"column": args.compare, "estimate": other.estimate,
                              "difference": report.estimate - other.estimate}
        sc = report.scales_used
    if args.counts_out:
        io.write_csv(["delta", "count"], [sc.deltas, sc.counts], args.counts_out)
    _emit_json(doc, args.out)
    return EXIT_OK


def _parse_tol(items) -> dict:
    out = {}
    for item in items or []:
        key, _, value = item.partition("=")
        if key not in reproduce.DEFAULT_TOLERANCES or not value:
            raise CliError(f"unknown tolerance {item!r}; keys: "
                           f"{', '.join(reproduce.DEFAULT_TOLERANCES)}", EXIT_INPUT)
        out[key] = type(reproduce.DEFAULT_TOLERANCES[key])(float(value))
    return out


def cmd_reproduce(args) -> int:
    tol = _parse_tol(args.tol)
    targets = reproduce.TARGETS if args.target == "all" else (args.target,)
    ok = True
    docs = {}
    for target in targets:
        checks = reproduce.run_target(target, tol)
        ok &= all(c.passed for c in checks)
        if args.format == "json":
            docs[target] = [c.as_dict() for c in checks]
        else:
            print(reproduce.format_table(target, checks))
    if args.format == "json":
        _emit_json(docs, None)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_figure(args) -> int:
    s = load_system(args.system)
    if args.target == "patterns":
        svg = figures.patterns_svg(s)
    elif args.target == "carpet":
        svg = figures.carpet_svg(s, args.gen)
    else:
        if args.seed is None:
            raise CliError("the path figure needs --seed", EXIT_INPUT)
        svg = figures.path_svg(s, args.hurst, args.points, args.seed)
    _emit_text(svg, args.out)
    return EXIT_OK


# --------------------------------------------------------------------------


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fbmdrift",
        description="Dimensions of fractional Brownian motion plus a self-affine drift.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dims", help="closed-form dimensions of a pattern or labelled system")
    p.add_argument("system", help="pattern/system JSON file or built-in name (ab)")
    p.add_argument("--hurst", type=_hurst, default=0.5)
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_dims)

    p = sub.add_parser("eval-f", help="bracket f(x) from a digit expansion")
    p.add_argument("system")
    p.add_argument("--x", required=True, help="decimal or p/q rational in [0, 1]")
    p.add_argument("--depth", type=_positive_int, default=10)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sample", help="sample an fBm path, optionally plus a drift")
    p.add_argument("--hurst", type=_hurst, required=True)
    p.add_argument("--points", type=_positive_int, required=True,
                   help="number of increments N (N + 1 rows)")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--drift", help="system JSON file or built-in name for f")
    p.add_argument("--depth", type=_positive_int)
    p.add_argument("--method", choices=("circulant", "dense"))
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("estimate", help="box-counting dimension fit")
    p.add_argument("--in", dest="input", help="points CSV with a 't' column")
    p.add_argument("--column", help="value column (default: last)")
    p.add_argument("--compare", help="second column fitted at the same scales")
    p.add_argument("--system", help="exact carpet counts for this system")
    p.add_argument("--levels", default="1..8", help="generations for --system, e.g. 1..8")
    p.add_argument("--mode", choices=("euclidean", "parabolic"), default="euclidean")
    p.add_argument("--scales", type=parse_scales, help="e.g. 2^-5..2^-12 or 0.1,0.05,0.02")
    p.add_argument("--hurst", type=_hurst, default=0.5)
    p.add_argument("--points-only", action="store_true",
                   help="count cells holding samples instead of the interpolated graph")
    p.add_argument("--counts-out", help="write the delta,count table here")
    p.add_argument("--out")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("reproduce", help="check the reference numbers")
    p.add_argument("target", choices=reproduce.TARGETS + ("all",))
    p.add_argument("--tol", action="append", metavar="KEY=VALUE",
                   help="override a tolerance from the defaults table")
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("figure", help="deterministic SVG figures")
    p.add_argument("target", choices=("patterns", "carpet", "path"))
    p.add_argument("--system", default="ab")
    p.add_argument("--gen", type=_positive_int, default=3)
    p.add_argument("--seed", type=int)
    p.add_argument("--hurst", type=_hurst, default=0.5)
    p.add_argument("--points", type=_positive_int, default=2**12)
    p.add_argument("--out")
    p.set_defaults(func=cmd_figure)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except HypothesisError as exc:
        print(f"hypothesis violated: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, MemoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
