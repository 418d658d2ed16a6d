"""Command-line front end.

Subcommands: ``atlas check``, ``classify``, ``seminorm``, ``flatness``,
``extend``, ``transport``, ``stereo``.  Reports go to ``--out`` (written
atomically: temp file + rename) or stdout; ``--format csv`` selects the
per-level sup table where one exists, ``--plot`` renders a PNG figure next to
the report file.

Exit codes: 0 completed (and, with ``--check``, the verdict matches the
corpus expectation), 1 verdict mismatch under ``--check``, 2 configuration
error.  The default sampling seed is 101, overridable with the
``PROJFLAT_SEED`` environment variable or ``--seed``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import analysis, atlas, plots, reporting
from .analysis import (
    DEFAULT_MAX_ALPHA,
    DEFAULT_MAX_BETA,
    DEFAULT_RADII,
    DEFAULT_SEED,
    ExtensionConfig,
    FlatnessSpec,
    SamplingGrid,
    VerdictThresholds,
)
from .fields import corpus_entry, corpus_names
from .transport import first_order_matrix, pushforward_derivatives

MAX_DIM = 6
MAX_ORDER = 6


def _parse_floats(text: str) -> list[float]:
    text = text.strip()
    if text.startswith("["):
        values = json.loads(text)
        if not isinstance(values, list):
            raise ValueError(f"expected a JSON array, got {text!r}")
        return [float(v) for v in values]
    return [float(part) for part in text.split(",") if part.strip() != ""]


def _parse_ints(text: str) -> list[int]:
    floats = _parse_floats(text)
    ints = [int(v) for v in floats]
    if any(i != v for i, v in zip(ints, floats)):
        raise ValueError(f"expected integers, got {text!r}")
    return ints


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ValueError(message)


def _budget(name: str, value: int, lo: int, hi: int) -> None:
    _require(lo <= value <= hi, f"{name}={value} outside supported range {lo}..{hi}")


def _thresholds(args) -> VerdictThresholds:
    return VerdictThresholds(
        growth_factor=args.growth_factor,
        abs_floor=args.abs_floor,
        decay_ceiling=args.decay_ceiling,
    )


def _corpus_field(args):
    try:
        return corpus_entry(args.function, args.n)
    except KeyError:
        raise ValueError(
            f"unknown function {args.function!r}; available: {', '.join(corpus_names())}"
        ) from None


def _emit(args, payload: dict | None, csv_text: str | None, plotter=None) -> None:
    fmt = getattr(args, "format", "json")
    if fmt == "csv":
        _require(csv_text is not None, "this subcommand has no CSV representation")
        text = csv_text
    else:
        text = reporting.dump_json(payload)
    out = getattr(args, "out", None)
    if out:
        reporting.write_text_atomic(out, text)
        if getattr(args, "plot", False):
            _require(plotter is not None, "this subcommand has no figure representation")
            plotter(Path(out).with_suffix(".png"))
    else:
        _require(not getattr(args, "plot", False), "--plot requires --out")
        sys.stdout.write(text)


def _add_output_options(parser, *, plot: bool, csv: bool) -> None:
    parser.add_argument("--out", help="report file path (default: stdout)")
    choices = ["json", "csv"] if csv else ["json"]
    parser.add_argument("--format", choices=choices, default="json",
                        help="report format (csv holds the sup table only)")
    if plot:
        parser.add_argument("--plot", action="store_true",
                            help="render a PNG figure next to the report file")


def _add_threshold_options(parser) -> None:
    parser.add_argument("--growth-factor", type=float, default=10.0,
                        help="divergence ratio threshold (default 10)")
    parser.add_argument("--abs-floor", type=float, default=1e-6,
                        help="suprema below this never count as divergence")
    parser.add_argument("--decay-ceiling", type=float, default=1e-3,
                        help="tails below this count as bounded")


# -- subcommand handlers -----------------------------------------------------


def _cmd_atlas(args) -> int:
    _budget("n", args.n, 1, MAX_DIM)
    results = analysis.atlas_checks(args.n, args.points, args.seed)
    payload = reporting.checks_payload(results, args.n, args.seed)
    _emit(args, payload, None)
    return 0 if payload["passed"] else 1


def _cmd_classify(args) -> int:
    _budget("n", args.n, 1, MAX_DIM)
    _budget("max-alpha", args.max_alpha, 0, MAX_ORDER)
    _budget("max-beta", args.max_beta, 0, MAX_ORDER)
    _budget("workers", args.workers, 1, 64)
    entry = _corpus_field(args)
    report = analysis.classify_schwartz(
        entry.field,
        args.max_alpha,
        args.max_beta,
        tuple(args.radii),
        points_per_axis=args.points_per_axis,
        thresholds=_thresholds(args),
        seed=args.seed,
        workers=args.workers,
    )
    payload = reporting.seminorm_payload(report, expected=entry.expected_class)
    _emit(args, payload, reporting.seminorm_csv(report),
          lambda p: plots.plot_seminorm(report, p))
    if args.check and not analysis.classification_matches(report.verdict,
                                                          entry.expected_class):
        print(f"check failed: verdict {report.verdict!r}, "
              f"expected class {entry.expected_class!r}", file=sys.stderr)
        return 1
    return 0


def _cmd_seminorm(args) -> int:
    _budget("n", args.n, 1, MAX_DIM)
    entry = _corpus_field(args)
    alpha, beta = _parse_ints(args.alpha), _parse_ints(args.beta)
    _require(len(alpha) == args.n and len(beta) == args.n,
             "alpha and beta must have one entry per dimension")
    _budget("|beta|", sum(beta), 0, MAX_ORDER)
    annulus = tuple(_parse_floats(args.annulus)) if args.annulus else None
    if annulus is not None:
        _require(len(annulus) == 2, "--annulus takes two radii")
    grid = SamplingGrid.symmetric(args.n, args.half_width, args.points_per_axis,
                                  annulus)
    value = analysis.estimate_seminorm(entry.field, alpha, beta, grid)
    payload = {
        "schema": reporting.SCHEMA,
        "kind": "seminorm-estimate",
        "function": entry.name,
        "dim": args.n,
        "alpha": alpha,
        "beta": beta,
        "grid": {
            "half_width": args.half_width,
            "points_per_axis": args.points_per_axis,
            "annulus": list(annulus) if annulus else None,
        },
        "sup_lower_bound": reporting.encode_float(value),
    }
    _emit(args, payload, None)
    return 0


def _make_flatness_spec(args, base: tuple[float, ...]) -> FlatnessSpec:
    return FlatnessSpec(
        chart_i=args.i,
        chart_j=args.j,
        base_point=base,
        radius=args.radius,
        p_max=args.p_max,
        order=args.order,
        levels=args.levels,
        samples_per_level=args.samples,
        seed=args.seed,
    )


def _cmd_flatness(args) -> int:
    _budget("n", args.n, 1, MAX_DIM)
    _budget("order", args.order, 1, MAX_ORDER)
    _budget("p-max", args.p_max, 0, MAX_ORDER)
    _budget("levels", args.levels, 1, 64)
    _budget("samples", args.samples, 4, 65536)
    _budget("workers", args.workers, 1, 64)
    entry = _corpus_field(args)
    base = tuple(_parse_floats(args.base)) if args.base else (0.0,) * args.n
    _require(len(base) == args.n, "base point must have one entry per dimension")
    spec = _make_flatness_spec(args, base)
    report = analysis.verify_flatness(entry.field, spec, thresholds=_thresholds(args),
                                      workers=args.workers)
    payload = reporting.flatness_payload(report, function=entry.name,
                                         thresholds=_thresholds(args))
    payload["expected_class"] = entry.expected_class
    _emit(args, payload, reporting.flatness_csv(report),
          lambda p: plots.plot_flatness(report, p, function=entry.name))
    if args.check and not analysis.flatness_matches(report.verdict,
                                                    entry.expected_class):
        print(f"check failed: verdict {report.verdict!r}, "
              f"expected class {entry.expected_class!r}", file=sys.stderr)
        return 1
    return 0


def _cmd_extend(args) -> int:
    _budget("n", args.n, 1, MAX_DIM)
    _budget("order", args.order, 1, MAX_ORDER)
    _budget("p-max", args.p_max, 0, MAX_ORDER)
    _budget("levels", args.levels, 1, 64)
    _budget("samples", args.samples, 4, 65536)
    _budget("base-points", args.base_points, 1, 64)
    _budget("workers", args.workers, 1, 64)
    _budget("i", args.i, 1, args.n + 1)
    entry = _corpus_field(args)
    base_range = tuple(_parse_floats(args.base_range))
    _require(len(base_range) == 2, "--base-range takes two numbers")
    config = ExtensionConfig(
        base_points_per_chart=args.base_points,
        base_range=base_range,
        radius=args.radius,
        p_max=args.p_max,
        order=args.order,
        levels=args.levels,
        samples_per_level=args.samples,
        seed=args.seed,
    )
    report = analysis.extension_report(entry.field, args.i, config,
                                       thresholds=_thresholds(args),
                                       workers=args.workers)
    payload = reporting.extension_payload(report, expected=entry.expected_class)
    _emit(args, payload, reporting.extension_csv(report),
          lambda p: plots.plot_extension(report, p))
    if args.check and not analysis.flatness_matches(report.verdict,
                                                    entry.expected_class):
        print(f"check failed: verdict {report.verdict!r}, "
              f"expected class {entry.expected_class!r}", file=sys.stderr)
        return 1
    return 0


def _cmd_transport(args) -> int:
    _budget("n", args.n, 1, MAX_DIM)
    coords = tuple(_parse_floats(args.point))
    _require(len(coords) == args.n, "--point must have one entry per dimension")
    point = atlas.AffinePoint(args.j, coords)
    if args.function is None:
        matrix = first_order_matrix(args.i, args.j, point)
        _emit(args, reporting.matrix_payload(matrix), None)
        return 0
    _budget("order", args.order, 0, MAX_ORDER)
    entry = _corpus_field(args)
    table = pushforward_derivatives(entry.field, args.i, args.j, point, args.order)
    payload = reporting.table_payload(table, function=entry.name,
                                      chart_i=args.i, chart_j=args.j)
    _emit(args, payload, reporting.table_csv(table))
    return 0


def _cmd_stereo(args) -> int:
    if args.to_plane:
        coords = _parse_floats(args.to_plane)
        _require(len(coords) >= 2, "a sphere point needs at least two coordinates")
        point = atlas.SpherePoint(tuple(coords))
        image = atlas.stereo(point)
        payload = {
            "schema": reporting.SCHEMA,
            "kind": "stereo",
            "direction": "sphere-to-plane",
            "input": list(point.coords),
            "output": [reporting.encode_float(v) for v in image],
        }
    else:
        coords = _parse_floats(args.to_sphere)
        point = atlas.stereo_inverse(coords)
        payload = {
            "schema": reporting.SCHEMA,
            "kind": "stereo",
            "direction": "plane-to-sphere",
            "input": coords,
            "output": [reporting.encode_float(v) for v in point.coords],
        }
    _emit(args, payload, None)
    return 0


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="projflat",
        description="Charts of real projective space, derivative transport, "
                    "rapid-decay classification, and flat-extension reports.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_atlas = sub.add_parser("atlas", help="atlas utilities")
    atlas_sub = p_atlas.add_subparsers(dest="atlas_command", required=True)
    p_check = atlas_sub.add_parser("check", help="run the atlas invariant suite")
    p_check.add_argument("--n", type=int, default=3, help="projective dimension")
    p_check.add_argument("--points", type=int, default=200)
    p_check.add_argument("--seed", type=int, default=DEFAULT_SEED)
    _add_output_options(p_check, plot=False, csv=False)
    p_check.set_defaults(handler=_cmd_atlas)

    p_classify = sub.add_parser(
        "classify", help="annulus-sup decay classification of a corpus function")
    p_classify.add_argument("--function", required=True)
    p_classify.add_argument("--n", type=int, required=True)
    p_classify.add_argument("--max-alpha", type=int, default=DEFAULT_MAX_ALPHA,
                            help="largest |alpha| weight order")
    p_classify.add_argument("--max-beta", type=int, default=DEFAULT_MAX_BETA,
                            help="largest |beta| derivative order")
    p_classify.add_argument("--radii", type=_parse_floats,
                            default=list(DEFAULT_RADII),
                            help="increasing annulus schedule (comma separated)")
    p_classify.add_argument("--points-per-axis", type=int, default=None)
    p_classify.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_classify.add_argument("--workers", type=int, default=1)
    p_classify.add_argument("--check", action="store_true",
                            help="exit 1 unless the verdict matches the corpus class")
    _add_threshold_options(p_classify)
    _add_output_options(p_classify, plot=True, csv=True)
    p_classify.set_defaults(handler=_cmd_classify)

    p_semi = sub.add_parser("seminorm", help="single seminorm sup estimate")
    p_semi.add_argument("--function", required=True)
    p_semi.add_argument("--n", type=int, required=True)
    p_semi.add_argument("--alpha", required=True, help="monomial multi-index")
    p_semi.add_argument("--beta", required=True, help="derivative multi-index")
    p_semi.add_argument("--half-width", type=float, default=10.0,
                        help="grid spans [-w, w] on every axis")
    p_semi.add_argument("--points-per-axis", type=int, default=101)
    p_semi.add_argument("--annulus", default=None, help="restrict to r_lo,r_hi")
    _add_output_options(p_semi, plot=False, csv=False)
    p_semi.set_defaults(handler=_cmd_seminorm)

    p_flat = sub.add_parser(
        "flatness", help="weighted-derivative flatness verification at one base point")
    p_flat.add_argument("--function", required=True)
    p_flat.add_argument("--n", type=int, required=True)
    p_flat.add_argument("--i", type=int, default=1, help="chart carrying the function")
    p_flat.add_argument("--j", type=int, default=2, help="chart carrying the boundary")
    p_flat.add_argument("--base", default=None,
                        help="boundary base point in chart-j coordinates")
    p_flat.add_argument("--radius", type=float, default=0.5)
    p_flat.add_argument("--p-max", type=int, default=3)
    p_flat.add_argument("--order", type=int, default=3)
    p_flat.add_argument("--levels", type=int, default=20)
    p_flat.add_argument("--samples", type=int, default=256)
    p_flat.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_flat.add_argument("--workers", type=int, default=1)
    p_flat.add_argument("--check", action="store_true")
    _add_threshold_options(p_flat)
    _add_output_options(p_flat, plot=True, csv=True)
    p_flat.set_defaults(handler=_cmd_flatness)

    p_ext = sub.add_parser(
        "extend", help="flatness sweep over every adjacent chart boundary")
    p_ext.add_argument("--function", required=True)
    p_ext.add_argument("--n", type=int, required=True)
    p_ext.add_argument("--i", type=int, default=1)
    p_ext.add_argument("--base-points", type=int, default=8,
                       help="boundary base points per chart")
    p_ext.add_argument("--base-range", default="-2,2")
    p_ext.add_argument("--radius", type=float, default=0.5)
    p_ext.add_argument("--p-max", type=int, default=3)
    p_ext.add_argument("--order", type=int, default=3)
    p_ext.add_argument("--levels", type=int, default=20)
    p_ext.add_argument("--samples", type=int, default=256)
    p_ext.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_ext.add_argument("--workers", type=int, default=1)
    p_ext.add_argument("--check", action="store_true")
    _add_threshold_options(p_ext)
    _add_output_options(p_ext, plot=True, csv=True)
    p_ext.set_defaults(handler=_cmd_extend)

    p_trans = sub.add_parser(
        "transport", help="transport matrix or pushforward derivative table")
    p_trans.add_argument("--n", type=int, required=True)
    p_trans.add_argument("--i", type=int, required=True)
    p_trans.add_argument("--j", type=int, required=True)
    p_trans.add_argument("--point", required=True, help="chart-j coordinates")
    p_trans.add_argument("--function", default=None,
                         help="emit the derivative table of this corpus function")
    p_trans.add_argument("--order", type=int, default=3)
    _add_output_options(p_trans, plot=False, csv=True)
    p_trans.set_defaults(handler=_cmd_transport)

    p_stereo = sub.add_parser("stereo", help="stereographic projection either way")
    direction = p_stereo.add_mutually_exclusive_group(required=True)
    direction.add_argument("--to-plane", help="sphere point (y first)")
    direction.add_argument("--to-sphere", help="point of R^n")
    _add_output_options(p_stereo, plot=False, csv=False)
    p_stereo.set_defaults(handler=_cmd_stereo)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
