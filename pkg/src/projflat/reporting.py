"""Report serialization: versioned JSON payloads, per-level CSV sup tables,
and atomic file writes.

All payloads are machine-diffable: keys are sorted, floats use shortest
round-trip repr, rows follow the graded-lex multi-index order, and values
outside double range are encoded as the strings ``"inf"``/``"-inf"``/``"nan"``
(strict JSON has no literals for them).  Identical inputs therefore produce
byte-identical files, whatever the worker count that computed them.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path

from .analysis import (
    CheckResult,
    ExtensionReport,
    FlatnessReport,
    SeminormReport,
    VerdictThresholds,
)
from .transport import DerivativeTable, TransportMatrix

SCHEMA = "projflat/1"

__all__ = [
    "SCHEMA",
    "encode_float",
    "dump_json",
    "write_text_atomic",
    "seminorm_payload",
    "seminorm_csv",
    "flatness_payload",
    "flatness_csv",
    "extension_payload",
    "extension_csv",
    "matrix_payload",
    "table_payload",
    "table_csv",
    "checks_payload",
]


def encode_float(value: float):
    value = float(value)
    return value if math.isfinite(value) else repr(value)


def _floats(values) -> list:
    return [encode_float(v) for v in values]


def dump_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_text_atomic(path: str | Path, text: str) -> None:
    """Write via a sibling temp file and rename, so readers never observe a
    half-written report."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)  # mkstemp's 0600 is not report-file policy
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv(header: list[str], rows: list[list]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(c) if isinstance(c, float) else str(c)
                              for c in row))
    return "\n".join(lines) + "\n"


def _thresholds_payload(thr: VerdictThresholds) -> dict:
    return {
        "growth_factor": thr.growth_factor,
        "abs_floor": thr.abs_floor,
        "decay_ceiling": thr.decay_ceiling,
    }


# -- seminorm classification -------------------------------------------------


def seminorm_payload(report: SeminormReport, expected: str | None = None) -> dict:
    payload = {
        "schema": SCHEMA,
        "kind": "seminorm-classification",
        # grid maxima under-estimate suprema: verdicts can err toward
        # "bounded", never toward "diverging"
        "sup_semantics": "grid-maximum lower bounds of the true suprema",
        "function": report.function,
        "dim": report.dim,
        "config": {
            "max_alpha": report.max_alpha,
            "max_beta": report.max_beta,
            "radii": list(report.radii),
            "points_per_axis": report.points_per_axis,
            "thresholds": _thresholds_payload(report.thresholds),
            "seed": report.seed,
        },
        "pairs": [
            {
                "alpha": list(entry.alpha),
                "beta": list(entry.beta),
                "sups": _floats(entry.sups),
                "verdict": entry.verdict,
            }
            for entry in report.pairs
        ],
        "verdict": report.verdict,
    }
    if expected is not None:
        payload["expected_class"] = expected
    return payload


def seminorm_csv(report: SeminormReport) -> str:
    rows = []
    edges = (0.0,) + report.radii
    for entry in report.pairs:
        for k, sup in enumerate(entry.sups):
            rows.append([
                " ".join(map(str, entry.alpha)),
                " ".join(map(str, entry.beta)),
                k,
                float(edges[k]),
                float(edges[k + 1]),
                float(sup),
            ])
    return _csv(["alpha", "beta", "annulus", "r_lo", "r_hi", "sup"], rows)


# -- flatness ----------------------------------------------------------------


def _flatness_body(report: FlatnessReport) -> dict:
    spec = report.spec
    series = []
    for p in range(spec.p_max + 1):
        for a_idx, alpha in enumerate(report.alphas):
            series.append({
                "p": p,
                "alpha": list(alpha),
                "sups": _floats(report.sups[:, p, a_idx]),
                "verdict": report.series_verdicts[p][a_idx],
            })
    return {
        "spec": {
            "chart_i": spec.chart_i,
            "chart_j": spec.chart_j,
            "base_point": list(spec.base_point),
            "radius": spec.radius,
            "p_max": spec.p_max,
            "order": spec.order,
            "levels": spec.levels,
            "samples_per_level": spec.samples_per_level,
            "seed": spec.seed,
        },
        "bands": [[lo, hi] for lo, hi in report.bands],
        "series": series,
        "verdict": report.verdict,
    }


def flatness_payload(report: FlatnessReport, function: str = "",
                     thresholds: VerdictThresholds | None = None) -> dict:
    payload = {
        "schema": SCHEMA,
        "kind": "flatness",
        "sup_semantics": "sample-maximum lower bounds; values outside double "
                         "range recorded as inf",
        "function": function,
    }
    if thresholds is not None:
        payload["thresholds"] = _thresholds_payload(thresholds)
    payload.update(_flatness_body(report))
    return payload


def _flatness_rows(report: FlatnessReport, prefix: list) -> list[list]:
    rows = []
    for p in range(report.spec.p_max + 1):
        for a_idx, alpha in enumerate(report.alphas):
            for m, (lo, hi) in enumerate(report.bands):
                rows.append(prefix + [
                    p,
                    " ".join(map(str, alpha)),
                    m,
                    float(lo),
                    float(hi),
                    float(report.sups[m, p, a_idx]),
                ])
    return rows


def flatness_csv(report: FlatnessReport) -> str:
    return _csv(["p", "alpha", "level", "band_lo", "band_hi", "sup"],
                _flatness_rows(report, []))


# -- extension ---------------------------------------------------------------


def extension_payload(report: ExtensionReport, expected: str | None = None) -> dict:
    payload = {
        "schema": SCHEMA,
        "kind": "extension",
        "sup_semantics": "sample-maximum lower bounds; values outside double "
                         "range recorded as inf",
        "function": report.function,
        "dim": report.dim,
        "chart_i": report.chart_i,
        "config": {
            "base_points_per_chart": report.config.base_points_per_chart,
            "base_range": list(report.config.base_range),
            "radius": report.config.radius,
            "p_max": report.config.p_max,
            "order": report.config.order,
            "levels": report.config.levels,
            "samples_per_level": report.config.samples_per_level,
            "seed": report.config.seed,
        },
        "thresholds": _thresholds_payload(report.thresholds),
        "runs": [
            {
                "chart_j": run.chart_j,
                "base_point": list(run.base_point),
                **_flatness_body(run.report),
            }
            for run in report.runs
        ],
        "verdict": report.verdict,
    }
    if expected is not None:
        payload["expected_class"] = expected
    return payload


def extension_csv(report: ExtensionReport) -> str:
    rows = []
    for idx, run in enumerate(report.runs):
        prefix = [run.chart_j, idx]
        rows.extend(_flatness_rows(run.report, prefix))
    return _csv(["chart_j", "run", "p", "alpha", "level", "band_lo", "band_hi", "sup"],
                rows)


# -- transport ---------------------------------------------------------------


def matrix_payload(matrix: TransportMatrix) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "transport-matrix",
        "chart_i": matrix.chart_i,
        "chart_j": matrix.chart_j,
        "point": list(matrix.point.coords),
        "matrix": [_floats(row) for row in matrix.entries],
    }


def table_payload(table: DerivativeTable, function: str = "",
                  chart_i: int | None = None, chart_j: int | None = None) -> dict:
    from .multiindex import enumerate_multiindices

    n = table.point.dim
    return {
        "schema": SCHEMA,
        "kind": "derivative-table",
        "function": function,
        "chart_i": chart_i,
        "chart_j": chart_j,
        "point": list(table.point.coords),
        "order": table.order,
        "entries": [
            {"alpha": list(alpha), "value": encode_float(table.values[alpha])}
            for alpha in enumerate_multiindices(n, table.order)
        ],
    }


def table_csv(table: DerivativeTable) -> str:
    from .multiindex import enumerate_multiindices

    rows = [[" ".join(map(str, alpha)), float(table.values[alpha])]
            for alpha in enumerate_multiindices(table.point.dim, table.order)]
    return _csv(["alpha", "value"], rows)


# -- atlas checks ------------------------------------------------------------


def checks_payload(results: list[CheckResult], n: int, seed: int) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "atlas-checks",
        "dim": n,
        "seed": seed,
        "checks": [
            {"name": r.name, "passed": r.passed, "max_error": encode_float(r.max_error)}
            for r in results
        ],
        "passed": all(r.passed for r in results),
    }
