"""Figure rendering for report files.

Each report kind gets one PNG showing its sup sequences on a log scale, saved
next to the delimited output.  matplotlib is imported lazily with the Agg
backend so headless runs and library users that never plot pay nothing.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .analysis import ExtensionReport, FlatnessReport, SeminormReport


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    return plt


def _plot_series(ax, x, sups, label):
    y = np.asarray(sups, float)
    mask = np.isfinite(y) & (y > 0.0)
    if not np.any(mask):
        return
    ax.plot(np.asarray(x)[mask], y[mask], marker=".", lw=1.0, label=label)


def plot_seminorm(report: SeminormReport, path: str | Path) -> Path:
    """Annulus sups against outer radius, one line per (alpha, beta) pair."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    many = len(report.pairs) > 24
    for entry in report.pairs:
        label = None if many else f"a={tuple(entry.alpha)} b={tuple(entry.beta)}"
        _plot_series(ax, report.radii, entry.sups, label)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("annulus outer radius")
    ax.set_ylabel("sup |x^a d^b f|")
    ax.set_title(f"{report.function} (n={report.dim}): {report.verdict}")
    if not many:
        ax.legend(fontsize=7, ncol=2)
    return _save(fig, path)


def plot_flatness(report: FlatnessReport, path: str | Path, function: str = "") -> Path:
    """Band sups against the outer band edge, one line per (p, alpha)."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    edges = [hi for _, hi in report.bands]
    n_series = (report.spec.p_max + 1) * len(report.alphas)
    many = n_series > 24
    for p in range(report.spec.p_max + 1):
        for a_idx, alpha in enumerate(report.alphas):
            label = None if many else f"p={p} a={tuple(alpha)}"
            _plot_series(ax, edges, report.sups[:, p, a_idx], label)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.invert_xaxis()  # reading left to right walks toward the hyperplane
    ax.set_xlabel("band outer edge |t_d|")
    ax.set_ylabel("sup |t_d^-p d^a g|")
    title = f"charts ({report.spec.chart_i},{report.spec.chart_j}): {report.verdict}"
    ax.set_title(f"{function} {title}".strip())
    if not many:
        ax.legend(fontsize=7, ncol=2)
    return _save(fig, path)


def plot_extension(report: ExtensionReport, path: str | Path) -> Path:
    """Worst-case band sup per run, one line per (chart, base point)."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for idx, run in enumerate(report.runs):
        worst = np.max(run.report.sups.reshape(run.report.sups.shape[0], -1), axis=1)
        edges = [hi for _, hi in run.report.bands]
        _plot_series(ax, edges, worst, f"j={run.chart_j} #{idx}: {run.report.verdict}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.invert_xaxis()
    ax.set_xlabel("band outer edge |t_d|")
    ax.set_ylabel("max over (p, alpha) of band sup")
    ax.set_title(f"{report.function} (n={report.dim}, chart {report.chart_i}): "
                 f"{report.verdict}")
    ax.legend(fontsize=7)
    return _save(fig, path)


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    import matplotlib.pyplot as plt

    plt.close(fig)
    return path
