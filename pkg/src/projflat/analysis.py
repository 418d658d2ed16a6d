"""Rapid-decay (Schwartz) seminorm estimation and flat-extension verification.

Decay classification discretizes the seminorm suprema ``sup |x^alpha
(d^beta f)(x)|`` over a schedule of concentric annuli; flatness verification
discretizes the weighted suprema ``sup |t_d^{-p} (d^alpha g)(t)|`` over dyadic
bands ``|t_d| in [r 2^{-m-1}, r 2^{-m}]`` shrinking onto the hyperplane at
infinity.  Both report grid/sample maxima, which are *lower bounds* of the
true suprema: verdicts can therefore err on the side of "bounded", never on
the side of "diverging".

Sample values that leave the double-precision range (overflow to inf, or nan
produced downstream of an overflow) are recorded as ``+inf`` band suprema and
count as divergence evidence.

All sampling is deterministic given the seed, and sweeps combine only through
max-merges, so results are independent of the worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import atlas
from .atlas import transition_divisor_axis
from .fields import NOT_SCHWARTZ, SCHWARTZ, ScalarField, builtin_corpus
from .jets import extract_partial, jet_space
from .multiindex import MultiIndex, enumerate_multiindices
from .transport import first_order_matrix, pushforward_jet

__all__ = [
    "BOUNDED",
    "DIVERGING",
    "INCONCLUSIVE",
    "FLAT_CONSISTENT",
    "SCHWARTZ_CONSISTENT",
    "DEFAULT_SEED",
    "DEFAULT_RADII",
    "DEFAULT_MAX_ALPHA",
    "DEFAULT_MAX_BETA",
    "VerdictThresholds",
    "SamplingGrid",
    "PairSeries",
    "SeminormReport",
    "FlatnessSpec",
    "FlatnessReport",
    "ExtensionConfig",
    "ExtensionRun",
    "ExtensionReport",
    "estimate_seminorm",
    "classify_schwartz",
    "verify_flatness",
    "extension_report",
    "classification_matches",
    "flatness_matches",
    "default_points_per_axis",
    "atlas_checks",
]

BOUNDED = "bounded"
DIVERGING = "diverging"
INCONCLUSIVE = "inconclusive"
FLAT_CONSISTENT = "flat-consistent"
SCHWARTZ_CONSISTENT = "schwartz-consistent"

# Overridable through PROJFLAT_SEED; every sampled report echoes the value used.
DEFAULT_SEED = int(os.environ.get("PROJFLAT_SEED", "101"))

# Classification defaults.  The outermost radius keeps order-3 jets of the
# oscillatory corpus entry inside double range (its third derivative carries
# e^{3 x^2}); the order budgets are high enough that every polynomial-rate
# decay failure in the corpus outruns the x16-per-octave growth threshold.
DEFAULT_RADII = (1.5, 3.0, 6.0, 12.0)
DEFAULT_MAX_ALPHA = 6
DEFAULT_MAX_BETA = 3


@dataclass(frozen=True)
class VerdictThresholds:
    """Decision constants for the sup-sequence verdicts.

    growth_factor
        A final supremum beyond this multiple of the earlier ones counts as
        divergence (together with the absolute floor).
    abs_floor
        Suprema below this never count as divergence, whatever their ratios.
    decay_ceiling
        A tail that has fallen below this (and keeps falling) counts as
        bounded.
    """

    growth_factor: float = 10.0
    abs_floor: float = 1e-6
    decay_ceiling: float = 1e-3

    def __post_init__(self):
        if self.growth_factor <= 1.0:
            raise ValueError("growth factor must exceed 1")
        if self.abs_floor <= 0.0 or self.decay_ceiling <= 0.0:
            raise ValueError("thresholds must be positive")


DEFAULT_THRESHOLDS = VerdictThresholds()


def default_points_per_axis(dim: int) -> int:
    return {1: 4097, 2: 129, 3: 33}.get(dim, 9)


# ---------------------------------------------------------------------------
# seminorm estimation


@dataclass(frozen=True)
class SamplingGrid:
    """Deterministic product grid, optionally restricted to an annulus.

    ``ranges`` gives one (lo, hi) interval per axis sampled with
    ``points_per_axis`` equispaced points including both endpoints;
    ``annulus = (r_lo, r_hi)`` keeps only points with Euclidean norm in that
    closed interval.
    """

    dim: int
    ranges: tuple[tuple[float, float], ...]
    points_per_axis: int
    annulus: tuple[float, float] | None = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("grid dimension must be >= 1")
        if len(self.ranges) != self.dim:
            raise ValueError("need one range per axis")
        for lo, hi in self.ranges:
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise ValueError(f"bad axis range ({lo}, {hi})")
        if self.points_per_axis < 2:
            raise ValueError("points per axis must be >= 2")
        if self.annulus is not None:
            r_lo, r_hi = self.annulus
            if not 0.0 <= r_lo < r_hi:
                raise ValueError(f"bad annulus ({r_lo}, {r_hi})")

    @staticmethod
    def symmetric(dim: int, half_width: float, points_per_axis: int,
                  annulus: tuple[float, float] | None = None) -> "SamplingGrid":
        return SamplingGrid(dim, ((-half_width, half_width),) * dim,
                            points_per_axis, annulus)

    def points(self) -> np.ndarray:
        """All grid points as an array of shape (dim, npoints)."""
        axes = [np.linspace(lo, hi, self.points_per_axis) for lo, hi in self.ranges]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh])
        if self.annulus is not None:
            r_lo, r_hi = self.annulus
            rsq = np.einsum("ij,ij->j", pts, pts)
            pts = pts[:, (rsq >= r_lo * r_lo) & (rsq <= r_hi * r_hi)]
        return pts


def _abs_or_inf(values: np.ndarray) -> np.ndarray:
    return np.where(np.isfinite(values), np.abs(values), np.inf)


def _monomial(pts: np.ndarray, alpha: MultiIndex) -> np.ndarray:
    out = np.ones(pts.shape[1])
    for axis, power in enumerate(alpha):
        if power:
            out = out * pts[axis] ** power
    return out


def estimate_seminorm(f: ScalarField, alpha, beta, grid: SamplingGrid) -> float:
    """Grid maximum of ``|x^alpha (d^beta f)(x)|``.

    A lower bound of the true supremum: refining the grid (a superset of
    points) can only increase the estimate.
    """
    alpha, beta = MultiIndex(alpha), MultiIndex(beta)
    if len(alpha) != f.dim or len(beta) != f.dim:
        raise ValueError("alpha/beta dimension must match the field")
    if grid.dim != f.dim:
        raise ValueError("grid dimension must match the field")
    pts = grid.points()
    if pts.shape[1] == 0:
        return 0.0
    cols = list(pts)
    with np.errstate(all="ignore"):
        if beta.order == 0:
            deriv = f.eval_grid(cols)
        else:
            deriv = np.asarray(extract_partial(f.eval_jet(cols, beta.order), beta))
        weighted = _monomial(pts, alpha) * _abs_or_inf(deriv)
    return float(np.max(_abs_or_inf(weighted)))


@dataclass(frozen=True)
class PairSeries:
    """Per-annulus suprema for one (alpha, beta) seminorm pair."""

    alpha: MultiIndex
    beta: MultiIndex
    sups: tuple[float, ...]
    verdict: str


@dataclass(frozen=True)
class SeminormReport:
    """Annulus-sup table and verdicts for one field.

    ``pairs`` is ordered graded-lex in alpha, then graded-lex in beta; this
    ordering is part of the report file contract.
    """

    function: str
    dim: int
    max_alpha: int
    max_beta: int
    radii: tuple[float, ...]
    points_per_axis: int
    thresholds: VerdictThresholds
    seed: int
    pairs: tuple[PairSeries, ...]
    verdict: str

    def pair(self, alpha, beta) -> PairSeries:
        alpha, beta = MultiIndex(alpha), MultiIndex(beta)
        for entry in self.pairs:
            if entry.alpha == alpha and entry.beta == beta:
                return entry
        raise KeyError((alpha, beta))


def _decay_series_verdict(sups: np.ndarray, thr: VerdictThresholds) -> str:
    if not np.all(np.isfinite(sups)):
        return DIVERGING
    last = sups[-1]
    if last > thr.growth_factor * float(np.max(sups[:-1])) and last > thr.abs_floor:
        return DIVERGING
    tail = sups[-max(2, len(sups) // 2):]
    if last < thr.decay_ceiling and np.all(np.diff(tail) <= 0.0):
        return BOUNDED
    return INCONCLUSIVE


def _annulus_sups(f: ScalarField, pts: np.ndarray,
                  alphas: Sequence[MultiIndex], betas: Sequence[MultiIndex],
                  max_beta: int) -> np.ndarray:
    """Max of |x^alpha d^beta f| over one point set, for all pairs at once."""
    sups = np.zeros((len(alphas), len(betas)))
    if pts.shape[1] == 0:
        return sups
    cols = list(pts)
    with np.errstate(all="ignore"):
        if max_beta == 0:
            derivs = [_abs_or_inf(f.eval_grid(cols))]
        else:
            jet = f.eval_jet(cols, max_beta)
            derivs = [_abs_or_inf(np.asarray(extract_partial(jet, beta)))
                      for beta in betas]
        for a_idx, alpha in enumerate(alphas):
            mono = np.abs(_monomial(pts, alpha))
            for b_idx, deriv in enumerate(derivs):
                sups[a_idx, b_idx] = np.max(_abs_or_inf(mono * deriv))
    return sups


def classify_schwartz(
    f: ScalarField,
    max_alpha: int = DEFAULT_MAX_ALPHA,
    max_beta: int = DEFAULT_MAX_BETA,
    radii: Sequence[float] = DEFAULT_RADII,
    *,
    points_per_axis: int | None = None,
    thresholds: VerdictThresholds = DEFAULT_THRESHOLDS,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    function_name: str | None = None,
) -> SeminormReport:
    """Annulus-sup decay classification of ``f``.

    For every pair ``|alpha| <= max_alpha``, ``|beta| <= max_beta`` the
    suprema of ``|x^alpha (d^beta f)(x)|`` are estimated over the annuli
    ``R_{k-1} <= |x| <= R_k`` (with ``R_0 = 0``) of the increasing schedule
    ``radii``, then turned into per-pair verdicts: ``diverging`` when the last
    annulus supremum exceeds ``growth_factor`` times every earlier one (and
    the absolute floor), ``bounded`` when the tail has dropped below the decay
    ceiling and is non-increasing, ``inconclusive`` otherwise.  The function
    verdict is ``not-schwartz`` on any divergence, ``schwartz-consistent``
    when every pair is bounded, ``inconclusive`` otherwise.

    The sweep is pure grid evaluation: identical inputs give bit-identical
    reports for every ``workers`` count.
    """
    radii = tuple(float(r) for r in radii)
    if len(radii) < 3:
        raise ValueError("need at least three radii")
    if any(r <= 0 for r in radii) or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be positive and strictly increasing")
    if max_alpha < 0 or max_beta < 0:
        raise ValueError("order budgets must be >= 0")
    ppa = points_per_axis if points_per_axis is not None else default_points_per_axis(f.dim)
    alphas = enumerate_multiindices(f.dim, max_alpha)
    betas = enumerate_multiindices(f.dim, max_beta)
    if max_beta >= 1:
        jet_space(f.dim, max_beta)  # warm the shared table before any fan-out

    edges = (0.0,) + radii

    def annulus_job(k: int) -> np.ndarray:
        grid = SamplingGrid.symmetric(f.dim, radii[k], ppa, (edges[k], edges[k + 1]))
        return _annulus_sups(f, grid.points(), alphas, betas, max_beta)

    per_annulus = list(_ordered_map(annulus_job, range(len(radii)), workers))
    stacked = np.stack(per_annulus)  # (L, n_alpha, n_beta)

    pairs = []
    any_diverging = False
    all_bounded = True
    for a_idx, alpha in enumerate(alphas):
        for b_idx, beta in enumerate(betas):
            series = stacked[:, a_idx, b_idx]
            verdict = _decay_series_verdict(series, thresholds)
            any_diverging |= verdict == DIVERGING
            all_bounded &= verdict == BOUNDED
            pairs.append(PairSeries(alpha, beta, tuple(float(s) for s in series), verdict))

    if any_diverging:
        overall = NOT_SCHWARTZ
    elif all_bounded:
        overall = SCHWARTZ_CONSISTENT
    else:
        overall = INCONCLUSIVE
    return SeminormReport(
        function=function_name if function_name is not None else f.name,
        dim=f.dim,
        max_alpha=max_alpha,
        max_beta=max_beta,
        radii=radii,
        points_per_axis=ppa,
        thresholds=thresholds,
        seed=seed,
        pairs=tuple(pairs),
        verdict=overall,
    )


def classification_matches(verdict: str, expected_class: str) -> bool:
    wanted = SCHWARTZ_CONSISTENT if expected_class == SCHWARTZ else NOT_SCHWARTZ
    return verdict == wanted


def flatness_matches(verdict: str, expected_class: str) -> bool:
    wanted = FLAT_CONSISTENT if expected_class == SCHWARTZ else DIVERGING
    return verdict == wanted


# ---------------------------------------------------------------------------
# flat-extension verification


@dataclass(frozen=True)
class FlatnessSpec:
    """What to verify: the chart pair, the boundary base point, and the
    sampling budget.

    ``base_point`` is given in chart-``chart_j`` coordinates and must sit
    exactly on the hyperplane at infinity of chart ``chart_i`` (its divisor
    coordinate exactly 0.0).  Level ``m`` samples the dyadic band
    ``|t_d| in [radius 2^{-m-1}, radius 2^{-m}]`` inside the ball of
    ``radius`` around the base point: four deterministic anchors on the band
    edges, the rest seeded-uniform (magnitude uniform in the band, remaining
    coordinates uniform in the admissible ball section).
    """

    chart_i: int
    chart_j: int
    base_point: tuple[float, ...]
    radius: float = 0.5
    p_max: int = 3
    order: int = 3
    levels: int = 20
    samples_per_level: int = 256
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        n = len(self.base_point)
        if n < 1:
            raise ValueError("base point needs at least one coordinate")
        for idx, name in ((self.chart_i, "chart_i"), (self.chart_j, "chart_j")):
            if not 1 <= idx <= n + 1:
                raise ValueError(f"{name}={idx} out of range 1..{n + 1}")
        if self.chart_i == self.chart_j:
            raise ValueError("flatness needs two distinct charts")
        if self.base_point[self.boundary_axis] != 0.0:
            raise ValueError(
                "base point must lie exactly on the boundary hyperplane "
                f"(coordinate {self.boundary_axis} of {self.base_point})"
            )
        if not self.radius > 0.0:
            raise ValueError("radius must be positive")
        if self.p_max < 0 or self.order < 1:
            raise ValueError("need p_max >= 0 and order >= 1")
        if self.levels < 1:
            raise ValueError("need at least one level")
        if self.samples_per_level < 4:
            raise ValueError("need at least the four anchor samples per level")

    @property
    def boundary_axis(self) -> int:
        return transition_divisor_axis(self.chart_i, self.chart_j)

    def band(self, level: int) -> tuple[float, float]:
        return (self.radius * 2.0 ** (-(level + 1)), self.radius * 2.0 ** (-level))


@dataclass(frozen=True, eq=False)
class FlatnessReport:
    """Per-(p, alpha) band-sup sequences with verdicts.

    ``sups[m, p, a]`` is the level-``m`` supremum of
    ``|t_d^{-p} (d^alpha g)(t)``| over the sampled band; ``+inf`` records
    values that escaped double range.  Verdicts follow the documented rule
    only: diverging when the final level exceeds ``growth_factor`` times the
    first (and the absolute floor) or any value is non-finite, flat-consistent
    when no level exceeds ``growth_factor`` times the first (or the floor),
    inconclusive otherwise.
    """

    spec: FlatnessSpec
    alphas: tuple[MultiIndex, ...]
    bands: tuple[tuple[float, float], ...]
    sups: np.ndarray
    series_verdicts: tuple[tuple[str, ...], ...]  # [p][alpha index]
    verdict: str

    def _alpha_index(self, alpha) -> int:
        try:
            return self.alphas.index(MultiIndex(alpha))
        except ValueError:
            raise KeyError(f"alpha {alpha} not in report") from None

    def series(self, p: int, alpha) -> np.ndarray:
        return self.sups[:, p, self._alpha_index(alpha)]

    def series_verdict(self, p: int, alpha) -> str:
        return self.series_verdicts[p][self._alpha_index(alpha)]


def _flat_series_verdict(sups: np.ndarray, thr: VerdictThresholds) -> str:
    if not np.all(np.isfinite(sups)):
        return DIVERGING
    first, last = sups[0], sups[-1]
    if last > thr.growth_factor * first and last > thr.abs_floor:
        return DIVERGING
    if np.max(sups) <= thr.growth_factor * max(first, thr.abs_floor):
        return FLAT_CONSISTENT
    return INCONCLUSIVE


def _unit_ball_samples(count: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    """(dim, count) points uniform in the closed unit ball, by rejection."""
    if dim == 0 or count == 0:
        return np.zeros((dim, count))
    out = np.empty((count, dim))
    filled = 0
    while filled < count:
        cand = rng.uniform(-1.0, 1.0, size=(2 * count + 8, dim))
        keep = cand[np.einsum("ij,ij->i", cand, cand) <= 1.0]
        take = min(len(keep), count - filled)
        out[filled:filled + take] = keep[:take]
        filled += take
    return out.T


def _level_points(spec: FlatnessSpec, level: int) -> tuple[np.ndarray, np.ndarray]:
    """Sample the dyadic band: the divisor-axis values and the full points."""
    lo, hi = spec.band(level)
    axis = spec.boundary_axis
    n = len(spec.base_point)
    count = spec.samples_per_level
    rng = np.random.default_rng((spec.seed, level))
    n_random = count - 4
    mags = rng.uniform(lo, hi, n_random)
    signs = 1.0 - 2.0 * rng.integers(0, 2, n_random)
    t_axis = np.concatenate(([hi, -hi, lo, -lo], signs * mags))
    pts = np.empty((n, count))
    pts[axis] = t_axis
    if n > 1:
        unit = _unit_ball_samples(n_random, n - 1, rng)
        section = np.sqrt(np.maximum(spec.radius**2 - mags**2, 0.0))
        offsets = unit * section
        row = 0
        for k in range(n):
            if k == axis:
                continue
            pts[k, :4] = spec.base_point[k]
            pts[k, 4:] = spec.base_point[k] + offsets[row]
            row += 1
    return t_axis, pts


def verify_flatness(
    f: ScalarField,
    spec: FlatnessSpec,
    *,
    thresholds: VerdictThresholds = DEFAULT_THRESHOLDS,
    workers: int = 1,
) -> FlatnessReport:
    """Verify that the chart-``j`` representative of ``f`` extends flatly to
    the hyperplane at infinity of chart ``i``.

    For every level the weighted derivatives ``t_d^{-p} (d^alpha g)(t)`` are
    evaluated on the band samples through the exact jet pushforward of ``f``
    across the transition map, and their absolute maxima aggregated into the
    report's band-sup sequences.
    """
    n = f.dim
    if len(spec.base_point) != n:
        raise ValueError(f"base point has {len(spec.base_point)} coordinates, field {n}")
    alphas = enumerate_multiindices(n, spec.order)
    space = jet_space(n, spec.order)
    weights = np.arange(spec.p_max + 1)

    def level_job(level: int) -> np.ndarray:
        t_axis, pts = _level_points(spec, level)
        cols = [pts[k] for k in range(n)]
        with np.errstate(all="ignore"):
            jet = pushforward_jet(f, spec.chart_i, spec.chart_j, cols, spec.order)
            derivs = _abs_or_inf(space.factorials[:, None] * jet.coeffs)
            wmat = np.abs(t_axis)[None, :] ** (-weights[:, None])
            sups = np.empty((spec.p_max + 1, len(alphas)))
            for p in range(spec.p_max + 1):
                for a_idx in range(len(alphas)):
                    sups[p, a_idx] = np.max(wmat[p] * derivs[a_idx])
        return sups

    per_level = list(_ordered_map(level_job, range(spec.levels), workers))
    sups = np.stack(per_level)  # (levels, p_max + 1, n_alpha)

    verdicts = tuple(
        tuple(_flat_series_verdict(sups[:, p, a], thresholds) for a in range(len(alphas)))
        for p in range(spec.p_max + 1)
    )
    flat_verdicts = [v for row in verdicts for v in row]
    if any(v == DIVERGING for v in flat_verdicts):
        overall = DIVERGING
    elif all(v == FLAT_CONSISTENT for v in flat_verdicts):
        overall = FLAT_CONSISTENT
    else:
        overall = INCONCLUSIVE
    sups.setflags(write=False)
    return FlatnessReport(
        spec=spec,
        alphas=alphas,
        bands=tuple(spec.band(m) for m in range(spec.levels)),
        sups=sups,
        series_verdicts=verdicts,
        verdict=overall,
    )


# ---------------------------------------------------------------------------
# whole-boundary aggregation


@dataclass(frozen=True)
class ExtensionConfig:
    """Budget for sweeping the whole hyperplane at infinity of one chart."""

    base_points_per_chart: int = 8
    base_range: tuple[float, float] = (-2.0, 2.0)
    radius: float = 0.5
    p_max: int = 3
    order: int = 3
    levels: int = 20
    samples_per_level: int = 256
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.base_points_per_chart < 1:
            raise ValueError("need at least one base point per chart")
        lo, hi = self.base_range
        if not lo < hi:
            raise ValueError("bad base point range")


@dataclass(frozen=True, eq=False)
class ExtensionRun:
    chart_j: int
    base_point: tuple[float, ...]
    report: FlatnessReport


@dataclass(frozen=True, eq=False)
class ExtensionReport:
    """Flatness verdicts across every adjacent chart's boundary base points;
    the computational reading of "rapid decay on one chart means flat at its
    copy of RP^(n-1) at infinity"."""

    function: str
    dim: int
    chart_i: int
    config: ExtensionConfig
    thresholds: VerdictThresholds
    runs: tuple[ExtensionRun, ...]
    verdict: str


def _extension_base_points(n: int, axis: int, chart_j: int,
                           config: ExtensionConfig) -> list[tuple[float, ...]]:
    if n == 1:
        return [(0.0,)]
    rng = np.random.default_rng((config.seed, chart_j))
    lo, hi = config.base_range
    rest = rng.uniform(lo, hi, size=(config.base_points_per_chart, n - 1))
    points = []
    for row in rest:
        coords = list(row)
        coords.insert(axis, 0.0)
        points.append(tuple(float(c) for c in coords))
    return points


def extension_report(
    f: ScalarField,
    chart_i: int,
    config: ExtensionConfig = ExtensionConfig(),
    *,
    thresholds: VerdictThresholds = DEFAULT_THRESHOLDS,
    workers: int = 1,
) -> ExtensionReport:
    """Run :func:`verify_flatness` against every chart ``j != chart_i`` over a
    deterministic set of boundary base points and aggregate the verdicts.

    Overall verdict: ``diverging`` if any run diverges, ``flat-consistent``
    if every run is flat, ``inconclusive`` otherwise.
    """
    n = f.dim
    if not 1 <= chart_i <= n + 1:
        raise ValueError(f"chart {chart_i} out of range 1..{n + 1}")
    runs = []
    for chart_j in range(1, n + 2):
        if chart_j == chart_i:
            continue
        axis = transition_divisor_axis(chart_i, chart_j)
        for base in _extension_base_points(n, axis, chart_j, config):
            spec = FlatnessSpec(
                chart_i=chart_i,
                chart_j=chart_j,
                base_point=base,
                radius=config.radius,
                p_max=config.p_max,
                order=config.order,
                levels=config.levels,
                samples_per_level=config.samples_per_level,
                seed=config.seed,
            )
            report = verify_flatness(f, spec, thresholds=thresholds, workers=workers)
            runs.append(ExtensionRun(chart_j, base, report))
    verdict_set = [run.report.verdict for run in runs]
    if any(v == DIVERGING for v in verdict_set):
        overall = DIVERGING
    elif all(v == FLAT_CONSISTENT for v in verdict_set):
        overall = FLAT_CONSISTENT
    else:
        overall = INCONCLUSIVE
    return ExtensionReport(
        function=f.name,
        dim=n,
        chart_i=chart_i,
        config=config,
        thresholds=thresholds,
        runs=tuple(runs),
        verdict=overall,
    )


def _ordered_map(job: Callable[[int], np.ndarray], items, workers: int):
    if workers <= 1:
        return [job(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, items))


# ---------------------------------------------------------------------------
# atlas invariant suite (the `atlas check` CLI surface)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    max_error: float


def _rand_overlap_point(rng, n, j, axis, margin=1e-2, width=2.0):
    coords = rng.uniform(-width, width, n)
    while abs(coords[axis]) < margin:
        coords[axis] = rng.uniform(-width, width)
    return atlas.AffinePoint(j, tuple(coords))


def atlas_checks(n: int, num_points: int = 200, seed: int = DEFAULT_SEED) -> list[CheckResult]:
    """Randomized invariant suite over RP^n and S^n: chart round-trips, the
    transition cocycle, scale invariance, the affine/at-infinity partition,
    and the stereographic round-trips."""
    rng = np.random.default_rng(seed)
    results = []

    err = 0.0
    for _ in range(num_points):
        coords = rng.uniform(-2.0, 2.0, n + 1)
        coords[rng.integers(0, n + 1)] = rng.uniform(1.0, 2.0)  # keep it off zero
        point = atlas.ProjectivePoint(coords)
        i = int(rng.integers(1, n + 2))
        if point.coords[i - 1] == 0.0:
            continue
        affine = atlas.chart_map(i, point)
        back = atlas.chart_inverse(i, affine)
        err = max(err, float(np.max(np.abs(back.coords - point.coords))))
    results.append(CheckResult("chart round-trip", bool(err < 1e-12), float(err)))

    err = 0.0
    for _ in range(num_points):
        i, j = rng.choice(np.arange(1, n + 2), size=2, replace=False)
        i, j = int(i), int(j)
        a = _rand_overlap_point(rng, n, j, transition_divisor_axis(i, j))
        there = atlas.transition(i, j, a)
        back = atlas.transition(j, i, there)
        err = max(err, max(abs(x - y) for x, y in zip(back.coords, a.coords)))
    results.append(CheckResult("transition round-trip", bool(err < 1e-12), float(err)))

    exact = True
    for _ in range(num_points):
        ints = rng.integers(-8, 9, n + 1).astype(float)
        if not np.any(ints):
            continue
        point = atlas.ProjectivePoint(ints)
        i = int(np.argmax(np.abs(point.coords)) + 1)
        reference = atlas.chart_map(i, point)
        for lam in (-2.0, 0.5, 1e6):
            scaled = atlas.ProjectivePoint(ints * lam)
            exact &= atlas.chart_map(i, scaled) == reference
    results.append(CheckResult("scale invariance", bool(exact), 0.0))

    ok = True
    for _ in range(num_points):
        coords = rng.uniform(-2.0, 2.0, n + 1)
        if rng.uniform() < 0.3:
            coords[0] = 0.0
        point = atlas.ProjectivePoint(coords)
        for i in range(1, n + 2):
            branch = atlas.classify(point, i)
            if isinstance(branch, atlas.AffinePoint):
                ok &= point.coords[i - 1] != 0.0
            else:
                ok &= point.coords[i - 1] == 0.0 and branch.dim == n - 1
    results.append(CheckResult("affine/at-infinity partition", bool(ok), 0.0))

    err = 0.0
    for _ in range(num_points):
        raw = rng.normal(size=n + 1)
        raw /= np.linalg.norm(raw)
        if raw[0] > 1.0 - 1e-6:
            raw[0] = -raw[0]
        sphere = atlas.SpherePoint(tuple(raw / np.linalg.norm(raw)))
        plane = atlas.stereo(sphere)
        back = atlas.stereo_inverse(plane)
        err = max(err, max(abs(x - y) for x, y in zip(back.coords, sphere.coords)))
    results.append(CheckResult("stereographic round-trip", bool(err < 1e-12), float(err)))

    gauss = builtin_corpus(n)[0].field
    err = 0.0
    for _ in range(max(1, num_points // 10)):
        i, j = rng.choice(np.arange(1, n + 2), size=2, replace=False)
        i, j = int(i), int(j)
        axis = transition_divisor_axis(i, j)
        coords = rng.uniform(-1.5, 1.5, n)
        coords[axis] = rng.uniform(0.5, 1.5) * (1 if rng.uniform() < 0.5 else -1)
        point = atlas.AffinePoint(j, tuple(coords))
        m = first_order_matrix(i, j, point)
        s_vals = atlas.transition_values(i, j, list(coords))
        grad_f = np.array([
            float(extract_partial(gauss.eval_jet(s_vals, 1), MultiIndex(
                1 if k == a else 0 for k in range(n)))) for a in range(n)
        ])
        g_jet = pushforward_jet(gauss, i, j, list(coords), 1)
        grad_g = np.array([
            float(extract_partial(g_jet, MultiIndex(
                1 if k == a else 0 for k in range(n)))) for a in range(n)
        ])
        err = max(err, float(np.max(np.abs(grad_f - m.entries @ grad_g))
                             / (1.0 + np.linalg.norm(grad_f))))
    results.append(CheckResult("gradient transport", bool(err < 1e-8), float(err)))

    return results
