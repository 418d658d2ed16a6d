import math

import numpy as np
import pytest

from projflat.analysis import (
    BOUNDED,
    DIVERGING,
    FLAT_CONSISTENT,
    INCONCLUSIVE,
    SCHWARTZ_CONSISTENT,
    ExtensionConfig,
    FlatnessSpec,
    SamplingGrid,
    VerdictThresholds,
    atlas_checks,
    classification_matches,
    classify_schwartz,
    estimate_seminorm,
    extension_report,
    flatness_matches,
    verify_flatness,
)
from projflat.fields import NOT_SCHWARTZ, SCHWARTZ, ScalarField, builtin_corpus, corpus_entry


# -- sampling grids -----------------------------------------------------------


def test_grid_points_shape_and_determinism():
    grid = SamplingGrid.symmetric(2, 3.0, 5)
    pts = grid.points()
    assert pts.shape == (2, 25)
    assert np.array_equal(pts, grid.points())


def test_grid_annulus_filter():
    grid = SamplingGrid.symmetric(2, 2.0, 41, annulus=(1.0, 2.0))
    pts = grid.points()
    radii = np.sqrt(np.einsum("ij,ij->j", pts, pts))
    assert np.all((radii >= 1.0) & (radii <= 2.0))
    assert pts.shape[1] > 0


def test_grid_validation():
    with pytest.raises(ValueError):
        SamplingGrid(2, ((-1.0, 1.0),), 11)
    with pytest.raises(ValueError):
        SamplingGrid.symmetric(1, 1.0, 1)
    with pytest.raises(ValueError):
        SamplingGrid.symmetric(1, 1.0, 5, annulus=(2.0, 1.0))
    with pytest.raises(ValueError):
        SamplingGrid(1, ((1.0, -1.0),), 5)


# -- seminorm estimates -------------------------------------------------------


def test_seminorm_gaussian_sup_is_one():
    gauss = corpus_entry("gaussian_nd", 1).field
    grid = SamplingGrid.symmetric(1, 10.0, 101)  # grid contains the origin
    assert estimate_seminorm(gauss, (0,), (0,), grid) == 1.0


def test_seminorm_weighted_gaussian_maximum():
    # calculus oracle: max |x e^{-x^2}| = (2e)^{-1/2} at x = 1/sqrt(2)
    gauss = corpus_entry("gaussian_nd", 1).field
    grid = SamplingGrid.symmetric(1, 10.0, 4001)
    got = estimate_seminorm(gauss, (1,), (0,), grid)
    assert got == pytest.approx((2.0 * math.e) ** -0.5, abs=1e-3)


def test_seminorm_polynomial_annulus():
    poly = corpus_entry("polynomial", 1).field
    grid = SamplingGrid.symmetric(1, 100.0, 201, annulus=(50.0, 100.0))
    assert estimate_seminorm(poly, (0,), (0,), grid) >= 1e4


def test_seminorm_monotone_under_refinement():
    # doubling the density of an endpoint-inclusive grid over an exactly
    # representable range keeps every old point, so the max cannot drop
    runge = corpus_entry("runge", 1).field
    coarse = SamplingGrid.symmetric(1, 10.0, 101)
    fine = SamplingGrid.symmetric(1, 10.0, 201)
    coarse_pts = set(coarse.points()[0].tolist())
    assert coarse_pts <= set(fine.points()[0].tolist())
    for alpha, beta in (((1,), (0,)), ((2,), (1,)), ((0,), (2,))):
        assert estimate_seminorm(runge, alpha, beta, fine) >= \
            estimate_seminorm(runge, alpha, beta, coarse)


def test_seminorm_validation():
    gauss = corpus_entry("gaussian_nd", 2).field
    with pytest.raises(ValueError):
        estimate_seminorm(gauss, (1,), (0, 0), SamplingGrid.symmetric(2, 1.0, 5))
    with pytest.raises(ValueError):
        estimate_seminorm(gauss, (1, 0), (0, 0), SamplingGrid.symmetric(1, 1.0, 5))


# -- classification -----------------------------------------------------------


def test_classify_gaussian_2d_modest_budgets():
    gauss = corpus_entry("gaussian_nd", 2).field
    report = classify_schwartz(gauss, 3, 3, (2.0, 4.0, 8.0, 16.0))
    assert report.verdict == SCHWARTZ_CONSISTENT
    assert all(pair.verdict == BOUNDED for pair in report.pairs)


@pytest.mark.parametrize("dim", [1, 2])
def test_classify_corpus_at_defaults(dim):
    for entry in builtin_corpus(dim):
        report = classify_schwartz(entry.field)
        assert classification_matches(report.verdict, entry.expected_class), (
            entry.name, report.verdict)
        assert report.verdict != INCONCLUSIVE


def test_classify_oscillator_growth_mechanism():
    # the first-derivative annulus sups grow like the outer radius: the
    # decay failure of d/dx [e^{-x^2} sin(e^{x^2})] is linear in x
    osc = corpus_entry("oscillator", 1).field
    report = classify_schwartz(osc, 0, 1, (2.0, 4.0, 8.0, 16.0),
                               points_per_axis=8001)
    sups = np.array(report.pair((0,), (1,)).sups)
    assert np.all(np.diff(sups) > 0)
    ratios = sups[1:] / sups[:-1]
    assert np.all((ratios > 1.5) & (ratios < 3.0))  # doubling radii, ~2x growth
    assert sups[-1] / sups[0] > 4.0


def test_classify_pair_report_shape():
    gauss = corpus_entry("gaussian_nd", 1).field
    report = classify_schwartz(gauss, 2, 1, (1.0, 2.0, 4.0), points_per_axis=201)
    assert len(report.pairs) == 3 * 2
    assert len(report.pairs[0].sups) == 3
    assert report.pair((2,), (1,)).alpha == (2,)
    with pytest.raises(KeyError):
        report.pair((5,), (0,))


def test_classify_deterministic_and_worker_independent():
    runge = corpus_entry("runge", 2).field
    kwargs = dict(points_per_axis=65)
    a = classify_schwartz(runge, 4, 2, (1.0, 3.0, 9.0), **kwargs)
    b = classify_schwartz(runge, 4, 2, (1.0, 3.0, 9.0), **kwargs)
    c = classify_schwartz(runge, 4, 2, (1.0, 3.0, 9.0), workers=4, **kwargs)
    assert a == b == c  # dataclass equality covers every sup bit


def test_classify_validation():
    gauss = corpus_entry("gaussian_nd", 1).field
    with pytest.raises(ValueError):
        classify_schwartz(gauss, 2, 2, (1.0, 2.0))  # too few radii
    with pytest.raises(ValueError):
        classify_schwartz(gauss, 2, 2, (2.0, 1.0, 3.0))  # not increasing
    with pytest.raises(ValueError):
        VerdictThresholds(growth_factor=0.5)


def test_verdict_mapping_helpers():
    assert classification_matches(SCHWARTZ_CONSISTENT, SCHWARTZ)
    assert classification_matches(NOT_SCHWARTZ, NOT_SCHWARTZ)
    assert not classification_matches(INCONCLUSIVE, SCHWARTZ)
    assert flatness_matches(FLAT_CONSISTENT, SCHWARTZ)
    assert flatness_matches(DIVERGING, NOT_SCHWARTZ)
    assert not flatness_matches(INCONCLUSIVE, NOT_SCHWARTZ)


# -- flatness -----------------------------------------------------------------


def test_flatness_gaussian_1d():
    gauss = corpus_entry("gaussian_nd", 1).field
    spec = FlatnessSpec(chart_i=1, chart_j=2, base_point=(0.0,))
    report = verify_flatness(gauss, spec)
    assert report.verdict == FLAT_CONSISTENT
    # closed-form oracle: sup of |t^-2 e^{-1/t^2}| over a band [lo, hi] with
    # hi <= 0.5 < 1/sqrt(2) sits at the outer edge
    series = report.series(2, (0,))
    for m, (lo, hi) in enumerate(report.bands):
        want = math.exp(-1.0 / hi**2) / hi**2
        assert abs(series[m] - want) < 1e-6
    assert series[0] == pytest.approx(4.0 * math.exp(-4.0), rel=1e-12)


def test_flatness_constant_zero():
    zero = ScalarField.constant(1, 0.0)
    spec = FlatnessSpec(chart_i=1, chart_j=2, base_point=(0.0,), levels=6)
    report = verify_flatness(zero, spec)
    assert report.verdict == FLAT_CONSISTENT
    assert np.all(report.sups == 0.0)


def test_flatness_oscillator_diverges():
    osc = corpus_entry("oscillator", 1).field
    spec = FlatnessSpec(chart_i=1, chart_j=2, base_point=(0.0,))
    report = verify_flatness(osc, spec)
    assert report.verdict == DIVERGING
    assert report.series_verdict(1, (1,)) == DIVERGING
    series = report.series(1, (1,))
    assert series[-1] > 1e3 * series[0]


def test_flatness_spec_validation():
    with pytest.raises(ValueError):
        FlatnessSpec(chart_i=1, chart_j=2, base_point=(0.5,))  # off the boundary
    with pytest.raises(ValueError):
        FlatnessSpec(chart_i=1, chart_j=1, base_point=(0.0,))
    with pytest.raises(ValueError):
        FlatnessSpec(chart_i=1, chart_j=2, base_point=(0.0,), radius=0.0)
    with pytest.raises(ValueError):
        FlatnessSpec(chart_i=1, chart_j=2, base_point=(0.0,), samples_per_level=2)
    # boundary axis for (3, 2) is the second coordinate
    spec = FlatnessSpec(chart_i=3, chart_j=2, base_point=(1.0, 0.0))
    assert spec.boundary_axis == 1


def test_flatness_band_edges_are_anchored():
    gauss = corpus_entry("gaussian_nd", 1).field
    spec = FlatnessSpec(chart_i=1, chart_j=2, base_point=(0.0,), levels=4,
                        samples_per_level=8)
    report = verify_flatness(gauss, spec)
    for m, (lo, hi) in enumerate(report.bands):
        assert (lo, hi) == spec.band(m)
        assert hi == spec.radius * 2.0**-m


def test_flatness_worker_independence():
    gauss = corpus_entry("gaussian_nd", 2).field
    spec = FlatnessSpec(chart_i=1, chart_j=3, base_point=(0.0, 0.7), levels=8,
                        samples_per_level=64)
    solo = verify_flatness(gauss, spec)
    pooled = verify_flatness(gauss, spec, workers=4)
    assert np.array_equal(solo.sups, pooled.sups)
    assert solo.verdict == pooled.verdict


def test_flatness_general_chart_pair():
    # boundary of chart 2 seen from chart 1: divisor is the first coordinate
    gauss = corpus_entry("gaussian_nd", 2).field
    spec = FlatnessSpec(chart_i=2, chart_j=1, base_point=(0.0, 0.4), levels=10,
                        samples_per_level=64)
    report = verify_flatness(gauss, spec)
    assert report.verdict == FLAT_CONSISTENT


# -- extension ----------------------------------------------------------------


def test_extension_gaussian_2d_all_flat():
    gauss = corpus_entry("gaussian_nd", 2).field
    report = extension_report(gauss, 1)
    assert report.verdict == FLAT_CONSISTENT
    assert len(report.runs) == 16  # two other charts, eight base points each
    assert all(run.report.verdict == FLAT_CONSISTENT for run in report.runs)
    assert {run.chart_j for run in report.runs} == {2, 3}
    for run in report.runs:
        axis = FlatnessSpec(chart_i=1, chart_j=run.chart_j,
                            base_point=run.base_point).boundary_axis
        assert run.base_point[axis] == 0.0


def test_extension_oscillator_has_divergence():
    osc = corpus_entry("oscillator", 2).field
    config = ExtensionConfig(base_points_per_chart=4, levels=12, samples_per_level=64)
    report = extension_report(osc, 1, config)
    assert report.verdict == DIVERGING
    assert any(run.report.verdict == DIVERGING for run in report.runs)


def test_extension_constant_zero_all_zero():
    zero = ScalarField.constant(2, 0.0)
    config = ExtensionConfig(base_points_per_chart=2, levels=4, samples_per_level=16)
    report = extension_report(zero, 1, config)
    assert report.verdict == FLAT_CONSISTENT
    for run in report.runs:
        assert np.all(run.report.sups == 0.0)


def test_extension_single_base_point_in_1d():
    gauss = corpus_entry("gaussian_nd", 1).field
    config = ExtensionConfig(levels=8, samples_per_level=32)
    report = extension_report(gauss, 1, config)
    assert len(report.runs) == 1
    assert report.runs[0].base_point == (0.0,)


def test_decay_and_flatness_verdicts_agree():
    # rapid-decay verdicts and flat-extension verdicts agree on the corpus
    config = ExtensionConfig(levels=12, samples_per_level=64)
    for entry in builtin_corpus(1):
        classified = classify_schwartz(entry.field)
        extended = extension_report(entry.field, 1, config)
        assert classification_matches(classified.verdict, entry.expected_class)
        assert flatness_matches(extended.verdict, entry.expected_class), (
            entry.name, extended.verdict)


# -- atlas invariant suite ----------------------------------------------------


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_atlas_checks_pass(dim):
    results = atlas_checks(dim, num_points=60)
    assert all(r.passed for r in results), [(r.name, r.max_error) for r in results]
