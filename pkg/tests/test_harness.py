"""Tests for residual scoring, rolling backtests, and method comparison."""

import math

import numpy as np
import pytest

import blx
from blx import (
    BandParams,
    ExperimentConfig,
    IncomparableReports,
    LengthMismatch,
    LinearBaselineConfig,
    ResidualReport,
    Series,
    SeriesTooShort,
)
from conftest import DATA


@pytest.fixture(scope="module")
def synthetic():
    series, _ = blx.load_table(
        DATA / "synthetic_prices.csv", blx.ColumnSpec(column="price")
    )
    return series


def backtest_config(**kw):
    """Config matching the committed golden backtest, with overrides."""
    base = dict(
        window_len=91,
        horizon=5,
        repetitions=32,
        overlap="skip-first-horizon",
        band=BandParams(omega=np.pi / 4, n_modes=45, ridge=0.1),
        correction=("historical-rebase", "last-mv"),
        baseline=LinearBaselineConfig(lookback=90, use_smoothed=False),
    )
    base.update(kw)
    return ExperimentConfig(**base)


# ---------------------------------------------------------------------------
# residual reports


def test_residual_metrics_abs():
    rep = blx.residual_metrics(Series(4, [1.0, 2.0]), Series(4, [0.0, 4.0]))
    assert np.array_equal(rep.per_point, [1.0, 2.0])
    assert rep.total == 3.0
    assert rep.mean == 1.5
    assert rep.n_points == 2
    assert rep.metric == "abs"
    assert rep.method == "model"


def test_residual_metrics_squared():
    rep = blx.residual_metrics(
        Series(4, [1.0, 2.0]), Series(4, [0.0, 4.0]), metric="squared"
    )
    assert np.array_equal(rep.per_point, [1.0, 4.0])
    assert rep.total == 5.0
    assert rep.mean == 2.5


def test_residual_metrics_exact_match_is_zero():
    vals = [3.0, -1.0, 2.5]
    rep = blx.residual_metrics(Series(0, vals), Series(0, vals))
    assert np.array_equal(rep.per_point, np.zeros(3))


def test_residual_metrics_mismatches():
    with pytest.raises(LengthMismatch):
        blx.residual_metrics(Series(0, [1.0]), Series(0, [1.0, 2.0]))
    with pytest.raises(LengthMismatch):
        blx.residual_metrics(Series(0, [1.0, 2.0]), Series(1, [1.0, 2.0]))


def test_residual_report_validation():
    with pytest.raises(ValueError):
        ResidualReport(method="m", metric="l1", per_point=np.ones(2))
    with pytest.raises(ValueError):
        ResidualReport(method="m", metric="abs", per_point=np.empty(0))
    with pytest.raises(ValueError):
        ResidualReport(method="m", metric="abs", per_point=[1.0, np.nan])
    rep = ResidualReport(method="m", metric="abs", per_point=[1.0, 2.0])
    with pytest.raises(ValueError):
        rep.per_point[0] = 9.0


def test_report_totals_match_fsum():
    rng = np.random.default_rng(6)
    pts = rng.uniform(0, 1, size=400)
    rep = ResidualReport(method="m", metric="abs", per_point=pts)
    assert rep.total == pytest.approx(math.fsum(pts), rel=1e-9)
    assert rep.mean == rep.total / 400


# ---------------------------------------------------------------------------
# comparison


def _rep(values, method="causal", metric="abs"):
    return ResidualReport(method=method, metric=metric, per_point=values)


def test_compare_winner_causal():
    out = blx.compare(_rep([1.5689]), _rep([1.7329], method="linear"))
    assert out.winner == "causal"
    assert out.margin_per_point == pytest.approx(0.164, abs=1e-12)
    assert out.causal.mean < out.linear.mean


def test_compare_winner_linear():
    out = blx.compare(_rep([0.9987]), _rep([0.9597], method="linear"))
    assert out.winner == "linear"
    assert out.margin_per_point == pytest.approx(0.039, abs=1e-12)


def test_compare_tie():
    out = blx.compare(_rep([2.0, 4.0]), _rep([3.0, 3.0], method="linear"))
    assert out.winner == "tie"
    assert out.margin_per_point == 0.0


def test_compare_rejects_mismatched_reports():
    with pytest.raises(IncomparableReports):
        blx.compare(_rep([1.0]), _rep([1.0], metric="squared"))
    with pytest.raises(IncomparableReports):
        blx.compare(_rep([1.0]), _rep([1.0, 2.0]))


# ---------------------------------------------------------------------------
# single forecast


def test_single_forecast_shape(synthetic):
    cfg = backtest_config(horizon=20, repetitions=1)
    out = blx.run_single_forecast(synthetic, cfg)
    assert out.forecast.start_t == synthetic.start_t + 91
    assert len(out.forecast) == 20
    assert out.report.n_points == 20
    assert out.history_report.n_points == 91
    assert out.smoothed.start_t == synthetic.start_t
    # smoothing plus band-limits keep the on-window tracking error small
    # relative to the price scale (~60)
    assert out.history_report.mean < 2.0


def test_single_forecast_needs_window_plus_horizon(synthetic):
    cfg = backtest_config(horizon=20)
    short = synthetic.subseries(1, 110)
    with pytest.raises(SeriesTooShort):
        blx.run_single_forecast(short, cfg)
    blx.run_single_forecast(synthetic.subseries(1, 111), cfg)


# ---------------------------------------------------------------------------
# rolling forecast geometry


def test_rolling_geometry_on_synthetic(synthetic):
    cfg = backtest_config()
    out = blx.run_rolling_forecast(synthetic, cfg)
    assert len(out.stitched) == 160
    assert out.stitched.start_t == 97
    assert out.stitched.end_t == 256
    assert out.fit_end_ts == tuple(range(91, 247, 5))
    assert out.report.n_points == 160


def test_rolling_geometry_no_overlap(synthetic):
    cfg = backtest_config(horizon=3, repetitions=2, overlap="none")
    data = synthetic.subseries(1, 97)
    out = blx.run_rolling_forecast(data, cfg)
    assert out.stitched.start_t == 92
    assert out.stitched.end_t == 97
    assert out.fit_end_ts == (91, 94)


def test_rolling_one_rep_equals_single(synthetic):
    cfg = backtest_config(repetitions=1, overlap="none")
    rolled = blx.run_rolling_forecast(synthetic, cfg)
    single = blx.run_single_forecast(synthetic, cfg)
    assert rolled.stitched.start_t == single.forecast.start_t
    assert np.array_equal(rolled.stitched.values, single.forecast.values)
    assert np.array_equal(
        rolled.report.per_point, single.report.per_point
    )


def test_rolling_requires_exact_budget(synthetic):
    cfg = backtest_config()  # needs 91 + 32*5 + 5 = 256
    blx.run_rolling_forecast(synthetic, cfg)
    with pytest.raises(SeriesTooShort):
        blx.run_rolling_forecast(synthetic.subseries(1, 255), cfg)


def test_forecaster_never_reads_past_its_window(synthetic):
    """Corrupting data after the last fit window leaves forecasts bitwise
    unchanged; only the scoring against actuals moves."""
    cfg = backtest_config()
    clean = blx.run_rolling_forecast(synthetic, cfg)
    last_fit_end = clean.fit_end_ts[-1]
    assert last_fit_end == 246
    vals = synthetic.values.copy()
    vals[last_fit_end - synthetic.start_t + 1 :] += 50.0
    corrupted = Series(synthetic.start_t, vals)
    dirty = blx.run_rolling_forecast(corrupted, cfg)
    assert np.array_equal(dirty.stitched.values, clean.stitched.values)
    assert dirty.fit_end_ts == clean.fit_end_ts
    assert dirty.report.mean != clean.report.mean


def test_baseline_never_reads_past_its_anchor(synthetic):
    cfg = backtest_config()
    clean = blx.run_rolling_baseline(synthetic, cfg)
    last_anchor = clean.fit_end_ts[-1]
    assert last_anchor == 251
    vals = synthetic.values.copy()
    vals[last_anchor - synthetic.start_t + 1 :] += 50.0
    dirty = blx.run_rolling_baseline(Series(synthetic.start_t, vals), cfg)
    assert np.array_equal(dirty.stitched.values, clean.stitched.values)


def test_trailing_data_is_ignored(synthetic):
    # 16 repetitions need 91 + 80 + 5 = 176 points; the rest must not matter
    cfg = backtest_config(repetitions=16)
    full = blx.run_backtest(synthetic, cfg)
    trimmed = blx.run_backtest(synthetic.subseries(1, 176), cfg)
    assert np.array_equal(
        full.causal.stitched.values, trimmed.causal.stitched.values
    )
    assert np.array_equal(
        full.linear.stitched.values, trimmed.linear.stitched.values
    )
    assert full.comparison.margin_per_point == trimmed.comparison.margin_per_point


# ---------------------------------------------------------------------------
# burn-in


def test_burn_in_drops_leading_points(synthetic):
    plain = blx.run_rolling_forecast(synthetic, backtest_config())
    burned = blx.run_rolling_forecast(synthetic, backtest_config(burn_in=7))
    assert burned.report.n_points == 153
    assert np.array_equal(
        burned.report.per_point, plain.report.per_point[7:]
    )
    # the stitched output itself keeps every emitted day
    assert np.array_equal(burned.stitched.values, plain.stitched.values)


def test_burn_in_cannot_swallow_everything(synthetic):
    with pytest.raises(ValueError):
        blx.run_rolling_forecast(synthetic, backtest_config(burn_in=160))


# ---------------------------------------------------------------------------
# linear baseline inside the harness


def test_rolling_baseline_anchors(synthetic):
    cfg = backtest_config()
    out = blx.run_rolling_baseline(synthetic, cfg)
    assert out.stitched.start_t == 97
    assert len(out.stitched) == 160
    assert out.fit_end_ts == tuple(96 + 5 * i for i in range(32))
    for i in (0, 7, 31):
        anchor = 96 + 5 * i
        want = blx.linear_forecast(synthetic, anchor, cfg.baseline, 5)
        got = out.stitched.values[5 * i : 5 * i + 5]
        assert np.array_equal(got, want.values)


def test_rolling_baseline_smoothed_variant(synthetic):
    cfg = backtest_config(
        baseline=LinearBaselineConfig(lookback=90, use_smoothed=True)
    )
    raw = blx.run_rolling_baseline(synthetic, backtest_config())
    out = blx.run_rolling_baseline(synthetic, cfg)
    assert not np.array_equal(out.stitched.values, raw.stitched.values)
    smoothed_prefix = blx.moving_average(synthetic.subseries(1, 96), cfg.ma)
    want = blx.linear_forecast(smoothed_prefix, 96, cfg.baseline, 5)
    assert np.array_equal(out.stitched.values[:5], want.values)


# ---------------------------------------------------------------------------
# backtest wrapper and config


def test_backtest_reuses_component_reports(synthetic):
    out = blx.run_backtest(synthetic, backtest_config())
    assert out.comparison.causal is out.causal.report
    assert out.comparison.linear is out.linear.report
    assert out.comparison.winner in ("causal", "linear", "tie")
    assert out.comparison.margin_per_point == abs(
        out.causal.report.mean - out.linear.report.mean
    )


def test_squared_metric_squares_the_abs_residuals(synthetic):
    cfg_abs = backtest_config(repetitions=4)
    cfg_sq = backtest_config(repetitions=4, metric="squared")
    a = blx.run_rolling_forecast(synthetic, cfg_abs)
    s = blx.run_rolling_forecast(synthetic, cfg_sq)
    assert np.array_equal(s.report.per_point, a.report.per_point**2)


def test_experiment_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(window_len=0)
    with pytest.raises(ValueError):
        ExperimentConfig(horizon=0)
    with pytest.raises(ValueError):
        ExperimentConfig(repetitions=0)
    with pytest.raises(ValueError):
        ExperimentConfig(burn_in=-1)
    with pytest.raises(ValueError):
        ExperimentConfig(metric="l1")
    with pytest.raises(ValueError):
        ExperimentConfig(overlap="sometimes")
    with pytest.raises(ValueError):
        ExperimentConfig(correction=("warp",))


def test_experiment_config_warmup():
    assert ExperimentConfig(horizon=7).warmup == 7
    assert ExperimentConfig(horizon=7, overlap="none").warmup == 0


def test_experiment_config_coerces_strings():
    cfg = ExperimentConfig(
        overlap="none", correction=["historical-rebase", "last-mv"]
    )
    assert cfg.overlap is blx.OverlapPolicy.NONE
    assert cfg.correction == (
        blx.LevelCorrection.HISTORICAL_REBASE,
        blx.LevelCorrection.LAST_MV,
    )
