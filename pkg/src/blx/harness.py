"""Forecast experiments: single-window runs, rolling backtests, comparisons.

A rolling backtest refits on a sliding window whose right edge advances by
one horizon per repetition and stitches the emitted forecast blocks into one
continuous series scored against the actuals.  Causality is enforced here:
no fit, smoother, or level correction ever reads data past the right edge
of its own window.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .baseline import LinearBaselineConfig, linear_forecast
from .core import (
    BandParams,
    FittedExtrapolator,
    Series,
    Window,
    evaluate_many,
    fit,
)
from .errors import IncomparableReports, LengthMismatch, SeriesTooShort
from .preprocess import (
    LevelCorrection,
    MovingAverageConfig,
    level_correct,
    moving_average,
)

__all__ = [
    "OverlapPolicy",
    "ExperimentConfig",
    "ResidualReport",
    "ComparisonReport",
    "SingleForecastResult",
    "RollingForecastResult",
    "BacktestResult",
    "residual_metrics",
    "compare",
    "run_single_forecast",
    "run_rolling_forecast",
    "run_rolling_baseline",
    "run_backtest",
]

_METRICS = ("abs", "squared")


class OverlapPolicy(str, enum.Enum):
    """How consecutive backtest repetitions relate to the emitted days.

    ``NONE`` emits the first ``horizon`` forecast days of every window.
    ``SKIP_FIRST_HORIZON`` evaluates ``2 * horizon`` days past each window
    but emits only the second half, so the scored days sit deeper into the
    extrapolation region while still tiling the axis exactly once.
    """

    NONE = "none"
    SKIP_FIRST_HORIZON = "skip-first-horizon"


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a forecast experiment needs besides the data itself."""

    window_len: int = 91
    horizon: int = 5
    repetitions: int = 1
    overlap: OverlapPolicy = OverlapPolicy.SKIP_FIRST_HORIZON
    band: BandParams = field(
        default_factory=lambda: BandParams(omega=np.pi / 4, n_modes=45, ridge=0.1)
    )
    ma: MovingAverageConfig = field(default_factory=MovingAverageConfig)
    correction: tuple = ()
    baseline: LinearBaselineConfig = field(default_factory=LinearBaselineConfig)
    burn_in: int = 0
    metric: str = "abs"

    def __post_init__(self):
        if self.window_len < 1:
            raise ValueError(f"window_len must be >= 1, got {self.window_len}")
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if self.repetitions < 1:
            raise ValueError(
                f"repetitions must be >= 1, got {self.repetitions}"
            )
        if self.burn_in < 0:
            raise ValueError(f"burn_in must be >= 0, got {self.burn_in}")
        if self.metric not in _METRICS:
            raise ValueError(f"metric must be one of {_METRICS}")
        object.__setattr__(self, "overlap", OverlapPolicy(self.overlap))
        object.__setattr__(
            self,
            "correction",
            tuple(LevelCorrection(m) for m in self.correction),
        )

    @property
    def warmup(self) -> int:
        """Unscored forecast days between window end and first emitted day."""
        if self.overlap is OverlapPolicy.SKIP_FIRST_HORIZON:
            return self.horizon
        return 0


@dataclass(frozen=True, eq=False)
class ResidualReport:
    """Pointwise residuals of one method under one metric.

    ``total`` and ``mean`` are derived from ``per_point`` on access, so they
    are always the exact sum and sum / count of the stored values.
    """

    method: str
    metric: str
    per_point: np.ndarray

    def __post_init__(self):
        if self.metric not in _METRICS:
            raise ValueError(f"metric must be one of {_METRICS}")
        arr = np.array(self.per_point, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("per_point must be a nonempty vector")
        if not np.all(np.isfinite(arr)):
            raise ValueError("per_point residuals must all be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "per_point", arr)

    @property
    def n_points(self) -> int:
        return len(self.per_point)

    @property
    def total(self) -> float:
        return float(self.per_point.sum())

    @property
    def mean(self) -> float:
        return self.total / self.n_points


@dataclass(frozen=True, eq=False)
class ComparisonReport:
    """Outcome of pitting the causal fit against the linear baseline."""

    causal: ResidualReport
    linear: ResidualReport
    winner: str
    margin_per_point: float


@dataclass(frozen=True, eq=False)
class SingleForecastResult:
    """One fitted window plus its forecast and residual reports."""

    model: FittedExtrapolator
    smoothed: Series
    forecast: Series
    report: ResidualReport
    history_report: ResidualReport


@dataclass(frozen=True, eq=False)
class RollingForecastResult:
    """Stitched emitted forecasts of a rolling run.

    ``fit_end_ts`` records, per repetition, the last data day the forecaster
    was allowed to see.
    """

    stitched: Series
    report: ResidualReport
    fit_end_ts: tuple


@dataclass(frozen=True, eq=False)
class BacktestResult:
    causal: RollingForecastResult
    linear: RollingForecastResult
    comparison: "ComparisonReport"


def residual_metrics(
    predicted: Series,
    actual: Series,
    metric: str = "abs",
    method: str = "model",
) -> ResidualReport:
    """Pointwise residual report of ``predicted`` against ``actual``.

    Both series must start at the same time and have the same length,
    otherwise :class:`LengthMismatch` is raised.  ``abs`` scores absolute
    error per point, ``squared`` the squared error.
    """
    if len(predicted) != len(actual):
        raise LengthMismatch(
            f"predicted has {len(predicted)} points, actual {len(actual)}"
        )
    if predicted.start_t != actual.start_t:
        raise LengthMismatch(
            f"predicted starts at t={predicted.start_t}, actual at "
            f"t={actual.start_t}"
        )
    diff = predicted.values - actual.values
    per_point = np.abs(diff) if metric == "abs" else diff * diff
    return ResidualReport(method=method, metric=metric, per_point=per_point)


def compare(causal: ResidualReport, linear: ResidualReport) -> ComparisonReport:
    """Declare the method with the smaller mean residual the winner.

    Reports must agree on metric and point count; equal means give a
    ``"tie"``.  The margin is the absolute difference of mean residuals.
    """
    if causal.metric != linear.metric:
        raise IncomparableReports(
            f"metrics differ: {causal.metric!r} vs {linear.metric!r}"
        )
    if causal.n_points != linear.n_points:
        raise IncomparableReports(
            f"point counts differ: {causal.n_points} vs {linear.n_points}"
        )
    if causal.mean < linear.mean:
        winner = causal.method
    elif linear.mean < causal.mean:
        winner = linear.method
    else:
        winner = "tie"
    return ComparisonReport(
        causal=causal,
        linear=linear,
        winner=winner,
        margin_per_point=abs(causal.mean - linear.mean),
    )


def _fit_through(
    data: Series, window: Window, config: ExperimentConfig
) -> tuple[FittedExtrapolator, Series]:
    """Smooth the history up to the window end, fit, level-correct.

    Only data at or before ``window.end_t`` is touched; the smoother sees
    the full history prefix so its left boundary sits at the data start,
    not at the window start.
    """
    prefix = data.subseries(data.start_t, window.end_t)
    smoothed = moving_average(prefix, config.ma)
    model = fit(config.band, window, smoothed)
    for mode in config.correction:
        model = level_correct(model, smoothed, prefix, mode)
    return model, smoothed


def run_single_forecast(
    data: Series, config: ExperimentConfig
) -> SingleForecastResult:
    """Fit the first ``window_len`` points and forecast the next ``horizon``.

    Returns the forecast series, its residual report against the actuals,
    and an on-window report of the (level-corrected) fitted curve against
    the raw history.
    """
    w, h = config.window_len, config.horizon
    if len(data) < w + h:
        raise SeriesTooShort(
            f"need {w + h} points (window {w} + horizon {h}), have {len(data)}"
        )
    window = Window(data.start_t, data.start_t + w - 1)
    model, smoothed = _fit_through(data, window, config)
    s = window.end_t
    forecast = Series(s + 1, evaluate_many(model, np.arange(s + 1, s + h + 1)))
    actual = data.subseries(s + 1, s + h)
    report = residual_metrics(forecast, actual, config.metric, method="causal")
    fitted = Series(window.start_t, evaluate_many(model, window.times()))
    history_report = residual_metrics(
        fitted,
        data.subseries(window.start_t, window.end_t),
        config.metric,
        method="causal-history",
    )
    return SingleForecastResult(
        model=model,
        smoothed=smoothed,
        forecast=forecast,
        report=report,
        history_report=history_report,
    )


def _required_length(config: ExperimentConfig) -> int:
    return (
        config.window_len
        + config.repetitions * config.horizon
        + config.warmup
    )


def _emitted_blocks(config: ExperimentConfig, start_t: int):
    """Yield (fit window, emitted time range) per repetition."""
    w, h = config.window_len, config.horizon
    for i in range(config.repetitions):
        s_i = start_t + w - 1 + i * h
        window = Window(s_i - w + 1, s_i)
        lo = s_i + config.warmup + 1
        yield window, np.arange(lo, lo + h)


def _scored_report(
    stitched: Series, data: Series, config: ExperimentConfig, method: str
) -> ResidualReport:
    actual = data.subseries(stitched.start_t, stitched.end_t)
    burn = config.burn_in
    if burn >= len(stitched):
        raise ValueError(
            f"burn_in {burn} discards all {len(stitched)} emitted points"
        )
    if burn:
        stitched = stitched.subseries(stitched.start_t + burn, stitched.end_t)
        actual = actual.subseries(actual.start_t + burn, actual.end_t)
    return residual_metrics(stitched, actual, config.metric, method=method)


def run_rolling_forecast(
    data: Series, config: ExperimentConfig
) -> RollingForecastResult:
    """Rolling refit-and-forecast over ``repetitions`` windows.

    Repetition i fits the ``window_len`` points ending at
    ``start + window_len - 1 + i * horizon`` and emits ``horizon`` forecast
    days; under ``skip-first-horizon`` the emitted days start one horizon
    past the window instead of immediately after it.  Blocks tile the time
    axis exactly once and the stitched series is scored against the actuals
    (minus an optional burn-in prefix).

    With one repetition and ``overlap="none"`` this reduces to
    :func:`run_single_forecast` point for point.
    """
    need = _required_length(config)
    if len(data) < need:
        raise SeriesTooShort(
            f"need {need} points for {config.repetitions} repetitions "
            f"(window {config.window_len}, horizon {config.horizon}, "
            f"warmup {config.warmup}), have {len(data)}"
        )
    blocks = []
    fit_ends = []
    for window, times in _emitted_blocks(config, data.start_t):
        model, _ = _fit_through(data, window, config)
        blocks.append(evaluate_many(model, times))
        fit_ends.append(window.end_t)
    start = data.start_t + config.window_len + config.warmup
    stitched = Series(start, np.concatenate(blocks))
    report = _scored_report(stitched, data, config, method="causal")
    return RollingForecastResult(
        stitched=stitched, report=report, fit_end_ts=tuple(fit_ends)
    )


def run_rolling_baseline(
    data: Series, config: ExperimentConfig
) -> RollingForecastResult:
    """Linear-baseline counterpart of :func:`run_rolling_forecast`.

    For every emitted block the baseline draws its secant from the last day
    before the block, so it forecasts the same days from the freshest data
    available at that point.
    """
    need = _required_length(config)
    if len(data) < need:
        raise SeriesTooShort(
            f"need {need} points for {config.repetitions} repetitions "
            f"(window {config.window_len}, horizon {config.horizon}, "
            f"warmup {config.warmup}), have {len(data)}"
        )
    h = config.horizon
    blocks = []
    anchors = []
    first_emit = data.start_t + config.window_len + config.warmup
    for i in range(config.repetitions):
        anchor = first_emit - 1 + i * h
        src = data
        if config.baseline.use_smoothed:
            src = moving_average(
                data.subseries(data.start_t, anchor), config.ma
            )
        blocks.append(linear_forecast(src, anchor, config.baseline, h).values)
        anchors.append(anchor)
    stitched = Series(first_emit, np.concatenate(blocks))
    report = _scored_report(stitched, data, config, method="linear")
    return RollingForecastResult(
        stitched=stitched, report=report, fit_end_ts=tuple(anchors)
    )


def run_backtest(data: Series, config: ExperimentConfig) -> BacktestResult:
    """Run causal and linear rolling forecasts and compare their reports."""
    causal = run_rolling_forecast(data, config)
    linear = run_rolling_baseline(data, config)
    return BacktestResult(
        causal=causal,
        linear=linear,
        comparison=compare(causal.report, linear.report),
    )
