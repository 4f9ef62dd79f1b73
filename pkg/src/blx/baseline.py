"""Two-point linear extrapolation, the comparison baseline for backtests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Series
from .errors import InsufficientHistory

__all__ = ["LinearBaselineConfig", "linear_forecast"]


@dataclass(frozen=True)
class LinearBaselineConfig:
    """Secant-line forecaster reaching ``lookback`` steps into the past.

    ``use_smoothed`` anchors the line on the moving average instead of the
    raw observations when a harness drives the baseline.
    """

    lookback: int = 90
    use_smoothed: bool = False

    def __post_init__(self):
        if self.lookback < 1:
            raise ValueError(f"lookback must be >= 1, got {self.lookback}")


def linear_forecast(
    data: Series, t0: int, config: LinearBaselineConfig, horizon: int
) -> Series:
    """Extend the secant through (t0 - lookback, t0) for ``horizon`` steps.

    The slope is (data(t0) - data(t0 - lookback)) / lookback and the line
    passes through the two anchor points exactly; forecasts are its values
    at t0 + 1 .. t0 + horizon.

    Raises :class:`InsufficientHistory` when the data does not cover both
    anchors.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    a = config.lookback
    if not data.covers(t0 - a, t0):
        raise InsufficientHistory(
            f"linear baseline needs data at [{t0 - a}, {t0}], series covers "
            f"[{data.start_t}, {data.end_t}]"
        )
    y0 = data.value_at(t0 - a)
    y1 = data.value_at(t0)
    slope = (y1 - y0) / a
    steps = np.arange(1, horizon + 1, dtype=float)
    return Series(t0 + 1, y1 + slope * steps)
