"""Input smoothing and post-fit level correction.

Raw series are denoised with a centered moving average before fitting.  The
fitted curve systematically sits below jumpy data near the window edge, so a
family of level-correction heuristics shifts the fitted history and/or the
forecast by data-derived constants.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .core import FittedExtrapolator, Series, evaluate_many
from .errors import SeriesTooShort, WindowNotCovered

__all__ = [
    "BoundaryPolicy",
    "MovingAverageConfig",
    "LevelCorrection",
    "moving_average",
    "level_correct",
]


class BoundaryPolicy(str, enum.Enum):
    """How the centered moving average treats points near the series edges."""

    # Edge points copy the nearest average computed from a full window.
    REPLICATE_FIRST_FULL = "replicate-first-full"
    # Edge points average whatever part of the window is in range.
    SHRINK_WINDOW = "shrink-window"


@dataclass(frozen=True)
class MovingAverageConfig:
    """Centered moving average of odd ``width`` with an edge policy."""

    width: int = 5
    boundary: BoundaryPolicy = BoundaryPolicy.REPLICATE_FIRST_FULL

    def __post_init__(self):
        if self.width < 1 or self.width % 2 == 0:
            raise ValueError(f"width must be odd and >= 1, got {self.width}")
        # accept the string form of the policy too
        object.__setattr__(self, "boundary", BoundaryPolicy(self.boundary))


class LevelCorrection(str, enum.Enum):
    """Level-correction modes; they compose by repeated application.

    ``HISTORICAL_REBASE`` sets the history shift, the two ``*_MV`` modes set
    the forecast shift, so e.g. rebase followed by ``LAST_MV`` adjusts both.
    """

    NONE = "none"
    LAST_MV = "last-mv"
    MEAN_LAST5_MV = "mean-last-5-mv"
    HISTORICAL_REBASE = "historical-rebase"


def moving_average(data: Series, config: MovingAverageConfig) -> Series:
    """Centered moving average of ``data`` with the same length and start.

    Parameters
    ----------
    data : Series
        Input series; must hold at least ``config.width`` values.
    config : MovingAverageConfig
        Width and boundary policy.

    Returns
    -------
    Series
        Smoothed series aligned with the input.
    """
    w = config.width
    if len(data) < w:
        raise SeriesTooShort(
            f"series of length {len(data)} is shorter than the "
            f"moving-average width {w}"
        )
    half = (w - 1) // 2
    vals = data.values
    full = np.convolve(vals, np.full(w, 1.0 / w), mode="valid")
    if config.boundary is BoundaryPolicy.REPLICATE_FIRST_FULL:
        out = np.concatenate(
            [np.repeat(full[0], half), full, np.repeat(full[-1], half)]
        )
    else:
        out = np.empty(len(vals))
        out[half : len(vals) - half] = full
        for i in range(half):
            out[i] = vals[: i + half + 1].mean()
            out[len(vals) - 1 - i] = vals[len(vals) - 1 - i - half :].mean()
    return Series(data.start_t, out)


def level_correct(
    model: FittedExtrapolator,
    history_mv: Series,
    raw: Series,
    mode: LevelCorrection | str,
) -> FittedExtrapolator:
    """Return a copy of ``model`` with one level shift set by ``mode``.

    ``history_mv`` is the smoothed series the model was fitted on and
    ``raw`` the unsmoothed observations; both must cover the fit window.
    Modes:

    - ``none``: model returned unchanged.
    - ``last-mv``: forecast shift = smoothed value at the window end.
    - ``mean-last-5-mv``: forecast shift = mean of the last five smoothed
      values up to the window end.
    - ``historical-rebase``: history shift = mean absolute residual of the
      model against ``raw`` over the window (the fitted curve is hoisted by
      its own average miss).

    Modes compose: apply them in sequence to set both shifts.
    """
    mode = LevelCorrection(mode)
    if mode is LevelCorrection.NONE:
        return model
    window = model.window
    s = window.end_t
    if mode is LevelCorrection.LAST_MV:
        return replace(model, level_shift_forecast=history_mv.value_at(s))
    if mode is LevelCorrection.MEAN_LAST5_MV:
        if not history_mv.covers(s - 4, s):
            raise WindowNotCovered(
                f"need smoothed values at [{s - 4}, {s}] for mean-last-5-mv"
            )
        tail = history_mv.subseries(s - 4, s).values
        return replace(model, level_shift_forecast=float(tail.mean()))
    # historical rebase
    actual = raw.window_values(window)
    fitted = evaluate_many(model, window.times())
    shift = float(np.abs(actual - fitted).sum()) / window.length
    return replace(model, level_shift_history=shift)
