"""Monte Carlo evaluation of the fit on random autoregressive paths.

Paths follow z(t) = a(t) * z(t-1) + sigma * eta(t) with a fresh coefficient
a(t) ~ Uniform(coeff_low, coeff_high) and noise eta(t) ~ Normal(0, 1) at
every step.  Each trial smooths the whole path, fits the window, and scores
the fit against the *raw* path both on the window (smoothing residual) and
past it (extrapolation residual).

Note the measurement protocol: the centered moving average runs over the
entire generated path before the fitting window is cut out, so smoothed
values near the window's right edge blend up to (width - 1) / 2 later
samples.  That is how this benchmark is defined; it makes the first couple
of forecast steps look better than a strictly causal smoother would.  The
file-driven experiment harness never does this — there the smoother sees
only data up to each fit's end.

Randomness comes from ``numpy.random.default_rng`` (PCG64).  Each step draws
one uniform then one standard normal, in that order; trial i runs on its own
stream seeded with ``seed XOR i``.  Identical seeds reproduce identical
aggregates bit for bit, and because every trial owns its stream the
aggregates do not depend on execution order beyond float summation.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .core import (
    BandParams,
    Series,
    Window,
    _atoms,
    _regularized_factor,
    _solve_with_factor,
    build_gram,
)
from .preprocess import MovingAverageConfig, moving_average

__all__ = ["SimConfig", "TrialAggregate", "gen_path", "run_trials"]


@dataclass(frozen=True)
class SimConfig:
    """Random-path parameters: noise scale, coefficient range, start, seed."""

    sigma: float = 1.0
    coeff_low: float = 0.0
    coeff_high: float = 1.0
    z0: float = 1.0
    path_length: int = 111
    seed: int = 0

    def __post_init__(self):
        if self.sigma < 0.0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if self.coeff_high < self.coeff_low:
            raise ValueError(
                f"coeff range [{self.coeff_low}, {self.coeff_high}] is empty"
            )
        if self.path_length < 1:
            raise ValueError(
                f"path_length must be >= 1, got {self.path_length}"
            )
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")


@dataclass(frozen=True, eq=False)
class TrialAggregate:
    """Mean residuals over a batch of trials.

    ``per_point_residuals[j]`` is the mean absolute error of forecast step
    j + 1; the ``*_squared`` fields carry the same aggregates under squared
    error.  Totals are plain sums over points of the means, so
    ``smoothing_per_point = smoothing_total / window length`` and likewise
    for extrapolation.
    """

    n_trials: int
    per_point_residuals: np.ndarray
    per_point_squared: np.ndarray
    smoothing_total: float
    smoothing_per_point: float
    smoothing_squared_per_point: float
    extrap_total: float
    extrap_per_point: float
    extrap_squared_per_point: float


def gen_path(config: SimConfig, start_t: int = 0) -> Series:
    """Generate one random path of ``config.path_length`` values.

    The first value (at ``start_t``) is a(start) * z0 + sigma * eta(start);
    each later value applies a fresh coefficient to its predecessor.  Draw
    order per step is uniform coefficient first, then normal noise.
    """
    rng = np.random.default_rng(config.seed)
    out = np.empty(config.path_length)
    z = config.z0
    for i in range(config.path_length):
        a = rng.uniform(config.coeff_low, config.coeff_high)
        eta = rng.standard_normal()
        z = a * z + config.sigma * eta
        out[i] = z
    return Series(start_t, out)


def run_trials(
    n_trials: int,
    sim: SimConfig,
    band: BandParams,
    window: Window,
    horizon: int,
    ma: MovingAverageConfig,
) -> TrialAggregate:
    """Run seeded trials and aggregate smoothing/extrapolation residuals.

    Per trial: generate a path starting at ``window.start_t``, smooth the
    whole path (see the module docstring for what that implies at the
    window edge), fit the window on the smoothed values, then record
    absolute errors of the fitted curve against the raw path on the window
    and at the ``horizon`` points after it.

    Parameters
    ----------
    n_trials : int
        Number of independent trials; trial i is seeded ``sim.seed XOR i``.
    sim : SimConfig
        Path model.  ``sim.path_length`` must cover window + horizon.
    band : BandParams
        Fit parameters; the window must hold exactly ``2 * n_modes + 1``
        samples.
    window : Window
        Fitting window, anchored wherever the experiment wants on the time
        axis (the atoms are not shift-invariant).
    horizon : int
        Number of forecast points scored past the window.
    ma : MovingAverageConfig
        Smoother applied to each path before fitting.

    Returns
    -------
    TrialAggregate
        Means over trials; sums are accumulated in trial order and divided
        by ``n_trials`` once at the end.
    """
    if n_trials < 1:
        raise ValueError(f"n_trials must be >= 1, got {n_trials}")
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    length = window.length
    if length != band.n_coeffs:
        raise ValueError(
            f"window length {length} must equal 2 * n_modes + 1 "
            f"({band.n_coeffs})"
        )
    if sim.path_length < length + horizon:
        raise ValueError(
            f"path_length {sim.path_length} cannot cover window length "
            f"{length} plus horizon {horizon}"
        )

    # The window geometry is trial-independent, so the Gram factorization is
    # shared; per-trial numbers are identical to refitting from scratch.
    gram = build_gram(band, window)
    factor = _regularized_factor(gram, band.ridge)
    atoms_window = _atoms(band, window.times())
    forecast_times = np.arange(window.end_t + 1, window.end_t + 1 + horizon)
    atoms_forecast = _atoms(band, forecast_times)

    sum_fc = np.zeros(horizon)
    sum_fc_sq = np.zeros(horizon)
    sum_sm = 0.0
    sum_sm_sq = 0.0
    for i in range(n_trials):
        trial_sim = replace(sim, seed=sim.seed ^ i)
        path = gen_path(trial_sim, start_t=window.start_t)
        raw_window = path.values[:length]
        raw_forecast = path.values[length : length + horizon]
        smoothed_window = moving_average(path, ma).values[:length]
        coeffs = _solve_with_factor(factor, atoms_window.T @ smoothed_window)
        err_sm = np.abs(atoms_window @ coeffs - raw_window)
        err_fc = np.abs(atoms_forecast @ coeffs - raw_forecast)
        sum_sm += float(err_sm.sum())
        sum_sm_sq += float((err_sm * err_sm).sum())
        sum_fc += err_fc
        sum_fc_sq += err_fc * err_fc

    per_point = sum_fc / n_trials
    per_point_sq = sum_fc_sq / n_trials
    smoothing_total = sum_sm / n_trials
    extrap_total = float(per_point.sum())
    return TrialAggregate(
        n_trials=n_trials,
        per_point_residuals=per_point,
        per_point_squared=per_point_sq,
        smoothing_total=smoothing_total,
        smoothing_per_point=smoothing_total / length,
        smoothing_squared_per_point=sum_sm_sq / n_trials / length,
        extrap_total=extrap_total,
        extrap_per_point=extrap_total / horizon,
        extrap_squared_per_point=float(per_point_sq.sum()) / horizon,
    )
