"""Causal band-limited fitting and extrapolation for integer-sampled series.

A signal with angular bandwidth ``omega`` is represented on a window of
integer sample times as a finite combination of shifted sinc atoms.  The
synthesis operator maps atom coefficients to time-domain values; its adjoint
(analysis) accumulates windowed data against the same atoms.  Fitting solves
the ridge-regularized normal equations

    (G + ridge * I) y = analyze(data)

where ``G`` is the Gram matrix of the atoms restricted to the window, and the
fitted model can then be evaluated at any integer time — inside the window
(smoothing) or past its right edge (extrapolation).

Everything here is pure and deterministic: identical inputs give bitwise
identical outputs within one interpreter/BLAS install.  All reductions run in
a fixed order (times ascending, atom index ascending), so repeated runs agree.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .errors import SingularSystem, WindowNotCovered

__all__ = [
    "BandParams",
    "Window",
    "Series",
    "Coefficients",
    "GramMatrix",
    "FittedExtrapolator",
    "sinc",
    "synthesize",
    "analyze",
    "build_gram",
    "tikhonov_solve",
    "fit",
    "evaluate",
    "evaluate_many",
]

log = logging.getLogger(__name__)

# Below this threshold sin(x)/x is replaced by its Taylor series; 1 - x^2/6
# is exact to double precision for |x| < 1e-8 and removes the 0/0 at x = 0.
_SINC_SERIES_CUTOFF = 1e-8

# A Gram matrix is accepted as positive semidefinite if its smallest
# eigenvalue is no more negative than this fraction of the largest diagonal.
_PSD_TOL_FACTOR = 1e-10


@dataclass(frozen=True)
class BandParams:
    """Band and regularization parameters for a fit.

    Parameters
    ----------
    omega : float
        Angular bandwidth, strictly between 0 and pi (integer sampling).
    n_modes : int
        Atom index range is -n_modes .. n_modes, so a fit has
        ``2 * n_modes + 1`` coefficients.
    ridge : float
        Tikhonov ridge added to the Gram diagonal.  Zero is allowed but the
        fit then fails with :class:`SingularSystem` unless the Gram matrix is
        numerically positive definite on its own.
    """

    omega: float
    n_modes: int
    ridge: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.omega < np.pi):
            raise ValueError(f"omega must lie in (0, pi), got {self.omega}")
        if self.n_modes < 1:
            raise ValueError(f"n_modes must be >= 1, got {self.n_modes}")
        if self.ridge < 0.0:
            raise ValueError(f"ridge must be >= 0, got {self.ridge}")

    @property
    def n_coeffs(self) -> int:
        return 2 * self.n_modes + 1


@dataclass(frozen=True)
class Window:
    """Inclusive range of integer sample times ``start_t .. end_t``."""

    start_t: int
    end_t: int

    def __post_init__(self):
        if self.end_t < self.start_t:
            raise ValueError(
                f"window end {self.end_t} precedes start {self.start_t}"
            )

    @property
    def length(self) -> int:
        return self.end_t - self.start_t + 1

    def times(self) -> np.ndarray:
        return np.arange(self.start_t, self.end_t + 1)

    def uniqueness_regime(self, n_modes: int) -> bool:
        """True when the window holds at most ``2 * n_modes + 1`` samples.

        In that regime the atoms can interpolate the window exactly, so an
        unregularized fit (if it factorizes) is the unique interpolant.
        Longer windows overdetermine the coefficients and the fit is a
        least-squares compromise.
        """
        return self.length <= 2 * n_modes + 1


@dataclass(frozen=True, eq=False)
class Series:
    """Scalar values at consecutive integer times starting at ``start_t``."""

    start_t: int
    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=float)
        if arr.ndim != 1:
            raise ValueError("series values must be one-dimensional")
        if arr.size == 0:
            raise ValueError("series must hold at least one value")
        if not np.all(np.isfinite(arr)):
            raise ValueError("series values must all be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def end_t(self) -> int:
        return self.start_t + len(self.values) - 1

    def __len__(self) -> int:
        return len(self.values)

    def times(self) -> np.ndarray:
        return np.arange(self.start_t, self.end_t + 1)

    def covers(self, first_t: int, last_t: int) -> bool:
        return self.start_t <= first_t and last_t <= self.end_t

    def value_at(self, t: int) -> float:
        if not self.covers(t, t):
            raise WindowNotCovered(
                f"t={t} outside series range [{self.start_t}, {self.end_t}]"
            )
        return float(self.values[t - self.start_t])

    def window_values(self, window: Window) -> np.ndarray:
        if not self.covers(window.start_t, window.end_t):
            raise WindowNotCovered(
                f"window [{window.start_t}, {window.end_t}] not covered by "
                f"series range [{self.start_t}, {self.end_t}]"
            )
        lo = window.start_t - self.start_t
        return self.values[lo : lo + window.length]

    def subseries(self, first_t: int, last_t: int) -> "Series":
        if not self.covers(first_t, last_t):
            raise WindowNotCovered(
                f"range [{first_t}, {last_t}] not covered by series range "
                f"[{self.start_t}, {self.end_t}]"
            )
        lo = first_t - self.start_t
        return Series(first_t, self.values[lo : lo + (last_t - first_t + 1)])


@dataclass(frozen=True, eq=False)
class Coefficients:
    """Atom coefficients ordered by index ``-n_modes .. n_modes``."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=float)
        if arr.ndim != 1:
            raise ValueError("coefficients must be one-dimensional")
        if arr.size < 3 or arr.size % 2 == 0:
            raise ValueError(
                f"coefficient count must be odd and >= 3, got {arr.size}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficients must all be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def n_modes(self) -> int:
        return (len(self.values) - 1) // 2

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, k: int) -> float:
        """Coefficient for atom index k (k may be negative)."""
        n = self.n_modes
        if not -n <= k <= n:
            raise IndexError(f"atom index {k} outside [-{n}, {n}]")
        return float(self.values[k + n])


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """Gram matrix of the windowed sinc atoms.

    ``entries[i, j]`` is the inner product over the window of atoms with
    indices ``i - n_modes`` and ``j - n_modes``.  The array is exactly
    symmetric by construction and must be positive semidefinite to within a
    small eigenvalue tolerance relative to its largest diagonal entry.
    """

    entries: np.ndarray
    window: Window
    params: BandParams

    def __post_init__(self):
        arr = np.array(self.entries, dtype=float)
        n = self.params.n_coeffs
        if arr.shape != (n, n):
            raise ValueError(
                f"gram matrix shape {arr.shape} does not match "
                f"{n} coefficients"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("gram matrix entries must all be finite")
        if not np.array_equal(arr, arr.T):
            raise ValueError("gram matrix must be exactly symmetric")
        tol = _PSD_TOL_FACTOR * max(float(np.max(np.diag(arr))), 1e-300)
        smallest = float(np.linalg.eigvalsh(arr)[0])
        if smallest < -tol:
            raise ValueError(
                f"gram matrix is not positive semidefinite: "
                f"smallest eigenvalue {smallest:.3e}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class FittedExtrapolator:
    """Immutable result of a fit: parameters, window, coefficients, shifts.

    The two level shifts default to zero; level-correction heuristics return
    a new model with one of them set.  ``evaluate`` adds the history shift at
    times inside the window and the forecast shift past its right edge.
    """

    params: BandParams
    window: Window
    coeffs: Coefficients
    level_shift_history: float = 0.0
    level_shift_forecast: float = 0.0

    def __post_init__(self):
        if len(self.coeffs) != self.params.n_coeffs:
            raise ValueError(
                f"coefficient count {len(self.coeffs)} does not match "
                f"params ({self.params.n_coeffs})"
            )


def sinc(x):
    """Unnormalized sinc: sin(x) / x, with sinc(0) = 1 exactly.

    Accepts a scalar or array; near zero the Taylor series 1 - x**2 / 6 is
    used, which is exact to double precision inside the cutoff.
    """
    arr = np.asarray(x, dtype=float)
    small = np.abs(arr) < _SINC_SERIES_CUTOFF
    safe = np.where(small, 1.0, arr)
    out = np.where(small, 1.0 - arr * arr / 6.0, np.sin(safe) / safe)
    if out.ndim == 0:
        return float(out)
    return out


def _atoms(params: BandParams, times: np.ndarray) -> np.ndarray:
    """Atom values q_k(t) = (omega/pi) * sinc(k*pi + omega*t).

    Returns an array of shape (len(times), 2*n_modes + 1) with atom index
    ascending along the second axis.
    """
    times = np.asarray(times, dtype=float)
    k = np.arange(-params.n_modes, params.n_modes + 1, dtype=float)
    args = k * np.pi + params.omega * times[:, None]
    return (params.omega / np.pi) * sinc(args)


def synthesize(params: BandParams, coeffs: Coefficients, t: float) -> float:
    """Value at time t of the band-limited signal with the given coefficients.

    Computes (omega/pi) * sum_k coeffs[k] * sinc(k*pi + omega*t), with the
    sum running over atom indices in ascending order.
    """
    if len(coeffs) != params.n_coeffs:
        raise ValueError(
            f"coefficient count {len(coeffs)} does not match params "
            f"({params.n_coeffs})"
        )
    row = _atoms(params, np.array([t]))[0]
    return float(row @ coeffs.values)


def analyze(params: BandParams, window: Window, data: Series) -> Coefficients:
    """Adjoint of :func:`synthesize` restricted to the window.

    Entry k of the result is (omega/pi) * sum over window times t of
    sinc(k*pi + omega*t) * data(t), accumulated with t ascending.
    """
    vals = data.window_values(window)
    atoms = _atoms(params, window.times())
    return Coefficients(atoms.T @ vals)


def build_gram(params: BandParams, window: Window) -> GramMatrix:
    """Gram matrix of the windowed atoms.

    Entry (k, m) is (omega/pi)**2 * sum over window times t of
    sinc(m*pi + omega*t) * sinc(k*pi + omega*t).  The sum runs over t in
    ascending order as a compensated (Neumaier) accumulation of rank-one
    outer products, which keeps even the heavily cancelling far-off-diagonal
    entries accurate to full precision and makes the result exactly
    symmetric, since every outer product is.

    The matrix becomes severely ill-conditioned as the window grows, which
    is why fits regularize with a ridge.
    """
    atoms = _atoms(params, window.times())
    dim = params.n_coeffs
    entries = np.zeros((dim, dim))
    comp = np.zeros((dim, dim))
    for row in atoms:  # t ascending
        term = np.outer(row, row)
        bumped = entries + term
        comp += np.where(
            np.abs(entries) >= np.abs(term),
            (entries - bumped) + term,
            (term - bumped) + entries,
        )
        entries = bumped
    entries += comp
    return GramMatrix(entries, window, params)


def _regularized_factor(gram: GramMatrix, ridge: float):
    """Cholesky factor of (gram + ridge * I), or raise SingularSystem."""
    if ridge < 0.0:
        raise ValueError(f"ridge must be >= 0, got {ridge}")
    reg = gram.entries + ridge * np.eye(gram.dim)
    try:
        factor = cho_factor(reg, lower=False)
    except LinAlgError as exc:
        raise SingularSystem(
            f"normal equations not positive definite at ridge={ridge}; "
            f"increase the ridge"
        ) from exc
    pivots = np.abs(np.diag(factor[0]))
    cond = (float(pivots.max()) / float(pivots.min())) ** 2
    log.debug(
        "factorized %dx%d system at ridge=%g, cond ~ %.3e",
        gram.dim, gram.dim, ridge, cond,
    )
    return factor


def _solve_with_factor(factor, rhs: np.ndarray) -> np.ndarray:
    return cho_solve(factor, rhs)


def tikhonov_solve(
    gram: GramMatrix, ridge: float, rhs: Coefficients
) -> Coefficients:
    """Solve (gram + ridge * I) y = rhs through a Cholesky factorization.

    The matrix is factorized, never explicitly inverted.  Raises
    :class:`SingularSystem` when the factorization fails, which with
    ridge = 0 signals a numerically singular Gram matrix.
    """
    if len(rhs) != gram.dim:
        raise ValueError(
            f"rhs length {len(rhs)} does not match gram dimension {gram.dim}"
        )
    factor = _regularized_factor(gram, ridge)
    return Coefficients(_solve_with_factor(factor, rhs.values))


def fit(params: BandParams, window: Window, data: Series) -> FittedExtrapolator:
    """Fit band-limited coefficients to the data restricted to the window.

    Pipeline: accumulate the adjoint of the data, build the window Gram
    matrix, solve the ridge-regularized normal equations.  Both level shifts
    of the returned model are zero.

    Parameters
    ----------
    params : BandParams
        Bandwidth, mode count, and ridge.
    window : Window
        Integer times the fit is conditioned on; ``data`` must cover it.
    data : Series
        Observations (typically pre-smoothed) indexed by absolute time.

    Returns
    -------
    FittedExtrapolator
    """
    rhs = analyze(params, window, data)
    gram = build_gram(params, window)
    coeffs = tikhonov_solve(gram, params.ridge, rhs)
    return FittedExtrapolator(params=params, window=window, coeffs=coeffs)


def evaluate(model: FittedExtrapolator, t: float) -> float:
    """Model value at time t, including the applicable level shift.

    Times up to the window end get the history shift; later times get the
    forecast shift.  Extrapolation is nothing special: it is this function
    at t past the window.
    """
    base = synthesize(model.params, model.coeffs, t)
    if t <= model.window.end_t:
        return base + model.level_shift_history
    return base + model.level_shift_forecast


def evaluate_many(model: FittedExtrapolator, times) -> np.ndarray:
    """Vectorized :func:`evaluate` over an array of times."""
    times = np.asarray(times, dtype=float)
    base = _atoms(model.params, times) @ model.coeffs.values
    shifts = np.where(
        times <= model.window.end_t,
        model.level_shift_history,
        model.level_shift_forecast,
    )
    return base + shifts
