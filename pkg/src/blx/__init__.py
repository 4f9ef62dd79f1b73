"""blx: causal band-limited smoothing and extrapolation of scalar series.

Fit a band-limited curve to a window of integer-sampled data through a
ridge-regularized sinc-atom expansion, evaluate it inside the window
(smoothing) or past it (forecasting), correct its level with simple
data-derived shifts, and score it against a linear baseline in rolling
backtests or Monte Carlo batches.
"""

import os as _os

# Honor BLX_THREADS before any numerical library spins up its thread pools.
# Only fills knobs the user left unset, and only when BLX_THREADS is given.
_cap = _os.environ.get("BLX_THREADS")
if _cap:
    for _var in (
        "OMP_NUM_THREADS",
        "OPENBLAS_NUM_THREADS",
        "MKL_NUM_THREADS",
        "NUMEXPR_NUM_THREADS",
    ):
        _os.environ.setdefault(_var, _cap)
del _os, _cap

from .errors import (  # noqa: E402
    BlxError,
    IncomparableReports,
    InsufficientHistory,
    LengthMismatch,
    MissingColumn,
    NonNumericCell,
    SeriesTooShort,
    SingularSystem,
    WindowNotCovered,
)
from .core import (  # noqa: E402
    BandParams,
    Coefficients,
    FittedExtrapolator,
    GramMatrix,
    Series,
    Window,
    analyze,
    build_gram,
    evaluate,
    evaluate_many,
    fit,
    sinc,
    synthesize,
    tikhonov_solve,
)
from .preprocess import (  # noqa: E402
    BoundaryPolicy,
    LevelCorrection,
    MovingAverageConfig,
    level_correct,
    moving_average,
)
from .baseline import LinearBaselineConfig, linear_forecast  # noqa: E402
from .simulate import SimConfig, TrialAggregate, gen_path, run_trials  # noqa: E402
from .harness import (  # noqa: E402
    BacktestResult,
    ComparisonReport,
    ExperimentConfig,
    OverlapPolicy,
    ResidualReport,
    RollingForecastResult,
    SingleForecastResult,
    compare,
    residual_metrics,
    run_backtest,
    run_rolling_baseline,
    run_rolling_forecast,
    run_single_forecast,
)
from .io import (  # noqa: E402
    ColumnSpec,
    RunReport,
    emit_report,
    load_series_csv,
    load_table,
    numeric_content,
    parse_report,
)

__version__ = "0.1.0"
