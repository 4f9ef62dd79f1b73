"""Command line front end: simulate, forecast, backtest, compare.

Every run emits one report (JSON by default, long-form CSV with
``--format csv``) whose config block echoes all parameters, so any report
can be regenerated with :func:`replay`.  Exit codes: 0 on success, 1 for
usage errors, 2 for data errors.
"""

from __future__ import annotations

import argparse
import math
import re
import sys
import time

from . import __version__
from .core import BandParams, Series, Window, evaluate_many
from .errors import BlxError
from .harness import (
    ExperimentConfig,
    ResidualReport,
    compare,
    run_backtest,
    run_single_forecast,
)
from .io import (
    ColumnSpec,
    RunReport,
    emit_report,
    load_table,
    parse_report,
    report_from_dict,
)
from .preprocess import LevelCorrection, MovingAverageConfig
from .baseline import LinearBaselineConfig
from .simulate import SimConfig, run_trials


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse normally exits 2 on bad flags; route through our own codes.
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _parse_omega(text: str) -> float:
    t = text.strip().lower().replace(" ", "")
    m = re.fullmatch(r"pi(?:/([0-9]+(?:\.[0-9]+)?))?", t)
    if m:
        return math.pi / float(m.group(1)) if m.group(1) else math.pi
    try:
        return float(t)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected a number or pi/<d>, got {text!r}"
        ) from None


def _parse_correction(text: str) -> list:
    t = text.strip().lower()
    if t in ("", "none"):
        return []
    if t == "fixed":  # rebase the history, then shift the forecast
        return ["historical-rebase", "last-mv"]
    modes = [p.strip() for p in t.split(",")]
    for mode in modes:
        try:
            LevelCorrection(mode)
        except ValueError:
            raise argparse.ArgumentTypeError(
                f"unknown correction mode {mode!r}"
            ) from None
    return modes


def _parse_column(text: str):
    return int(text) if re.fullmatch(r"[0-9]+", text.strip()) else text


def _add_output_flags(p):
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument(
        "--format", choices=("json", "csv"), default="json",
        help="report format (default json)",
    )


def _add_band_flags(p, ridge_default):
    p.add_argument("--n-modes", type=int, default=45,
                   help="atom index range is -n..n (default 45)")
    p.add_argument("--omega", type=_parse_omega, default=math.pi / 4,
                   help="angular bandwidth in (0, pi); accepts pi/4 forms")
    p.add_argument("--ridge", type=float, default=ridge_default,
                   help=f"Tikhonov ridge (default {ridge_default})")


def _add_ma_flags(p):
    p.add_argument("--ma-width", type=int, default=5,
                   help="moving-average width, odd (default 5)")
    p.add_argument(
        "--ma-boundary",
        choices=("replicate-first-full", "shrink-window"),
        default="replicate-first-full",
        help="moving-average edge policy",
    )


def _add_input_flags(p):
    p.add_argument("--input", required=True, help="CSV file to read")
    p.add_argument("--column", type=_parse_column, default=0,
                   help="value column: header name or 0-based index")
    p.add_argument("--skip-header", action="store_true",
                   help="skip the first row when --column is an index")
    p.add_argument("--date-column", type=_parse_column, default=None,
                   help="optional date column, echoed into the report")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="blx",
        description="Causal band-limited smoothing and extrapolation.",
    )
    parser.add_argument(
        "--version", action="version", version=f"blx {__version__}"
    )
    sub = parser.add_subparsers(
        dest="command", required=True, parser_class=_Parser
    )

    p = sub.add_parser(
        "simulate",
        help="score the fit on random autoregressive paths",
    )
    p.add_argument("--trials", type=int, default=2000)
    _add_band_flags(p, ridge_default=0.05)
    p.add_argument("--horizon", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--coeff-low", type=float, default=0.0)
    p.add_argument("--coeff-high", type=float, default=1.0)
    p.add_argument("--z0", type=float, default=1.0)
    p.add_argument("--path-length", type=int, default=None,
                   help="defaults to window length + horizon")
    _add_ma_flags(p)
    _add_output_flags(p)

    p = sub.add_parser("forecast", help="fit one window of a CSV and forecast")
    _add_input_flags(p)
    p.add_argument("--window", type=int, default=91,
                   help="number of leading points to fit (default 91)")
    p.add_argument("--horizon", type=int, default=20)
    p.add_argument("--correction", type=_parse_correction, default=[],
                   help="none, fixed, or comma-joined correction modes")
    _add_band_flags(p, ridge_default=0.1)
    _add_ma_flags(p)
    p.add_argument("--metric", choices=("abs", "squared"), default="abs")
    _add_output_flags(p)

    p = sub.add_parser(
        "backtest", help="rolling forecasts versus the linear baseline"
    )
    _add_input_flags(p)
    p.add_argument("--window", type=int, default=91)
    p.add_argument("--horizon", type=int, default=5)
    p.add_argument("--repetitions", type=int, default=32)
    p.add_argument(
        "--overlap",
        choices=("none", "skip-first-horizon"),
        default="skip-first-horizon",
        help="emit the first horizon after each window, or the second",
    )
    p.add_argument("--correction", type=_parse_correction, default=[])
    p.add_argument("--baseline", type=int, default=90,
                   help="linear-baseline lookback in days (default 90)")
    p.add_argument("--baseline-on-smoothed", action="store_true",
                   help="anchor the baseline on the moving average")
    p.add_argument("--burn-in", type=int, default=0,
                   help="emitted days to exclude from the residual reports")
    _add_band_flags(p, ridge_default=0.1)
    _add_ma_flags(p)
    p.add_argument("--metric", choices=("abs", "squared"), default="abs")
    _add_output_flags(p)

    p = sub.add_parser("compare", help="compare the lead reports of two runs")
    p.add_argument("left", help="report JSON file (counted as causal)")
    p.add_argument("right", help="report JSON file (counted as baseline)")
    _add_output_flags(p)

    return parser


# ---------------------------------------------------------------------------
# Command runners.  Each takes the exact dict echoed into the report config,
# so replaying a parsed report regenerates the same numbers.


def run_simulate(settings: dict) -> RunReport:
    band = BandParams(**settings["band"])
    window = Window(**settings["window"])
    ma = MovingAverageConfig(**settings["ma"])
    sim = SimConfig(**settings["sim"])
    agg = run_trials(
        settings["trials"], sim, band, window, settings["horizon"], ma
    )
    reports = (
        ResidualReport("causal", "abs", agg.per_point_residuals),
        ResidualReport("causal", "squared", agg.per_point_squared),
    )
    aggregate = {
        "n_trials": agg.n_trials,
        "smoothing_total": agg.smoothing_total,
        "smoothing_per_point": agg.smoothing_per_point,
        "smoothing_squared_per_point": agg.smoothing_squared_per_point,
        "extrap_total": agg.extrap_total,
        "extrap_per_point": agg.extrap_per_point,
        "extrap_squared_per_point": agg.extrap_squared_per_point,
    }
    series = {"residual_profile": Series(1, agg.per_point_residuals)}
    return RunReport(
        command="simulate",
        config=settings,
        reports=reports,
        series=series,
        aggregate=aggregate,
    )


def _experiment_config(settings: dict, repetitions=1, overlap="none") -> ExperimentConfig:
    baseline = settings.get("baseline") or {}
    return ExperimentConfig(
        window_len=settings["window_len"],
        horizon=settings["horizon"],
        repetitions=repetitions,
        overlap=overlap,
        band=BandParams(**settings["band"]),
        ma=MovingAverageConfig(**settings["ma"]),
        correction=tuple(settings["correction"]),
        baseline=LinearBaselineConfig(**baseline) if baseline else LinearBaselineConfig(),
        burn_in=settings.get("burn_in", 0),
        metric=settings["metric"],
    )


def _load_input(settings: dict):
    spec = ColumnSpec(
        column=settings["column"],
        skip_header=settings["skip_header"],
        date_column=settings["date_column"],
    )
    return load_table(settings["input"], spec)


def run_forecast(settings: dict) -> RunReport:
    data, dates = _load_input(settings)
    config = _experiment_config(settings)
    result = run_single_forecast(data, config)
    window = result.model.window
    fitted = Series(
        window.start_t, evaluate_many(result.model, window.times())
    )
    actual = data.subseries(result.forecast.start_t, result.forecast.end_t)
    return RunReport(
        command="forecast",
        config=settings,
        reports=(result.report, result.history_report),
        series={
            "forecast": result.forecast,
            "actual": actual,
            "smoothed": result.smoothed,
            "fitted": fitted,
        },
        dates=dates,
    )


def run_backtest_cmd(settings: dict) -> RunReport:
    data, dates = _load_input(settings)
    config = _experiment_config(
        settings,
        repetitions=settings["repetitions"],
        overlap=settings["overlap"],
    )
    result = run_backtest(data, config)
    stitched = result.causal.stitched
    actual = data.subseries(stitched.start_t, stitched.end_t)
    return RunReport(
        command="backtest",
        config=settings,
        reports=(result.causal.report, result.linear.report),
        comparison=result.comparison,
        series={
            "forecast": stitched,
            "linear": result.linear.stitched,
            "actual": actual,
        },
        dates=dates,
    )


def run_compare(settings: dict) -> RunReport:
    with open(settings["left"], "rb") as fh:
        left = parse_report(fh.read())
    with open(settings["right"], "rb") as fh:
        right = parse_report(fh.read())
    left_report = report_from_dict(left["reports"][0])
    right_report = report_from_dict(right["reports"][0])
    comparison = compare(left_report, right_report)
    return RunReport(
        command="compare",
        config=settings,
        reports=(left_report, right_report),
        comparison=comparison,
    )


_RUNNERS = {
    "simulate": run_simulate,
    "forecast": run_forecast,
    "backtest": run_backtest_cmd,
    "compare": run_compare,
}


def replay(doc: dict) -> RunReport:
    """Regenerate a run from a parsed report's echoed config."""
    return _RUNNERS[doc["command"]](doc["config"])


def _settings_from_args(args) -> dict:
    if args.command == "simulate":
        n = args.n_modes
        length = args.path_length
        if length is None:
            length = (2 * n + 1) + args.horizon
        return {
            "trials": args.trials,
            "band": {
                "omega": args.omega, "n_modes": n, "ridge": args.ridge,
            },
            "window": {"start_t": -2 * n, "end_t": 0},
            "horizon": args.horizon,
            "ma": {"width": args.ma_width, "boundary": args.ma_boundary},
            "sim": {
                "sigma": args.sigma,
                "coeff_low": args.coeff_low,
                "coeff_high": args.coeff_high,
                "z0": args.z0,
                "path_length": length,
                "seed": args.seed,
            },
        }
    if args.command in ("forecast", "backtest"):
        settings = {
            "input": args.input,
            "column": args.column,
            "skip_header": args.skip_header,
            "date_column": args.date_column,
            "window_len": args.window,
            "horizon": args.horizon,
            "band": {
                "omega": args.omega,
                "n_modes": args.n_modes,
                "ridge": args.ridge,
            },
            "ma": {"width": args.ma_width, "boundary": args.ma_boundary},
            "correction": list(args.correction),
            "metric": args.metric,
        }
        if args.command == "backtest":
            settings["repetitions"] = args.repetitions
            settings["overlap"] = args.overlap
            settings["baseline"] = {
                "lookback": args.baseline,
                "use_smoothed": args.baseline_on_smoothed,
            }
            settings["burn_in"] = args.burn_in
        return settings
    return {"left": args.left, "right": args.right}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    started = time.perf_counter()
    try:
        report = _RUNNERS[args.command](_settings_from_args(args))
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except ValueError as exc:  # bad parameter values or combinations
        print(f"blx: invalid arguments: {exc}", file=sys.stderr)
        return 1
    except BlxError as exc:
        print(f"blx: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"blx: {exc}", file=sys.stderr)
        return 2
    report.elapsed_seconds = time.perf_counter() - started
    payload = emit_report(report, args.format)
    if args.out:
        try:
            with open(args.out, "wb") as fh:
                fh.write(payload)
        except OSError as exc:
            print(f"blx: {exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
