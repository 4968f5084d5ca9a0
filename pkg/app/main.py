"""
Command-line entry point for the rainfall forecasting benchmark.
"""

import argparse
import sys
from typing import Any, Dict, List, NoReturn, Optional, Sequence

from dotenv import dotenv_values

# --- Core Application Imports ---
from config.settings import get_settings
from app.logger_config import set_log_level, setup_logger
from app.controllers.bench_controller import run_benchmark
from app.middleware.error_handler import EXIT_OK, handle_exception
from app.middleware.run_context import tracked_run
from app.models.bench_models import BenchConfig, SynthSource
from app.services.benchmark_service import benchmark_service
from app.utils.errors import UsageError

# --- Initialize Settings and Logger ---
settings = get_settings()
logger = setup_logger(__name__)


class BenchArgumentParser(argparse.ArgumentParser):
    """Argument parser that reports problems as usage errors instead of exiting."""

    def error(self, message: str) -> NoReturn:
        raise UsageError(message)


# --- Option parsing ---

def parse_int_list(text: str) -> List[int]:
    """Comma-separated integers, e.g. ``5,10,15``."""
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got '{text}'") from None


def parse_synth(text: str) -> SynthSource:
    """``YEARS:SEED:SIGMA``."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"expected YEARS:SEED:SIGMA, got '{text}'")
    try:
        return SynthSource(years=int(parts[0]), seed=int(parts[1]), sigma=float(parts[2]))
    except ValueError as e:
        raise UsageError(f"invalid synthetic series '{text}': {e}") from None


def parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "1", "t", "yes"):
        return True
    if lowered in ("false", "0", "f", "no"):
        return False
    raise UsageError(f"expected a boolean, got '{text}'")


def _parse_int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"expected an integer, got '{text}'") from None


def _parse_float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"expected a number, got '{text}'") from None


# Option name (flag without dashes, or config-file key) -> (BenchConfig field, parser)
OPTIONS: Dict[str, tuple] = {
    "data": ("data_path", str),
    "synth": ("synth", parse_synth),
    "train_years": ("train_years", _parse_int),
    "lags": ("n_lags", _parse_int),
    "max_basis_sweep": ("max_basis_sweep", parse_int_list),
    "min_span": ("min_span", _parse_int),
    "degree": ("degree", _parse_int),
    "gcv_penalty": ("gcv_penalty", _parse_float),
    "hidden": ("hidden_sizes", parse_int_list),
    "epochs": ("epochs", _parse_int),
    "trainer": ("trainer", str),
    "seed": ("seed", _parse_int),
    "out": ("output_dir", str),
    "standardization": ("standardization", str),
    "record_timings": ("record_timings", parse_bool),
}


def _apply(values: Dict[str, Any], option: str, raw: Any, parse: bool) -> None:
    field, parser = OPTIONS[option]
    value = parser(raw) if parse else raw
    values[field] = value
    # A data source replaces the other one from lower layers
    if field == "data_path":
        values["synth"] = None
    elif field == "synth":
        values["data_path"] = None


def default_values() -> Dict[str, Any]:
    return {
        "data_path": None,
        "synth": None,
        "train_years": settings.BENCH_TRAIN_YEARS,
        "n_lags": settings.BENCH_N_LAGS,
        "max_basis_sweep": list(settings.BENCH_MAX_BASIS_SWEEP),
        "min_span": settings.MARS_MIN_SPAN,
        "degree": settings.MARS_MAX_DEGREE,
        "gcv_penalty": settings.MARS_GCV_PENALTY,
        "hidden_sizes": list(settings.ANN_HIDDEN_SIZES),
        "epochs": settings.ANN_EPOCHS,
        "trainer": settings.ANN_TRAINER,
        "seed": settings.BENCH_SEED,
        "output_dir": settings.BENCH_OUTPUT_DIR,
        "record_timings": settings.BENCH_RECORD_TIMINGS,
    }


def read_config_file(path: str) -> Dict[str, str]:
    """Flat ``key=value`` file; keys use the flag names (dashes or underscores)."""
    try:
        with open(path, encoding="utf-8") as stream:
            raw = dotenv_values(stream=stream)
    except OSError as e:
        raise UsageError(f"cannot read config file {path}: {e.strerror}") from e
    entries = {}
    for key, value in raw.items():
        option = key.strip().lower().replace("-", "_")
        if option not in OPTIONS:
            raise UsageError(f"unknown key '{key}' in config file {path}")
        if value is None:
            raise UsageError(f"key '{key}' in config file {path} has no value")
        entries[option] = value
    return entries


def build_config(args: argparse.Namespace) -> BenchConfig:
    """
    Merge settings defaults, the optional config file and command-line flags,
    in increasing order of precedence, and validate the result.
    """
    values = default_values()
    if args.config:
        for option, raw in read_config_file(args.config).items():
            _apply(values, option, raw, parse=True)
    for option in OPTIONS:
        given = getattr(args, option, None)
        if given is not None:
            _apply(values, option, given, parse=False)
    if values["data_path"] is None and values["synth"] is None:
        raise UsageError("one of --data or --synth is required")
    return BenchConfig(**values)


def build_parser() -> argparse.ArgumentParser:
    parser = BenchArgumentParser(
        prog="rainbench",
        description="Compare MARS and a feedforward network on one-month-ahead rainfall forecasting",
    )
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--data", help="CSV file (year,month,value or year,jan..dec)")
    source.add_argument("--synth", type=parse_synth, metavar="YEARS:SEED:SIGMA",
                        help="Generate a synthetic monsoon-like series")
    parser.add_argument("--config", help="Flat key=value configuration file")
    parser.add_argument("--train-years", dest="train_years", type=_parse_int,
                        help=f"Years used for training (default {settings.BENCH_TRAIN_YEARS})")
    parser.add_argument("--lags", type=_parse_int,
                        help=f"Lagged months per input row (default {settings.BENCH_N_LAGS})")
    parser.add_argument("--max-basis-sweep", dest="max_basis_sweep", type=parse_int_list,
                        help="Comma-separated MARS basis limits, ascending")
    parser.add_argument("--min-span", dest="min_span", type=_parse_int, help="MARS minimum span")
    parser.add_argument("--degree", type=_parse_int, help="MARS maximum interaction degree")
    parser.add_argument("--gcv-penalty", dest="gcv_penalty", type=_parse_float,
                        help="GCV cost per knot (default 2, or 3 with interactions)")
    parser.add_argument("--hidden", type=parse_int_list, help="Hidden layer sizes, e.g. 12,12")
    parser.add_argument("--epochs", type=_parse_int, help=f"Training epochs (default {settings.ANN_EPOCHS})")
    parser.add_argument("--trainer", choices=["gd", "cg", "scg"], help="Network optimizer")
    parser.add_argument("--seed", type=_parse_int, help="Weight initialization seed")
    parser.add_argument("--out", help=f"Output directory (default {settings.BENCH_OUTPUT_DIR})")
    parser.add_argument("--standardization", choices=["global", "monthly"],
                        help="Pool training statistics globally or per calendar month")
    parser.add_argument("--record-timings", dest="record_timings", action="store_const", const=True,
                        help="Write wall-clock seconds into report files")
    parser.add_argument("--log-level", dest="log_level",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="Console log level")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run the benchmark and return the process exit code:
    0 success, 1 usage error, 2 data error, 3 numerical failure.
    """
    try:
        args = build_parser().parse_args(argv)
        if args.log_level:
            set_log_level(args.log_level)
        logger.info(f"Starting {settings.PROJECT_NAME} in {settings.APP_ENV} mode")
        config = build_config(args)
        with tracked_run("benchmark"):
            report = run_benchmark(config)
    except Exception as e:
        return handle_exception(e)

    print(benchmark_service.emit_table(report))
    logger.info(f"Wrote {len(report.files)} files to {config.output_dir}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
