"""
Benchmark service: data preparation, the MARS basis-count sweep, network
training, report assembly and file output.
"""

import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd

from app.logger_config import get_logger, log_performance
from app.models.bench_models import BenchConfig, BenchReport, ModelResult, SweepRow
from app.models.mars_models import ForwardTrace, MarsFitConfig, MarsModel, PruneTrace
from app.models.neural_models import TrainReport
from app.models.timeseries_models import MonthlySeries, SplitRanges, Standardizer
from app.services import mars_fit, neural, timeseries
from app.services.mars_model import model_predict_batch, model_to_json
from app.utils.errors import DataError, UsageError

logger = get_logger(__name__)

REPORT_TXT = "report.txt"
REPORT_JSON = "report.json"
TRAIN_CURVE_CSV = "train_curve.csv"
SWEEP_CSV = "sweep.csv"
PREDICTIONS_CSV = "predictions.csv"
MARS_FORWARD_CSV = "mars_forward.csv"
MARS_PRUNE_CSV = "mars_prune.csv"
MARS_MODEL_JSON = "mars_model.json"
ANN_MODEL_JSON = "ann_model.json"

TABLE_COLUMNS = ["Model", "Train RMSE", "Test RMSE", "Iterations", "Seconds"]


@dataclass(frozen=True)
class PreparedData:
    """Standardized lag dataset and the statistics it was built with."""
    series: MonthlySeries
    standardizer: Standardizer
    dataset: timeseries.LagDataset
    split: SplitRanges

    @property
    def X_train(self) -> np.ndarray:
        return self.dataset.X[self.split.train]

    @property
    def y_train(self) -> np.ndarray:
        return self.dataset.y[self.split.train]

    @property
    def X_test(self) -> np.ndarray:
        return self.dataset.X[self.split.test]

    @property
    def y_test(self) -> np.ndarray:
        return self.dataset.y[self.split.test]


@dataclass
class MarsSweepResult:
    model: MarsModel
    forward_trace: ForwardTrace
    prune_trace: PruneTrace
    max_basis: int
    rows: List[SweepRow]
    seconds: float


@dataclass
class AnnResult:
    net: neural.MlpNetwork
    report: TrainReport
    seconds: float


@dataclass
class BenchTraces:
    """Everything the plot-ready CSV files are written from."""
    train_report: TrainReport
    sweep: List[SweepRow]
    predictions: pd.DataFrame
    forward_trace: Optional[ForwardTrace] = None
    prune_trace: Optional[PruneTrace] = None


def _format_cell(value: Optional[float], decimals: int) -> str:
    return "-" if value is None else f"{value:.{decimals}f}"


def _ensure_directory(output_dir: Path) -> None:
    try:
        output_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise DataError(f"cannot create output directory: {e.strerror}", path=output_dir) from e


def _write_text(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise DataError(f"cannot write file: {e.strerror}", path=path) from e


def _write_frame(path: Path, frame: pd.DataFrame) -> None:
    try:
        frame.to_csv(path, index=False, lineterminator="\n")
    except OSError as e:
        raise DataError(f"cannot write file: {e.strerror}", path=path) from e


class BenchmarkService:
    """Service for the steps of one benchmark run."""

    def __init__(self):
        """Initialize the service with MARS defaults from settings."""
        self.mars_defaults = mars_fit.default_fit_config()
        logger.info(
            f"BenchmarkService initialized - improvement_tolerance: "
            f"{self.mars_defaults.improvement_tolerance}, "
            f"exhaustive_prune_limit: {self.mars_defaults.exhaustive_prune_limit}"
        )

    # --- Data ---

    def load_series(self, config: BenchConfig) -> MonthlySeries:
        if config.synth is not None:
            logger.info(
                f"Generating synthetic series: years={config.synth.years} "
                f"seed={config.synth.seed} sigma={config.synth.sigma}"
            )
            return timeseries.synth_monsoon(config.synth.years, config.synth.seed, config.synth.sigma)
        return timeseries.load_csv(config.data_path)

    def prepare_data(self, series: MonthlySeries, config: BenchConfig) -> PreparedData:
        """
        Standardize with training-segment statistics, lag-embed and split.

        Raises:
            UsageError: If ``train_years`` leaves no test data
        """
        n_years = series.year_of(series.n_months - 1) - series.start_year + 1
        if config.train_years >= n_years:
            raise UsageError(
                f"train_years={config.train_years} must be smaller than the {n_years} years in the series"
            )
        train_range = timeseries.training_range(series, config.train_years)
        standardizer = timeseries.fit_standardizer(series, train_range, config.standardization)
        standardized = timeseries.standardize(series, standardizer)
        dataset = timeseries.lag_embed(standardized, config.n_lags, series.start_year, series.start_month)
        split = timeseries.chrono_split(dataset, config.train_years)
        logger.info(
            f"Prepared {dataset.n_rows} lag rows ({split.n_train} train / {split.n_test} test), "
            f"{config.standardization.value} standardization"
        )
        return PreparedData(series=series, standardizer=standardizer, dataset=dataset, split=split)

    # --- Models ---

    def mars_config(self, config: BenchConfig, max_basis: int) -> MarsFitConfig:
        return self.mars_defaults.model_copy(update={
            "max_basis_functions": max_basis,
            "min_span": config.min_span,
            "max_interaction_degree": config.degree,
            "gcv_penalty": config.gcv_penalty,
        })

    def run_mars_sweep(self, data: PreparedData, config: BenchConfig) -> MarsSweepResult:
        """
        Fit one model per basis limit on the training rows and keep the one with
        the lowest training GCV; test rows only feed the sweep table.
        """
        start_time = time.perf_counter()
        X_train, y_train = data.X_train, data.y_train
        rows: List[SweepRow] = []
        best: Optional[MarsSweepResult] = None

        for max_basis in config.max_basis_sweep:
            model, forward_trace, prune_trace = mars_fit.fit(X_train, y_train, self.mars_config(config, max_basis))
            rows.append(SweepRow(
                max_basis=max_basis,
                n_terms=len(model.terms),
                train_gcv=model.fit_gcv,
                train_rmse=timeseries.rmse(model_predict_batch(model, X_train), y_train),
                test_rmse=timeseries.rmse(model_predict_batch(model, data.X_test), data.y_test),
            ))
            logger.debug(f"Sweep max_basis={max_basis}: {len(model.terms)} terms, gcv={model.fit_gcv:.6g}")
            if best is None or model.fit_gcv < best.model.fit_gcv:
                best = MarsSweepResult(model, forward_trace, prune_trace, max_basis, rows, 0.0)

        best.rows = rows
        best.seconds = log_performance(
            logger, "MARS sweep", start_time,
            settings=len(rows), selected=best.max_basis, terms=len(best.model.terms),
        )
        return best

    def run_ann(self, data: PreparedData, config: BenchConfig) -> AnnResult:
        start_time = time.perf_counter()
        layer_sizes = [config.n_lags] + list(config.hidden_sizes) + [1]
        net = neural.init_weights(layer_sizes, config.seed)
        report = neural.train_network(net, data.X_train, data.y_train, config.trainer, config.epochs)
        seconds = time.perf_counter() - start_time
        return AnnResult(net=net, report=report, seconds=seconds)

    def assemble_report(
        self,
        data: PreparedData,
        config: BenchConfig,
        mars: MarsSweepResult,
        ann: AnnResult
    ) -> BenchReport:
        """Comparison rows in standardized units: MARS, the network, climatology."""
        X_train, y_train, X_test, y_test = data.X_train, data.y_train, data.X_test, data.y_test
        climatology = timeseries.standardize_values(
            timeseries.climatology_forecast(data.series, data.dataset, data.split),
            data.standardizer,
            data.dataset.month_index,
        )
        models = [
            ModelResult(
                name="MARS",
                train_rmse=timeseries.rmse(model_predict_batch(mars.model, X_train), y_train),
                test_rmse=timeseries.rmse(model_predict_batch(mars.model, X_test), y_test),
                seconds=mars.seconds,
            ),
            ModelResult(
                name=f"ANN-{config.trainer.value.upper()}",
                train_rmse=timeseries.rmse(neural.mlp_predict(ann.net, X_train), y_train),
                test_rmse=timeseries.rmse(neural.mlp_predict(ann.net, X_test), y_test),
                iterations=ann.report.epochs_run,
                seconds=ann.seconds,
            ),
            ModelResult(
                name="Climatology",
                train_rmse=timeseries.rmse(climatology[data.split.train], y_train),
                test_rmse=timeseries.rmse(climatology[data.split.test], y_test),
            ),
        ]
        return BenchReport(
            models=models,
            sweep=mars.rows,
            selected_max_basis=mars.max_basis,
            ann_termination=ann.report.termination.value,
            train_rows=data.split.n_train,
            test_rows=data.split.n_test,
        )

    def prediction_frame(self, data: PreparedData, mars: MarsSweepResult, ann: AnnResult) -> pd.DataFrame:
        """Test-set traces in physical units."""
        test = data.split.test
        months = data.dataset.month_index[test]
        positions = data.dataset.target_positions[test]
        return pd.DataFrame({
            "year": data.dataset.target_year[test],
            "month_index": months,
            "actual": np.asarray(data.series.values)[positions],
            "mars_pred": timeseries.inverse_standardize(
                model_predict_batch(mars.model, data.X_test), data.standardizer, months
            ),
            "ann_pred": timeseries.inverse_standardize(
                neural.mlp_predict(ann.net, data.X_test), data.standardizer, months
            ),
        })

    # --- Output ---

    @staticmethod
    def emit_table(report: BenchReport, include_seconds: bool = True) -> str:
        """
        Fixed-width comparison table. RMSE values use four decimals; models
        without an iteration count show "-".
        """
        rows = [
            [
                m.name,
                f"{m.train_rmse:.4f}",
                f"{m.test_rmse:.4f}",
                "-" if m.iterations is None else str(m.iterations),
                _format_cell(m.seconds if include_seconds else None, 2),
            ]
            for m in report.models
        ]
        widths = [max([len(TABLE_COLUMNS[i])] + [len(r[i]) for r in rows]) for i in range(len(TABLE_COLUMNS))]

        def render(cells: List[str]) -> str:
            first = cells[0].ljust(widths[0])
            rest = [c.rjust(w) for c, w in zip(cells[1:], widths[1:])]
            return " | ".join([first] + rest)

        lines = [render(TABLE_COLUMNS)]
        if rows:
            lines.append("-+-".join("-" * w for w in widths))
            lines.extend(render(r) for r in rows)
        return "\n".join(lines)

    def emit_plot_csvs(self, output_dir: Path, traces: BenchTraces) -> List[str]:
        """
        Write the training curve, the basis-count sweep and the test-set traces
        (plus the MARS forward/prune logs when present).

        Returns:
            List[str]: File names written, relative to ``output_dir``
        """
        output_dir = Path(output_dir)
        _ensure_directory(output_dir)
        frames = {
            TRAIN_CURVE_CSV: neural.train_report_to_frame(traces.train_report),
            SWEEP_CSV: pd.DataFrame(
                [(r.max_basis, r.test_rmse, r.train_rmse, r.train_gcv, r.n_terms) for r in traces.sweep],
                columns=["max_basis", "test_rmse", "train_rmse", "train_gcv", "n_terms"],
            ),
            PREDICTIONS_CSV: traces.predictions,
        }
        if traces.forward_trace is not None:
            frames[MARS_FORWARD_CSV] = mars_fit.forward_trace_to_frame(traces.forward_trace)
        if traces.prune_trace is not None:
            frames[MARS_PRUNE_CSV] = mars_fit.prune_trace_to_frame(traces.prune_trace)

        for name, frame in frames.items():
            _write_frame(output_dir / name, frame)
        return list(frames)

    def write_models(self, output_dir: Path, mars: MarsSweepResult, ann: AnnResult) -> List[str]:
        output_dir = Path(output_dir)
        _ensure_directory(output_dir)
        _write_text(output_dir / MARS_MODEL_JSON, model_to_json(mars.model) + "\n")
        _write_text(output_dir / ANN_MODEL_JSON, neural.network_to_json(ann.net) + "\n")
        return [MARS_MODEL_JSON, ANN_MODEL_JSON]

    def write_report(self, output_dir: Path, report: BenchReport, record_timings: bool) -> List[str]:
        """
        Write ``report.txt`` and ``report.json``. Seconds are only written when
        ``record_timings`` is set so repeated runs produce identical files.
        """
        output_dir = Path(output_dir)
        _ensure_directory(output_dir)
        if not record_timings:
            report = report.model_copy(update={
                "models": [m.model_copy(update={"seconds": None}) for m in report.models]
            })
        report = report.model_copy(update={"files": report.files + [REPORT_TXT, REPORT_JSON]})

        summary = [
            self.emit_table(report, include_seconds=record_timings),
            "",
            f"Training rows: {report.train_rows}",
            f"Test rows: {report.test_rows}",
            f"Selected MARS basis limit: {report.selected_max_basis}",
            f"Network termination: {report.ann_termination}",
        ]
        _write_text(output_dir / REPORT_TXT, "\n".join(summary) + "\n")
        _write_text(output_dir / REPORT_JSON, json.dumps(report.model_dump(mode="json"), indent=2) + "\n")
        return [REPORT_TXT, REPORT_JSON]


# Global benchmark service instance
benchmark_service = BenchmarkService()
