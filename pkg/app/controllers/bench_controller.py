"""
Benchmark controller: runs the MARS sweep and the network fit concurrently
and assembles the report and output files.
"""

import contextvars
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional

from app.logger_config import get_logger, log_performance
from app.models.bench_models import BenchConfig, BenchReport
from app.services.benchmark_service import BenchTraces, benchmark_service
from config.settings import get_settings

logger = get_logger(__name__)
settings = get_settings()


class BenchController:
    """Controller for benchmark runs."""

    def __init__(self, max_workers: Optional[int] = None):
        """Initialize benchmark controller."""
        self.max_workers = max_workers or settings.BENCH_MAX_WORKERS

    def run_benchmark(self, config: BenchConfig) -> BenchReport:
        """
        Execute the pipeline end to end for both models.

        Args:
            config: Validated benchmark configuration

        Returns:
            BenchReport: Comparison rows, sweep table and emitted files

        Raises:
            DataError: If the series cannot be read or outputs cannot be written
            UsageError: If the configuration does not fit the series
            TrainingDivergedError: If network training produced a non-finite loss
        """
        start_time = time.perf_counter()
        series = benchmark_service.load_series(config)
        data = benchmark_service.prepare_data(series, config)

        # Both fits read the same immutable arrays
        with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            mars_future = executor.submit(
                contextvars.copy_context().run, benchmark_service.run_mars_sweep, data, config
            )
            ann_future = executor.submit(
                contextvars.copy_context().run, benchmark_service.run_ann, data, config
            )
            mars = mars_future.result()
            ann = ann_future.result()

        report = benchmark_service.assemble_report(data, config, mars, ann)
        output_dir = Path(config.output_dir)
        traces = BenchTraces(
            train_report=ann.report,
            sweep=mars.rows,
            predictions=benchmark_service.prediction_frame(data, mars, ann),
            forward_trace=mars.forward_trace,
            prune_trace=mars.prune_trace,
        )
        files = benchmark_service.emit_plot_csvs(output_dir, traces)
        files += benchmark_service.write_models(output_dir, mars, ann)
        report = report.model_copy(update={"files": files})
        files += benchmark_service.write_report(output_dir, report, config.record_timings)
        report = report.model_copy(update={"files": files})

        log_performance(logger, "Benchmark", start_time, output_dir=str(output_dir), files=len(files))
        return report


def run_benchmark(config: BenchConfig) -> BenchReport:
    """Run one benchmark with the default controller."""
    return bench_controller.run_benchmark(config)


# Global benchmark controller instance
bench_controller = BenchController()
