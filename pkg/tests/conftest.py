"""
Pytest configuration and fixtures for the rainfall forecasting benchmark tests.
"""

import os

# Keep test runs from writing the rotating log file
os.environ.setdefault("LOG_TO_FILE", "False")

from pathlib import Path
from typing import Callable, List, Tuple

import numpy as np
import pytest

from app.models.bench_models import BenchConfig, SynthSource
from app.models.mars_models import MarsFitConfig
from app.models.timeseries_models import MonthlySeries
from app.services import neural
from app.services.timeseries import MONTH_NAMES


class QuadraticObjective:
    """``E(w) = (w - c)^T A (w - c) / 2 + offset`` with a gradient counter."""

    def __init__(self, A: np.ndarray, center: np.ndarray, offset: float = 0.0):
        self.A = np.asarray(A, dtype=float)
        self.center = np.asarray(center, dtype=float)
        self.offset = offset
        self.gradient_evaluations = 0

    def value(self, w: np.ndarray) -> float:
        d = w - self.center
        return float(0.5 * d @ self.A @ d) + self.offset

    def gradient(self, w: np.ndarray) -> np.ndarray:
        self.gradient_evaluations += 1
        return self.A @ (w - self.center)

    def value_and_gradient(self, w: np.ndarray) -> Tuple[float, np.ndarray]:
        return self.value(w), self.gradient(w)


class LogCoshObjective:
    """Sum of ``log(cosh(w))``: convex, but a full Newton step from far out overshoots."""

    def __init__(self):
        self.gradient_evaluations = 0

    def value(self, w: np.ndarray) -> float:
        return float(np.sum(np.logaddexp(w, -w) - np.log(2.0)))

    def gradient(self, w: np.ndarray) -> np.ndarray:
        self.gradient_evaluations += 1
        return np.tanh(w)

    def value_and_gradient(self, w: np.ndarray) -> Tuple[float, np.ndarray]:
        return self.value(w), self.gradient(w)


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator so every test draws the same data."""
    return np.random.default_rng(20240611)


@pytest.fixture
def hinge_data() -> Tuple[np.ndarray, np.ndarray]:
    """200 noise-free samples of ``y = 3 * max(0, x - 0.5)`` on [0, 1)."""
    x = np.arange(200) / 200.0
    return x[:, None], 3.0 * np.maximum(0.0, x - 0.5)


@pytest.fixture
def additive_config() -> MarsFitConfig:
    return MarsFitConfig(max_basis_functions=10, min_span=1, max_interaction_degree=1)


@pytest.fixture
def small_network() -> neural.MlpNetwork:
    return neural.init_weights([3, 4, 2, 1], seed=3)


@pytest.fixture
def linear_problem(rng) -> Tuple[neural.MlpNetwork, np.ndarray, np.ndarray]:
    """A 29-input linear network (30 parameters) on a least-squares problem."""
    X = rng.standard_normal((400, 29))
    y = X @ rng.standard_normal(29) + 0.5 + 0.1 * rng.standard_normal(400)
    net = neural.init_weights([29, 1], seed=11, output_activation=neural.Activation.LINEAR)
    return net, X, y


@pytest.fixture
def quadratic_factory() -> Callable[..., QuadraticObjective]:
    return QuadraticObjective


@pytest.fixture
def logcosh_objective() -> LogCoshObjective:
    return LogCoshObjective()


@pytest.fixture
def three_year_series() -> MonthlySeries:
    return MonthlySeries(start_year=2000, start_month=1, values=[float(v) for v in range(1, 37)])


@pytest.fixture
def write_long_csv(tmp_path) -> Callable[[MonthlySeries, str], Path]:
    """Write a series as ``year,month,value`` rows."""
    def _write(series: MonthlySeries, name: str = "long.csv") -> Path:
        lines = ["year,month,value"]
        for i, value in enumerate(series.values):
            lines.append(f"{series.year_of(i)},{series.month_of(i)},{value!r}")
        path = tmp_path / name
        path.write_text("\n".join(lines) + "\n")
        return path
    return _write


@pytest.fixture
def write_wide_csv(tmp_path) -> Callable[[MonthlySeries, str], Path]:
    """Write a January-aligned series as ``year,jan,...,dec`` rows."""
    def _write(series: MonthlySeries, name: str = "wide.csv") -> Path:
        lines = [",".join(["year"] + MONTH_NAMES)]
        for year in range(series.n_months // 12):
            cells: List[str] = [repr(v) for v in series.values[year * 12:(year + 1) * 12]]
            lines.append(",".join([str(series.start_year + year)] + cells))
        path = tmp_path / name
        path.write_text("\n".join(lines) + "\n")
        return path
    return _write


@pytest.fixture
def small_bench_config(tmp_path) -> BenchConfig:
    """A quick benchmark on a short synthetic series."""
    return BenchConfig(
        synth=SynthSource(years=12, seed=5, sigma=0.3),
        train_years=8,
        n_lags=12,
        max_basis_sweep=[3, 6],
        hidden_sizes=[4],
        epochs=25,
        seed=1,
        output_dir=str(tmp_path / "out"),
    )
