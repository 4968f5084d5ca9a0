"""
Monthly series pipeline: CSV ingestion, leakage-free standardization,
lag embedding into supervised pairs, chronological splitting, metrics and a
synthetic monsoon-like generator.
"""

import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from app.logger_config import get_logger
from app.models.timeseries_models import (
    MonthlySeries, SplitRanges, StandardizationMode, Standardizer
)
from app.utils.errors import DataError, DomainError, StructuralError

logger = get_logger(__name__)

MIN_MONTHS = 24
MONTH_NAMES = ["jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec"]
LONG_COLUMNS = ["year", "month", "value"]
WIDE_COLUMNS = ["year"] + MONTH_NAMES

# Wet-season template (mm) for a south-west monsoon climate
MONSOON_TEMPLATE = np.array([10.0, 15.0, 30.0, 110.0, 250.0, 650.0, 600.0, 380.0, 250.0, 300.0, 160.0, 40.0])
_AMPLITUDE_PERIOD_YEARS = 21.0
_AMPLITUDE_DEPTH = 0.2
# Month-to-month anomaly persistence; 0.98**12 keeps most of an anomaly into the next year
_ANOMALY_AUTOCORRELATION = 0.98


@dataclass(frozen=True)
class LagDataset:
    """
    Supervised pairs built from a monthly series.

    Row ``i`` holds the ``n_lags`` values preceding the target at series
    position ``target_positions[i]``.
    """
    X: np.ndarray
    y: np.ndarray
    month_index: np.ndarray
    target_year: np.ndarray
    target_positions: np.ndarray
    n_lags: int
    start_year: int = 0

    @property
    def n_rows(self) -> int:
        return int(self.y.shape[0])


# --- Ingestion ---

def _parse_number(text: str, path: Path, line: int, column: str, integer: bool = False) -> float:
    cell = "" if pd.isna(text) else str(text).strip()
    try:
        value = int(cell) if integer else float(cell)
    except ValueError:
        raise DataError(f"column '{column}': '{cell}' is not a number", path=path, line=line) from None
    if not integer and not math.isfinite(value):
        raise DataError(f"column '{column}': non-finite value '{cell}'", path=path, line=line)
    return value


def _read_long(frame: pd.DataFrame, path: Path) -> MonthlySeries:
    values: List[float] = []
    start: Optional[Tuple[int, int]] = None
    expected: Optional[Tuple[int, int]] = None
    for index, row in enumerate(frame.itertuples(index=False)):
        line = index + 2
        year = int(_parse_number(row[0], path, line, "year", integer=True))
        month = int(_parse_number(row[1], path, line, "month", integer=True))
        if not 1 <= month <= 12:
            raise DataError(f"month {month} outside 1-12", path=path, line=line)
        if expected is not None and (year, month) != expected:
            raise DataError(
                f"expected {expected[0]}-{expected[1]:02d}, found {year}-{month:02d}; "
                f"months must be consecutive",
                path=path, line=line,
            )
        if start is None:
            start = (year, month)
        values.append(_parse_number(row[2], path, line, "value"))
        expected = (year, month + 1) if month < 12 else (year + 1, 1)
    if start is None:
        raise DataError("no data rows", path=path)
    return MonthlySeries(start_year=start[0], start_month=start[1], values=values)


def _read_wide(frame: pd.DataFrame, path: Path) -> MonthlySeries:
    values: List[float] = []
    start_year: Optional[int] = None
    for index, row in enumerate(frame.itertuples(index=False)):
        line = index + 2
        year = int(_parse_number(row[0], path, line, "year", integer=True))
        if start_year is None:
            start_year = year
        elif year != start_year + index:
            raise DataError(
                f"expected year {start_year + index}, found {year}; years must be consecutive",
                path=path, line=line,
            )
        values.extend(
            _parse_number(cell, path, line, name) for name, cell in zip(MONTH_NAMES, row[1:])
        )
    if start_year is None:
        raise DataError("no data rows", path=path)
    return MonthlySeries(start_year=start_year, start_month=1, values=values)


def _drop_trailing_blank_rows(frame: pd.DataFrame) -> pd.DataFrame:
    # Blank lines stay in the frame so row numbers match file lines; only the tail is dropped
    if frame.empty:
        return frame
    blank = frame.fillna("").apply(lambda column: column.astype(str).str.strip().eq("")).all(axis=1)
    filled = np.flatnonzero(~blank.to_numpy())
    return frame.iloc[:filled[-1] + 1] if filled.size else frame.iloc[:0]


def load_csv(path: Union[str, Path]) -> MonthlySeries:
    """
    Read a monthly series in long (``year,month,value``) or wide
    (``year,jan,...,dec``) format; the header decides which.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError("file not found", path=path)
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skip_blank_lines=False)
    except pd.errors.EmptyDataError:
        raise DataError("file is empty", path=path) from None
    except pd.errors.ParserError as e:
        raise DataError(f"malformed CSV: {e}", path=path) from e

    frame = _drop_trailing_blank_rows(frame)
    header = [str(c).strip().lower() for c in frame.columns]
    if header == LONG_COLUMNS:
        series = _read_long(frame, path)
    elif header == WIDE_COLUMNS:
        series = _read_wide(frame, path)
    else:
        raise DataError(
            f"unrecognised header {','.join(header)}; expected "
            f"'{','.join(LONG_COLUMNS)}' or '{','.join(WIDE_COLUMNS)}'",
            path=path, line=1,
        )

    if series.n_months < MIN_MONTHS:
        raise DataError(f"{series.n_months} months found, at least {MIN_MONTHS} required", path=path)
    logger.info(f"Loaded {series.n_months} months from {path} starting {series.start_year}-{series.start_month:02d}")
    return series


# --- Standardization ---

def _months(series: MonthlySeries) -> np.ndarray:
    return np.array([series.month_of(i) for i in range(series.n_months)])


def training_range(series: MonthlySeries, train_years: int) -> Tuple[int, int]:
    """Half-open value positions falling in the first ``train_years`` years."""
    stop = 0
    while stop < series.n_months and series.year_of(stop) < series.start_year + train_years:
        stop += 1
    return 0, stop


def fit_standardizer(
    series: MonthlySeries,
    train_range: Tuple[int, int],
    mode: StandardizationMode = StandardizationMode.GLOBAL
) -> Standardizer:
    """
    Mean and population standard deviation of the training segment only.
    """
    start, stop = train_range
    if not 0 <= start < stop <= series.n_months:
        raise DomainError(f"training range {train_range} is empty or outside the series")
    segment = np.asarray(series.values[start:stop], dtype=float)

    if mode == StandardizationMode.GLOBAL:
        std = float(np.std(segment))
        if std == 0.0:
            raise DomainError("training segment is constant; cannot standardize")
        return Standardizer(mode=mode, means=[float(np.mean(segment))], stds=[std])

    months = _months(series)[start:stop]
    means, stds = [], []
    for month in range(1, 13):
        values = segment[months == month]
        if values.size == 0:
            raise DomainError(f"training segment has no values for month {month}")
        std = float(np.std(values))
        if std == 0.0:
            raise DomainError(f"training values for month {month} are constant; cannot standardize")
        means.append(float(np.mean(values)))
        stds.append(std)
    return Standardizer(mode=mode, means=means, stds=stds)


def _moments(standardizer: Standardizer, months: Optional[np.ndarray], size: int) -> Tuple[np.ndarray, np.ndarray]:
    if standardizer.mode == StandardizationMode.GLOBAL:
        return np.full(size, standardizer.mean), np.full(size, standardizer.std)
    if months is None or len(months) != size:
        raise StructuralError("monthly standardization needs one calendar month per value")
    index = np.asarray(months, dtype=int) - 1
    return np.asarray(standardizer.means)[index], np.asarray(standardizer.stds)[index]


def standardize_values(values: Sequence[float], standardizer: Standardizer,
                       months: Optional[Sequence[int]] = None) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    mean, std = _moments(standardizer, None if months is None else np.asarray(months), values.size)
    return (values - mean) / std


def standardize(series: MonthlySeries, standardizer: Standardizer) -> np.ndarray:
    """Z-scores ``(v - mean) / std`` of every value of the series."""
    return standardize_values(series.values, standardizer, _months(series))


def inverse_standardize(values: Sequence[float], standardizer: Standardizer,
                        months: Optional[Sequence[int]] = None) -> np.ndarray:
    """Back to physical units; ``months`` is required in monthly mode."""
    values = np.asarray(values, dtype=float)
    mean, std = _moments(standardizer, None if months is None else np.asarray(months), values.size)
    return values * std + mean


# --- Supervised pairs ---

def lag_embed(
    values: Sequence[float],
    n_lags: int = 12,
    start_year: int = 0,
    start_month: int = 1
) -> LagDataset:
    """
    Slide a window of ``n_lags`` values over the series; each window predicts
    the value that follows it.
    """
    values = np.asarray(values, dtype=float)
    if n_lags < 1:
        raise DomainError("n_lags must be at least 1")
    if values.ndim != 1:
        raise StructuralError(f"expected a 1-D series, got shape {values.shape}")
    n_rows = values.size - n_lags
    if n_rows <= 0:
        raise DomainError(f"series of length {values.size} is too short for {n_lags} lags")

    X = np.lib.stride_tricks.sliding_window_view(values, n_lags)[:n_rows].copy()
    positions = np.arange(n_lags, values.size)
    offset = start_month - 1 + positions
    return LagDataset(
        X=X,
        y=values[n_lags:].copy(),
        month_index=offset % 12 + 1,
        target_year=start_year + offset // 12,
        target_positions=positions,
        n_lags=n_lags,
        start_year=start_year,
    )


def chrono_split(dataset: LagDataset, train_years: int = 40) -> SplitRanges:
    """
    Training rows are those whose target falls in the first ``train_years``
    years of the series; every later row is a test row.
    """
    if train_years < 1:
        raise DomainError("train_years must be at least 1; the training set would be empty")
    cutoff = dataset.start_year + train_years
    n_train = int(np.searchsorted(dataset.target_year, cutoff, side='left'))
    if n_train == 0:
        raise DomainError(f"no targets fall within the first {train_years} years; the training set is empty")
    if n_train == dataset.n_rows:
        raise DomainError(f"train_years={train_years} covers the whole series; the test set is empty")
    return SplitRanges(train_start=0, train_stop=n_train, test_start=n_train, test_stop=dataset.n_rows)


# --- Metrics and baselines ---

def rmse(predicted: Sequence[float], actual: Sequence[float]) -> float:
    """Root mean squared error."""
    predicted = np.asarray(predicted, dtype=float)
    actual = np.asarray(actual, dtype=float)
    if predicted.shape != actual.shape:
        raise StructuralError(f"shape mismatch {predicted.shape} vs {actual.shape}")
    if predicted.size == 0:
        raise DomainError("rmse of an empty vector")
    difference = predicted - actual
    return float(np.sqrt(np.mean(difference * difference)))


def climatology_forecast(series: MonthlySeries, dataset: LagDataset, split: SplitRanges) -> np.ndarray:
    """
    Per-calendar-month mean of the training-era values, in physical units,
    for the target of every dataset row.
    """
    cutoff = int(dataset.target_positions[split.test_start]) if split.n_test else series.n_months
    months = _months(series)[:cutoff]
    values = np.asarray(series.values[:cutoff], dtype=float)
    means = np.zeros(12)
    for month in range(1, 13):
        selected = values[months == month]
        if selected.size == 0:
            raise DomainError(f"no training values for month {month}")
        means[month - 1] = selected.mean()
    return means[dataset.month_index - 1]


# --- Synthetic data ---

def synth_monsoon(
    years: int,
    seed: int,
    noise_sigma: float,
    start_year: int = 1893
) -> MonthlySeries:
    """
    Seasonal template scaled by a slow interannual amplitude cycle and
    persistent log-normal AR(1) anomalies with stationary standard deviation
    ``noise_sigma``. Wet and dry spells carry over from one year to the next,
    so the previous months say more about the coming one than its
    calendar mean does.
    ``noise_sigma = 0`` gives the modulated template exactly.
    """
    if years < 1:
        raise DomainError("years must be at least 1")
    if noise_sigma < 0 or not math.isfinite(noise_sigma):
        raise DomainError("noise_sigma must be finite and non-negative")

    year_offsets = np.repeat(np.arange(years), 12)
    amplitude = 1.0 + _AMPLITUDE_DEPTH * np.sin(2.0 * np.pi * year_offsets / _AMPLITUDE_PERIOD_YEARS)
    seasonal = np.tile(MONSOON_TEMPLATE, years) * amplitude

    if noise_sigma == 0.0:
        return MonthlySeries(start_year=start_year, start_month=1, values=seasonal.tolist())

    rng = np.random.default_rng(seed)
    shocks = rng.standard_normal(years * 12)
    innovation = math.sqrt(1.0 - _ANOMALY_AUTOCORRELATION ** 2) * noise_sigma
    anomalies = np.empty(years * 12)
    anomalies[0] = noise_sigma * shocks[0]
    for t in range(1, anomalies.size):
        anomalies[t] = _ANOMALY_AUTOCORRELATION * anomalies[t - 1] + innovation * shocks[t]
    values = seasonal * np.exp(anomalies - 0.5 * noise_sigma ** 2)
    return MonthlySeries(start_year=start_year, start_month=1, values=values.tolist())
