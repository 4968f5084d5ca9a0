"""
Unit tests for the monthly series pipeline.
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from app.models.timeseries_models import MonthlySeries, SplitRanges, StandardizationMode, Standardizer
from app.services import timeseries
from app.utils.errors import DataError, DomainError, StructuralError


class TestLoadCsv:
    """Test cases for CSV ingestion."""

    def test_two_year_long_file(self, tmp_path):
        """Test two year long file."""
        lines = ["year,month,value"]
        lines += [f"{1990 + i // 12},{i % 12 + 1},{i * 1.5}" for i in range(24)]
        path = tmp_path / "series.csv"
        path.write_text("\n".join(lines) + "\n")
        series = timeseries.load_csv(path)
        assert series.n_months == 24
        assert series.start_year == 1990
        assert series.start_month == 1
        assert series.values[5] == 7.5

    def test_wide_equals_long(self, write_long_csv, write_wide_csv):
        """Test wide equals long."""
        source = timeseries.synth_monsoon(3, seed=1, noise_sigma=0.4)
        from_long = timeseries.load_csv(write_long_csv(source))
        from_wide = timeseries.load_csv(write_wide_csv(source))
        assert from_long == from_wide == source

    @pytest.mark.parametrize("tail", ["\n\n", "\n\n\n", "\n  \n"])
    def test_trailing_blank_lines_ignored(self, write_long_csv, tail):
        """Blank lines after the last row are not data."""
        source = timeseries.synth_monsoon(2, seed=1, noise_sigma=0.3)
        path = write_long_csv(source)
        path.write_text(path.read_text().rstrip("\n") + tail)
        assert timeseries.load_csv(path) == source

    def test_trailing_blank_lines_wide(self, write_wide_csv):
        """Wide files accept the same trailing blank lines."""
        source = timeseries.synth_monsoon(2, seed=1, noise_sigma=0.3)
        path = write_wide_csv(source)
        path.write_text(path.read_text() + "\n\n")
        assert timeseries.load_csv(path) == source

    def test_interior_blank_line_reports_line(self, tmp_path):
        """A blank line between rows is still an error at its own line."""
        lines = ["year,month,value"] + [f"2000,{m},1.0" for m in range(1, 13)] + [f"2001,{m},1.0" for m in range(1, 13)]
        lines.insert(6, "")
        path = tmp_path / "gap.csv"
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(DataError) as excinfo:
            timeseries.load_csv(path)
        assert excinfo.value.line == 7

    def test_header_case_and_spaces(self, tmp_path):
        """Test header case and spaces."""
        lines = ["Year, Month ,VALUE"] + [f"2001,{m},{m}" for m in range(1, 13)] + [f"2002,{m},{m}" for m in range(1, 13)]
        path = tmp_path / "s.csv"
        path.write_text("\n".join(lines))
        assert timeseries.load_csv(path).n_months == 24

    def test_nan_cell_reports_line(self, tmp_path):
        """Test nan cell reports line."""
        lines = ["year,month,value"] + [f"2000,{m},1.0" for m in range(1, 13)] + [f"2001,{m},1.0" for m in range(1, 13)]
        lines[4] = "2000,4,NaN"
        path = tmp_path / "bad.csv"
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(DataError) as excinfo:
            timeseries.load_csv(path)
        assert excinfo.value.line == 5
        assert str(excinfo.value).startswith(f"{path}:5:")

    def test_non_numeric_value(self, tmp_path):
        """Test non numeric value."""
        lines = ["year,month,value"] + [f"2000,{m},1.0" for m in range(1, 13)] + [f"2001,{m},x" for m in range(1, 13)]
        path = tmp_path / "bad.csv"
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(DataError) as excinfo:
            timeseries.load_csv(path)
        assert excinfo.value.line == 14

    def test_gap_in_months(self, tmp_path):
        """Test gap in months."""
        rows = [f"2000,{m},1.0" for m in range(1, 13)] + [f"2001,{m},1.0" for m in range(1, 13)]
        del rows[6]
        path = tmp_path / "gap.csv"
        path.write_text("\n".join(["year,month,value"] + rows) + "\n")
        with pytest.raises(DataError) as excinfo:
            timeseries.load_csv(path)
        assert excinfo.value.line == 8

    def test_month_out_of_range(self, tmp_path):
        """Test month out of range."""
        path = tmp_path / "m.csv"
        path.write_text("year,month,value\n2000,13,1.0\n")
        with pytest.raises(DataError):
            timeseries.load_csv(path)

    def test_too_short(self, tmp_path):
        """Test too short."""
        lines = ["year,month,value"] + [f"2000,{m},1.0" for m in range(1, 13)]
        path = tmp_path / "short.csv"
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(DataError, match="at least 24"):
            timeseries.load_csv(path)

    def test_unknown_header(self, tmp_path):
        """Test unknown header."""
        path = tmp_path / "h.csv"
        path.write_text("date,rain\n2000-01,1\n")
        with pytest.raises(DataError) as excinfo:
            timeseries.load_csv(path)
        assert excinfo.value.line == 1

    def test_missing_file(self, tmp_path):
        """Test missing file."""
        with pytest.raises(DataError, match="not found"):
            timeseries.load_csv(tmp_path / "absent.csv")

    def test_empty_file(self, tmp_path):
        """Test empty file."""
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(DataError):
            timeseries.load_csv(path)


class TestMonthlySeries:
    """Test cases for the series model."""

    def test_non_finite_rejected(self):
        """Test non finite rejected."""
        with pytest.raises(ValidationError):
            MonthlySeries(start_year=2000, values=[1.0, math.nan])

    def test_calendar_positions(self):
        """Test calendar positions."""
        series = MonthlySeries(start_year=2000, start_month=11, values=[0.0] * 5)
        assert [series.month_of(i) for i in range(5)] == [11, 12, 1, 2, 3]
        assert [series.year_of(i) for i in range(5)] == [2000, 2000, 2001, 2001, 2001]


class TestStandardizer:
    """Test cases for training-only standardization."""

    def test_population_statistics(self):
        """Test population statistics."""
        series = MonthlySeries(start_year=2000, values=[0.0, 2.0, 4.0, 100.0])
        standardizer = timeseries.fit_standardizer(series, (0, 3))
        assert standardizer.mean == 2.0
        assert standardizer.std == pytest.approx(math.sqrt(8.0 / 3.0))

    def test_constant_segment(self):
        """Test constant segment."""
        series = MonthlySeries(start_year=2000, values=[3.0, 3.0, 3.0, 5.0])
        with pytest.raises(DomainError):
            timeseries.fit_standardizer(series, (0, 3))

    def test_empty_range(self, three_year_series):
        """Test empty range."""
        with pytest.raises(DomainError):
            timeseries.fit_standardizer(three_year_series, (0, 0))

    def test_transform_values(self):
        """Test transform values."""
        standardizer = Standardizer(means=[2.0], stds=[4.0])
        np.testing.assert_array_equal(timeseries.standardize_values([2.0, 6.0], standardizer), [0.0, 1.0])

    def test_round_trip(self, rng):
        """Test round trip."""
        standardizer = Standardizer(means=[123.4], stds=[56.7])
        values = rng.uniform(0, 900, 500)
        restored = timeseries.inverse_standardize(timeseries.standardize_values(values, standardizer), standardizer)
        np.testing.assert_allclose(restored, values, rtol=1e-12)

    def test_test_values_do_not_leak(self):
        """Test test values do not leak."""
        series = timeseries.synth_monsoon(10, seed=2, noise_sigma=0.3)
        train_range = timeseries.training_range(series, 6)
        perturbed_values = list(series.values)
        for i in range(train_range[1], series.n_months):
            perturbed_values[i] *= 5.0
        perturbed = series.model_copy(update={"values": perturbed_values})
        for mode in StandardizationMode:
            assert timeseries.fit_standardizer(series, train_range, mode) == \
                timeseries.fit_standardizer(perturbed, train_range, mode)

    def test_monthly_mode(self):
        """Test monthly mode."""
        series = timeseries.synth_monsoon(6, seed=3, noise_sigma=0.3)
        standardizer = timeseries.fit_standardizer(series, (0, 72), StandardizationMode.MONTHLY)
        z = timeseries.standardize(series, standardizer)
        july = z[6::12]
        assert july.mean() == pytest.approx(0.0, abs=1e-12)
        assert july.std() == pytest.approx(1.0)
        months = [series.month_of(i) for i in range(series.n_months)]
        np.testing.assert_allclose(
            timeseries.inverse_standardize(z, standardizer, months), series.values, rtol=1e-12
        )

    def test_monthly_needs_months(self):
        """Test monthly needs months."""
        standardizer = Standardizer(mode=StandardizationMode.MONTHLY, means=[0.0] * 12, stds=[1.0] * 12)
        with pytest.raises(StructuralError):
            timeseries.inverse_standardize([1.0, 2.0], standardizer)

    def test_model_validates_lengths(self):
        """Test model validates lengths."""
        with pytest.raises(ValidationError):
            Standardizer(mode=StandardizationMode.MONTHLY, means=[0.0], stds=[1.0])
        with pytest.raises(ValidationError):
            Standardizer(means=[0.0], stds=[0.0])


class TestLagEmbed:
    """Test cases for lag embedding."""

    def test_first_row(self):
        """Test first row."""
        dataset = timeseries.lag_embed(np.arange(24, dtype=float), 12)
        assert dataset.n_rows == 12
        np.testing.assert_array_equal(dataset.X[0], np.arange(12))
        assert dataset.y[0] == 12.0

    @pytest.mark.parametrize("length", [13, 24, 25, 60, 1044])
    def test_row_count(self, length):
        """Test row count."""
        assert timeseries.lag_embed(np.zeros(length), 12).n_rows == length - 12

    def test_month_index_cycles(self):
        """Test month index cycles."""
        dataset = timeseries.lag_embed(np.zeros(48), 12, start_year=1900, start_month=1)
        assert dataset.month_index.tolist() == list(range(1, 13)) * 3
        assert dataset.target_year.tolist() == [1901] * 12 + [1902] * 12 + [1903] * 12

    def test_month_index_from_start_month(self):
        """Test month index from start month."""
        dataset = timeseries.lag_embed(np.zeros(20), 3, start_month=11)
        assert dataset.month_index[:4].tolist() == [2, 3, 4, 5]

    def test_reconstruction(self, rng):
        """Test reconstruction."""
        values = rng.standard_normal(50)
        dataset = timeseries.lag_embed(values, 12)
        np.testing.assert_array_equal(np.concatenate([dataset.X[0], dataset.y]), values)

    def test_rows_are_windows(self, rng):
        """Test rows are windows."""
        values = rng.standard_normal(40)
        dataset = timeseries.lag_embed(values, 5)
        for i in range(dataset.n_rows):
            np.testing.assert_array_equal(dataset.X[i], values[i:i + 5])
            assert dataset.y[i] == values[i + 5]

    def test_too_short(self):
        """Test too short."""
        with pytest.raises(DomainError):
            timeseries.lag_embed(np.zeros(12), 12)


class TestChronoSplit:
    """Test cases for chronological splitting."""

    def test_eighty_seven_year_series(self):
        """Test eighty seven year series."""
        dataset = timeseries.lag_embed(np.zeros(87 * 12), 12, start_year=1893)
        split = timeseries.chrono_split(dataset, 40)
        assert split.n_train == 39 * 12
        assert split.n_test == 47 * 12
        test_years = set(dataset.target_year[split.test].tolist())
        assert len(test_years) == 47
        assert min(test_years) == 1893 + 40

    def test_three_year_boundary(self, three_year_series):
        """Test three year boundary."""
        dataset = timeseries.lag_embed(three_year_series.values, 12, start_year=2000)
        split = timeseries.chrono_split(dataset, 2)
        assert split.n_train == 12
        assert split.n_test == 12
        assert split.train_stop <= split.test_start

    def test_targets_in_first_year_only_leave_training_empty(self):
        """Test targets in first year only leave training empty."""
        dataset = timeseries.lag_embed(np.zeros(24), 12, start_year=2000)
        with pytest.raises(DomainError):
            timeseries.chrono_split(dataset, 1)

    def test_zero_train_years(self):
        """Test zero train years."""
        dataset = timeseries.lag_embed(np.zeros(48), 12)
        with pytest.raises(DomainError):
            timeseries.chrono_split(dataset, 0)

    def test_train_years_beyond_series(self):
        """Test train years beyond series."""
        dataset = timeseries.lag_embed(np.zeros(48), 12)
        with pytest.raises(DomainError):
            timeseries.chrono_split(dataset, 10)

    def test_ranges_must_be_ordered(self):
        """Test ranges must be ordered."""
        with pytest.raises(ValidationError):
            SplitRanges(train_start=0, train_stop=10, test_start=5, test_stop=20)


class TestMetrics:
    """Test cases for RMSE and the climatology baseline."""

    def test_identical(self):
        """Test identical."""
        assert timeseries.rmse([1.0, 2.0], [1.0, 2.0]) == 0.0

    def test_constant_offset(self):
        """Test constant offset."""
        assert timeseries.rmse([2.0, 3.0, 4.0], [1.0, 2.0, 3.0]) == pytest.approx(1.0)

    def test_hand_value(self):
        """Test hand value."""
        assert timeseries.rmse([1.0, 2.0], [3.0, 4.0]) == pytest.approx(2.0)

    def test_translation_bound(self, rng):
        """Test translation bound."""
        p = rng.standard_normal(30)
        a = rng.standard_normal(30)
        for c in (0.5, 2.0, -3.0):
            assert timeseries.rmse(p + c, a) >= abs(c) - timeseries.rmse(p, a) - 1e-12

    def test_shape_mismatch(self):
        """Test shape mismatch."""
        with pytest.raises(StructuralError):
            timeseries.rmse([1.0], [1.0, 2.0])

    def test_empty(self):
        """Test empty."""
        with pytest.raises(DomainError):
            timeseries.rmse([], [])

    def test_climatology_uses_training_years(self):
        """Test climatology uses training years."""
        series = timeseries.synth_monsoon(5, seed=4, noise_sigma=0.2)
        dataset = timeseries.lag_embed(series.values, 12, start_year=series.start_year)
        split = timeseries.chrono_split(dataset, 3)
        forecast = timeseries.climatology_forecast(series, dataset, split)
        values = np.asarray(series.values)
        assert forecast.shape == (dataset.n_rows,)
        # Row 0 targets January of the second year
        assert forecast[0] == pytest.approx(values[[0, 12, 24]].mean())
        assert forecast[-1] == pytest.approx(values[[11, 23, 35]].mean())


class TestSynthMonsoon:
    """Test cases for the synthetic generator."""

    def test_seed_repeatable(self):
        """Test seed repeatable."""
        assert timeseries.synth_monsoon(20, 7, 0.3) == timeseries.synth_monsoon(20, 7, 0.3)

    def test_seeds_differ(self):
        """Test seeds differ."""
        assert timeseries.synth_monsoon(5, 1, 0.3) != timeseries.synth_monsoon(5, 2, 0.3)

    def test_noise_free_is_modulated_template(self):
        """Test noise free is modulated template."""
        series = timeseries.synth_monsoon(15, seed=9, noise_sigma=0.0)
        values = np.asarray(series.values).reshape(15, 12)
        ratios = values / timeseries.MONSOON_TEMPLATE
        np.testing.assert_allclose(ratios, np.repeat(ratios[:, :1], 12, axis=1), rtol=1e-12)

    def test_wet_season_dominates(self):
        """Test wet season dominates."""
        values = np.asarray(timeseries.synth_monsoon(10_000, seed=1, noise_sigma=0.3).values).reshape(-1, 12)
        wet = values[:, 5:9].mean()
        dry = values[:, [0, 1, 2, 11]].mean()
        assert wet > dry

    def test_last_year_beats_calendar_mean(self):
        """Same month last year forecasts better than the per-month mean."""
        values = np.asarray(timeseries.synth_monsoon(400, seed=1, noise_sigma=0.3).values)
        by_month = values.reshape(-1, 12)
        calendar_mean = np.tile(by_month.mean(axis=0), by_month.shape[0])
        persistence = timeseries.rmse(values[:-12], values[12:])
        climatology = timeseries.rmse(calendar_mean[12:], values[12:])
        assert persistence < 0.9 * climatology

    def test_values_positive(self):
        """Test values positive."""
        assert min(timeseries.synth_monsoon(30, seed=5, noise_sigma=0.8).values) > 0

    def test_invalid_arguments(self):
        """Test invalid arguments."""
        with pytest.raises(DomainError):
            timeseries.synth_monsoon(0, 1, 0.3)
        with pytest.raises(DomainError):
            timeseries.synth_monsoon(5, 1, -0.1)
