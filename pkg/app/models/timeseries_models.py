"""
Pydantic models for monthly series, standardization and train/test splits.
"""

import math
from enum import Enum
from typing import List

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class StandardizationMode(str, Enum):
    """How the training-segment statistics are pooled."""
    GLOBAL = "global"    # one mean and std for the whole segment
    MONTHLY = "monthly"  # one mean and std per calendar month


class MonthlySeries(BaseModel):
    """Monthly amounts in file order starting at ``start_year``/``start_month``."""
    start_year: int = Field(description="Calendar year of the first value")
    start_month: int = Field(default=1, ge=1, le=12, description="Calendar month of the first value")
    values: List[float] = Field(description="Monthly amounts in physical units")

    model_config = ConfigDict(frozen=True)

    @field_validator('values')
    @classmethod
    def validate_finite(cls, v: List[float]) -> List[float]:
        for i, value in enumerate(v):
            if not math.isfinite(value):
                raise ValueError(f"value {i} is not finite ({value})")
        return v

    @property
    def n_months(self) -> int:
        return len(self.values)

    def month_of(self, position: int) -> int:
        """Calendar month (1-12) of the value at ``position``."""
        return (self.start_month - 1 + position) % 12 + 1

    def year_of(self, position: int) -> int:
        return self.start_year + (self.start_month - 1 + position) // 12


class Standardizer(BaseModel):
    """
    Affine z-score transform fitted on the training segment.

    In global mode ``means``/``stds`` hold one value; in monthly mode they hold
    twelve, indexed by calendar month minus one.
    """
    mode: StandardizationMode = StandardizationMode.GLOBAL
    means: List[float] = Field(min_length=1)
    stds: List[float] = Field(min_length=1)

    model_config = ConfigDict(frozen=True)

    @model_validator(mode='after')
    def validate_shapes(self) -> "Standardizer":
        expected = 1 if self.mode == StandardizationMode.GLOBAL else 12
        if len(self.means) != expected or len(self.stds) != expected:
            raise ValueError(f"{self.mode.value} standardizer needs {expected} mean/std values")
        if any(not (s > 0 and math.isfinite(s)) for s in self.stds):
            raise ValueError("standard deviations must be positive and finite")
        return self

    @property
    def mean(self) -> float:
        return self.means[0]

    @property
    def std(self) -> float:
        return self.stds[0]


class SplitRanges(BaseModel):
    """Chronological half-open row ranges of a lag dataset."""
    train_start: int = Field(default=0, ge=0)
    train_stop: int = Field(ge=0)
    test_start: int = Field(ge=0)
    test_stop: int = Field(ge=0)

    model_config = ConfigDict(frozen=True)

    @model_validator(mode='after')
    def validate_order(self) -> "SplitRanges":
        if not (self.train_start <= self.train_stop <= self.test_start <= self.test_stop):
            raise ValueError("training rows must precede test rows")
        return self

    @property
    def train(self) -> slice:
        return slice(self.train_start, self.train_stop)

    @property
    def test(self) -> slice:
        return slice(self.test_start, self.test_stop)

    @property
    def n_train(self) -> int:
        return self.train_stop - self.train_start

    @property
    def n_test(self) -> int:
        return self.test_stop - self.test_start
