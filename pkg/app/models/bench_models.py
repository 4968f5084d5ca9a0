"""
Pydantic models for benchmark configuration and reports.
"""

from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.models.neural_models import TrainerKind
from app.models.timeseries_models import StandardizationMode


class SynthSource(BaseModel):
    """Parameters of a generated monsoon-like series."""
    years: int = Field(ge=1, description="Number of years to generate")
    seed: int = Field(description="Random seed for the anomalies")
    sigma: float = Field(ge=0.0, allow_inf_nan=False, description="Anomaly standard deviation")

    model_config = ConfigDict(frozen=True)


class BenchConfig(BaseModel):
    """Full configuration of one benchmark run."""
    data_path: Optional[str] = Field(default=None, description="CSV file with the monthly series")
    synth: Optional[SynthSource] = Field(default=None, description="Generate the series instead of reading it")
    train_years: int = Field(default=40, ge=1)
    n_lags: int = Field(default=12, ge=1)
    standardization: StandardizationMode = StandardizationMode.GLOBAL

    # MARS
    max_basis_sweep: List[int] = Field(default_factory=lambda: list(range(5, 55, 5)), min_length=1)
    min_span: int = Field(default=1, ge=1)
    degree: int = Field(default=1, ge=1)
    gcv_penalty: Optional[float] = Field(default=None, ge=0.0)

    # Network
    hidden_sizes: List[int] = Field(default_factory=lambda: [12, 12], min_length=1)
    epochs: int = Field(default=600, ge=1)
    trainer: TrainerKind = TrainerKind.SCG
    seed: int = 7

    output_dir: str = "./results"
    record_timings: bool = False

    model_config = ConfigDict(frozen=True)

    @field_validator('max_basis_sweep')
    @classmethod
    def validate_sweep(cls, v: List[int]) -> List[int]:
        if any(m < 1 for m in v):
            raise ValueError("basis counts must be positive")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("basis counts must be strictly ascending")
        return v

    @field_validator('hidden_sizes')
    @classmethod
    def validate_hidden(cls, v: List[int]) -> List[int]:
        if any(h < 1 for h in v):
            raise ValueError("hidden layer sizes must be positive")
        return v

    @model_validator(mode='after')
    def validate_source(self) -> "BenchConfig":
        if (self.data_path is None) == (self.synth is None):
            raise ValueError("exactly one of data_path or synth must be given")
        return self


class ModelResult(BaseModel):
    """One row of the comparison table."""
    name: str
    train_rmse: float = Field(ge=0.0)
    test_rmse: float = Field(ge=0.0)
    iterations: Optional[int] = Field(default=None, ge=0, description="Epochs run; None for non-iterative models")
    seconds: Optional[float] = Field(default=None, ge=0.0, description="Wall-clock fit time")


class SweepRow(BaseModel):
    """MARS result for one forward-stage basis limit."""
    max_basis: int
    n_terms: int
    train_gcv: float
    train_rmse: float
    test_rmse: float


class BenchReport(BaseModel):
    """Outcome of a benchmark run."""
    models: List[ModelResult] = Field(default_factory=list)
    sweep: List[SweepRow] = Field(default_factory=list)
    selected_max_basis: Optional[int] = None
    ann_termination: Optional[str] = None
    train_rows: int = 0
    test_rows: int = 0
    files: List[str] = Field(default_factory=list, description="Emitted files, relative to the output directory")
