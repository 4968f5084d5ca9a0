"""
Pydantic models for neural network training configuration and reports.
"""

from enum import Enum
from typing import List

from pydantic import BaseModel, ConfigDict, Field


class Activation(str, Enum):
    """Layer activation functions."""
    LOG_SIGMOID = "logsig"
    LINEAR = "linear"


class BetaVariant(str, Enum):
    """Formula for the conjugate-direction mixing coefficient."""
    FLETCHER_REEVES = "fletcher_reeves"
    POLAK_RIBIERE = "polak_ribiere"


class TrainerKind(str, Enum):
    """Available training algorithms."""
    GD = "gd"
    CG = "cg"
    SCG = "scg"


class TerminationReason(str, Enum):
    """Why a training run stopped."""
    EPOCH_LIMIT = "epoch_limit"
    GRADIENT_FLOOR = "gradient_floor"
    MSE_FLOOR = "mse_floor"
    STALLED = "stalled"


class GdConfig(BaseModel):
    """Batch gradient descent with momentum."""
    learning_rate: float = Field(default=0.05, ge=0.0, description="Step size (epsilon)")
    momentum: float = Field(default=0.9, ge=0.0, lt=1.0, description="Momentum (alpha)")
    epochs: int = Field(default=600, ge=1, description="Number of batch updates")

    model_config = ConfigDict(frozen=True)


class StoppingConfig(BaseModel):
    """Floors shared by all trainers."""
    gradient_floor: float = Field(default=1e-8, ge=0.0)
    mse_floor: float = Field(default=1e-12, ge=0.0)

    model_config = ConfigDict(frozen=True)


class TrainReport(BaseModel):
    """Outcome of a training run."""
    trainer: TrainerKind
    mse_curve: List[float] = Field(default_factory=list, description="Training MSE after each epoch")
    epochs_run: int = Field(default=0, ge=0)
    termination: TerminationReason = TerminationReason.EPOCH_LIMIT
    gradient_evaluations: int = Field(default=0, ge=0)
    final_mse: float = Field(default=0.0, ge=0.0)
