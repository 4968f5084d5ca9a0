"""
Pydantic models for MARS basis functions, fitted models and fit traces.
"""

from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class HingeDirection(str, Enum):
    """Side of the knot on which a hinge is non-zero."""
    POSITIVE = "positive"  # max(0, x - knot)
    MIRROR = "mirror"      # max(0, knot - x)


class HingeTerm(BaseModel):
    """One hockey-stick function on a single predictor."""
    variable: int = Field(ge=0, description="Predictor index (0-based)")
    knot: float = Field(allow_inf_nan=False, description="Knot in predictor units")
    direction: HingeDirection = Field(description="Positive or mirror hinge")

    model_config = ConfigDict(frozen=True)


class BasisFunction(BaseModel):
    """Product of hinge terms on distinct predictors."""
    factors: List[HingeTerm] = Field(min_length=1, description="Hinge factors")

    model_config = ConfigDict(frozen=True)

    @field_validator('factors')
    @classmethod
    def validate_distinct_variables(cls, v: List[HingeTerm]) -> List[HingeTerm]:
        variables = [f.variable for f in v]
        if len(variables) != len(set(variables)):
            raise ValueError("a basis function may use each predictor only once")
        return v

    @property
    def degree(self) -> int:
        return len(self.factors)

    @property
    def variables(self) -> List[int]:
        return [f.variable for f in self.factors]


class MarsTerm(BaseModel):
    """A weighted basis function."""
    coefficient: float = Field(allow_inf_nan=False)
    basis: BasisFunction

    model_config = ConfigDict(frozen=True)


class MarsModel(BaseModel):
    """Fitted MARS model: intercept plus weighted basis functions."""
    intercept: float = Field(allow_inf_nan=False, description="Constant term")
    terms: List[MarsTerm] = Field(default_factory=list, description="Weighted basis functions")
    n_predictors: int = Field(ge=1, description="Number of predictors the model expects")
    fit_mse: float = Field(default=0.0, ge=0.0, description="Training mean squared error")
    fit_gcv: float = Field(default=0.0, ge=0.0, description="Generalized cross-validation score")
    knot_count: int = Field(default=0, ge=0, description="Distinct (variable, knot) pairs")

    model_config = ConfigDict(frozen=True)

    @model_validator(mode='after')
    def validate_variables(self) -> "MarsModel":
        for term in self.terms:
            for factor in term.basis.factors:
                if factor.variable >= self.n_predictors:
                    raise ValueError(
                        f"basis references predictor {factor.variable} but the model "
                        f"has {self.n_predictors} predictors"
                    )
        return self


class MarsFitConfig(BaseModel):
    """Settings for the forward and backward MARS passes."""
    max_basis_functions: int = Field(default=15, ge=1, description="Forward-stage basis limit")
    min_span: int = Field(default=1, ge=1, description="Minimum observations between knots")
    max_interaction_degree: int = Field(default=1, ge=1, description="Maximum hinges per basis")
    gcv_penalty: Optional[float] = Field(
        default=None,
        ge=0.0,
        description="Cost per knot in effective parameters (2 additive, 3 with interactions)"
    )
    improvement_tolerance: float = Field(
        default=1e-12,
        ge=0.0,
        description="Relative MSE decrease below which the forward pass stops"
    )
    exhaustive_prune_limit: int = Field(
        default=10,
        ge=0,
        description="Score every subset when the forward model has at most this many terms"
    )

    model_config = ConfigDict(frozen=True)

    @property
    def effective_penalty(self) -> float:
        if self.gcv_penalty is not None:
            return self.gcv_penalty
        return 3.0 if self.max_interaction_degree > 1 else 2.0


class ForwardStep(BaseModel):
    """One addition made by the forward pass."""
    step: int
    variable: int
    knot: float
    parent: int = Field(description="Id of the parent basis (0 is the intercept)")
    pair: bool = Field(default=True, description="False when only one hinge was added")
    mse: float


class ForwardTrace(BaseModel):
    """Ordered log of forward-pass additions."""
    initial_mse: float = Field(description="MSE of the intercept-only model")
    steps: List[ForwardStep] = Field(default_factory=list)

    @property
    def mse_curve(self) -> List[float]:
        return [s.mse for s in self.steps]


class PruneStep(BaseModel):
    """One deletion made by backward pruning."""
    step: int
    removed: int = Field(description="Id of the removed basis in the forward model")
    mse: float
    gcv: float


class PruneTrace(BaseModel):
    """Ordered log of deletions plus the selected model."""
    initial_mse: float
    initial_gcv: float
    steps: List[PruneStep] = Field(default_factory=list)
    best_index: Optional[int] = Field(
        default=0,
        ge=0,
        description=(
            "Number of deletions leading to the returned model in the deletion sequence; "
            "None when the subset search picked a model the sequence never visits"
        )
    )
    selected_terms: List[int] = Field(
        default_factory=list,
        description="Ids of the forward-model bases kept in the returned model"
    )
    exhaustive: bool = Field(
        default=False,
        description="True when the selection was refined by scoring every subset"
    )
