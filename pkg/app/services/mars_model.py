"""
Evaluation and serialization of fitted MARS models.

A model is an intercept plus a weighted sum of basis functions, each basis
being a product of hinges ``max(0, x - c)`` or ``max(0, c - x)``.
"""

import json
import math
from typing import Any, Dict, List, Sequence

import numpy as np

from app.models.mars_models import (
    BasisFunction, HingeDirection, HingeTerm, MarsModel, MarsTerm
)
from app.utils.errors import DomainError, StructuralError


def hinge_eval(x: float, knot: float, direction: HingeDirection) -> float:
    """Value of a single hinge at ``x``."""
    if not (math.isfinite(x) and math.isfinite(knot)):
        raise DomainError(f"hinge arguments must be finite (x={x}, knot={knot})")
    if direction == HingeDirection.POSITIVE:
        return max(0.0, x - knot)
    return max(0.0, knot - x)


def basis_eval(basis: BasisFunction, row: Sequence[float]) -> float:
    """Product of the basis' hinge factors evaluated on one predictor row."""
    value = 1.0
    for factor in basis.factors:
        if factor.variable >= len(row):
            raise StructuralError(
                f"basis uses predictor {factor.variable} but the row has {len(row)} values"
            )
        value *= hinge_eval(float(row[factor.variable]), factor.knot, factor.direction)
    return value


def hinge_column(column: np.ndarray, knot: float, direction: HingeDirection) -> np.ndarray:
    if direction == HingeDirection.POSITIVE:
        return np.maximum(0.0, column - knot)
    return np.maximum(0.0, knot - column)


def basis_column(basis: BasisFunction, X: np.ndarray) -> np.ndarray:
    """Vectorised basis values over the rows of ``X``."""
    values = np.ones(X.shape[0])
    for factor in basis.factors:
        values = values * hinge_column(X[:, factor.variable], factor.knot, factor.direction)
    return values


def basis_matrix(bases: Sequence[BasisFunction], X: np.ndarray) -> np.ndarray:
    """Design matrix with one column per basis (no intercept column)."""
    columns = [basis_column(b, X) for b in bases]
    if not columns:
        return np.empty((X.shape[0], 0))
    return np.column_stack(columns)


def _check_rows(model: MarsModel, rows: np.ndarray) -> np.ndarray:
    rows = np.asarray(rows, dtype=float)
    if rows.ndim == 1 and rows.size == 0:
        rows = rows.reshape(0, model.n_predictors)
    if rows.ndim != 2 or rows.shape[1] != model.n_predictors:
        raise StructuralError(
            f"expected rows with {model.n_predictors} predictors, got shape {rows.shape}"
        )
    if not np.all(np.isfinite(rows)):
        raise DomainError("predictor values must be finite")
    return rows


def model_predict(model: MarsModel, row: Sequence[float]) -> float:
    """Prediction for a single predictor row."""
    if len(row) != model.n_predictors:
        raise StructuralError(
            f"expected {model.n_predictors} predictors, got {len(row)}"
        )
    total = model.intercept
    for term in model.terms:
        total += term.coefficient * basis_eval(term.basis, row)
    return total


def model_predict_batch(model: MarsModel, rows: np.ndarray) -> np.ndarray:
    """Predictions for every row of a design matrix."""
    rows = _check_rows(model, rows)
    if not model.terms:
        return np.full(rows.shape[0], model.intercept)
    B = basis_matrix([t.basis for t in model.terms], rows)
    coefficients = np.array([t.coefficient for t in model.terms])
    return model.intercept + B @ coefficients


def count_knots(bases: Sequence[BasisFunction]) -> int:
    """Number of distinct (variable, knot) locations used by ``bases``."""
    return len({(f.variable, f.knot) for b in bases for f in b.factors})


def describe_model(model: MarsModel, labels: Sequence[str] = ()) -> str:
    """Readable equation listing, one basis per line."""
    def name(i: int) -> str:
        return labels[i] if i < len(labels) else f"x{i}"

    lines = [f"y = {model.intercept:+.4f}"]
    for term in model.terms:
        factors = []
        for f in term.basis.factors:
            if f.direction == HingeDirection.POSITIVE:
                factors.append(f"max(0, {name(f.variable)} - {f.knot:.4f})")
            else:
                factors.append(f"max(0, {f.knot:.4f} - {name(f.variable)})")
        lines.append(f"    {term.coefficient:+.4f} * " + " * ".join(factors))
    return "\n".join(lines)


# --- Text form ---

_DIRECTION_CODES = {HingeDirection.POSITIVE: "+", HingeDirection.MIRROR: "-"}
_CODE_DIRECTIONS = {code: d for d, code in _DIRECTION_CODES.items()}


def model_to_dict(model: MarsModel) -> Dict[str, Any]:
    return {
        "kind": "mars",
        "n_predictors": model.n_predictors,
        "intercept": model.intercept,
        "terms": [
            {
                "coef": term.coefficient,
                "factors": [
                    {"var": f.variable, "knot": f.knot, "dir": _DIRECTION_CODES[f.direction]}
                    for f in term.basis.factors
                ],
            }
            for term in model.terms
        ],
        "diagnostics": {
            "fit_mse": model.fit_mse,
            "fit_gcv": model.fit_gcv,
            "knot_count": model.knot_count,
        },
    }


def model_to_json(model: MarsModel) -> str:
    """
    Serialize a model to its JSON text form.

    Floats are written with Python's shortest round-trip repr, so
    ``model_from_json(model_to_json(m)) == m`` holds exactly.
    """
    return json.dumps(model_to_dict(model), indent=2)


def model_from_dict(data: Dict[str, Any]) -> MarsModel:
    if data.get("kind") != "mars":
        raise StructuralError(f"not a MARS model document (kind={data.get('kind')!r})")
    try:
        terms: List[MarsTerm] = []
        for raw in data["terms"]:
            factors = [
                HingeTerm(
                    variable=int(f["var"]),
                    knot=float(f["knot"]),
                    direction=_CODE_DIRECTIONS[f["dir"]],
                )
                for f in raw["factors"]
            ]
            terms.append(MarsTerm(coefficient=float(raw["coef"]), basis=BasisFunction(factors=factors)))
        diagnostics = data.get("diagnostics", {})
        return MarsModel(
            intercept=float(data["intercept"]),
            terms=terms,
            n_predictors=int(data["n_predictors"]),
            fit_mse=float(diagnostics.get("fit_mse", 0.0)),
            fit_gcv=float(diagnostics.get("fit_gcv", 0.0)),
            knot_count=int(diagnostics.get("knot_count", count_knots([t.basis for t in terms]))),
        )
    except (KeyError, TypeError) as e:
        raise StructuralError(f"malformed MARS model document: {e}") from e


def model_from_json(text: str) -> MarsModel:
    return model_from_dict(json.loads(text))
