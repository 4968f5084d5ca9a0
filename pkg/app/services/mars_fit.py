"""
MARS fitting: greedy forward addition of hinge pairs followed by backward
pruning with generalized cross-validation (GCV) model selection.
"""

import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.linalg import qr, solve_triangular

from app.logger_config import get_logger, log_performance
from app.models.mars_models import (
    BasisFunction, ForwardStep, ForwardTrace, HingeDirection, HingeTerm,
    MarsFitConfig, MarsModel, MarsTerm, PruneStep, PruneTrace
)
from app.services.mars_model import basis_column, basis_matrix, count_knots, hinge_column
from app.utils.errors import DomainError, StructuralError
from config.settings import get_settings

settings = get_settings()
logger = get_logger(__name__)

# Squared-norm ratio below which a projected candidate column counts as dependent
_DEPENDENCE_TOL = 1e-10


@dataclass(frozen=True)
class LeastSquaresResult:
    """Solution of a (possibly rank-deficient) least-squares problem."""
    coefficients: np.ndarray
    mse: float
    rank: int
    dropped: List[int] = field(default_factory=list)


def least_squares_fit(design: np.ndarray, target: np.ndarray) -> LeastSquaresResult:
    """
    Minimise ``sum((y - X b)**2) / N`` with a column-pivoted QR factorisation.

    Columns whose pivot falls below ``max(N, P) * eps * |R[0, 0]|`` are treated
    as dependent: they get coefficient 0 and are reported in ``dropped``.
    """
    design = np.asarray(design, dtype=float)
    target = np.asarray(target, dtype=float)
    if design.ndim != 2 or target.ndim != 1 or design.shape[0] != target.shape[0]:
        raise StructuralError(
            f"design {design.shape} and target {target.shape} do not match"
        )
    n, p = design.shape
    if n == 0:
        raise DomainError("least squares needs at least one observation")

    coefficients = np.zeros(p)
    if p == 0:
        return LeastSquaresResult(coefficients, float(target @ target) / n, 0, [])

    Q, R, pivots = qr(design, mode='economic', pivoting=True)
    diag = np.abs(np.diag(R))
    tol = max(n, p) * np.finfo(float).eps * diag[0] if diag.size else 0.0
    rank = int(np.sum(diag > tol)) if diag[0] > 0 else 0

    if rank > 0:
        solved = solve_triangular(R[:rank, :rank], Q[:, :rank].T @ target)
        coefficients[pivots[:rank]] = solved
    dropped = sorted(int(i) for i in pivots[rank:])

    residual = target - design @ coefficients
    return LeastSquaresResult(coefficients, float(residual @ residual) / n, rank, dropped)


def gcv_score(mse: float, n_samples: int, n_effective_params: float) -> float:
    """
    Generalized cross-validation: ``mse / (1 - C/N)**2``.

    Returns +inf when the effective parameter count reaches the sample count.
    """
    if n_samples <= 0:
        raise DomainError("GCV needs a positive sample count")
    if n_effective_params >= n_samples:
        return math.inf
    return mse / (1.0 - n_effective_params / n_samples) ** 2


def candidate_knots(column: np.ndarray, min_span: int = 1) -> np.ndarray:
    """
    Knot candidates for one sorted predictor column.

    Every distinct value except the largest is eligible (a positive hinge at
    the maximum is zero on all observations). Consecutive selected knots are
    at least ``min_span`` observations apart, counted from the first
    occurrence of each value.
    """
    column = np.asarray(column, dtype=float)
    if column.size == 0:
        raise DomainError("cannot place knots on an empty column")
    if min_span < 1:
        raise DomainError(f"min_span must be at least 1, got {min_span}")
    if np.any(np.diff(column) < 0):
        raise DomainError("knot candidates require an ascending column")

    values, first_index = np.unique(column, return_index=True)
    values, first_index = values[:-1], first_index[:-1]
    if min_span == 1:
        return values

    selected = []
    last_position: Optional[int] = None
    for value, position in zip(values, first_index):
        if last_position is None or position - last_position >= min_span:
            selected.append(value)
            last_position = position
    return np.asarray(selected, dtype=float)


def _validate_data(X: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0 or X.shape[1] == 0:
        raise DomainError(f"MARS needs a non-empty 2-D design matrix, got shape {X.shape}")
    if y.ndim != 1 or y.shape[0] != X.shape[0]:
        raise StructuralError(f"target length {y.shape} does not match {X.shape[0]} rows")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise DomainError("MARS inputs must be finite")
    return X, y


@dataclass
class _Candidate:
    sse: float
    variable: int
    knot: float
    parent: int
    direction: Optional[HingeDirection] = None  # None means a full pair

    def order_key(self) -> Tuple[int, float, int, int]:
        direction_rank = 1 if self.direction == HingeDirection.MIRROR else 0
        return (self.variable, self.knot, self.parent, direction_rank)


class _ForwardSearch:
    """Candidate scoring for one forward step."""

    def __init__(self, X: np.ndarray, y: np.ndarray, config: MarsFitConfig):
        self.X = X
        self.y = y
        self.config = config
        self._knot_cache: Dict[int, np.ndarray] = {}

    def knots_for(self, variable: int, parent_column: np.ndarray, parent: int) -> np.ndarray:
        if parent == 0:
            if variable not in self._knot_cache:
                self._knot_cache[variable] = candidate_knots(
                    np.sort(self.X[:, variable]), self.config.min_span
                )
            return self._knot_cache[variable]
        support = self.X[parent_column > 0, variable]
        if support.size == 0:
            return np.empty(0)
        return candidate_knots(np.sort(support), self.config.min_span)

    def best(
        self,
        design: np.ndarray,
        bases: List[BasisFunction],
        pair: bool,
        tie_tol: float
    ) -> Optional[_Candidate]:
        """Lowest post-addition SSE over all (parent, variable, knot) triples."""
        Q, R, _ = qr(design, mode='economic', pivoting=True)
        diag = np.abs(np.diag(R))
        rank = int(np.sum(diag > max(design.shape) * np.finfo(float).eps * diag[0]))
        Q = Q[:, :rank]
        residual = self.y - Q @ (Q.T @ self.y)
        rss = float(residual @ residual)

        candidates: List[_Candidate] = []
        parents = [(0, np.ones(self.X.shape[0]), [])]
        for i, b in enumerate(bases):
            if b.degree < self.config.max_interaction_degree:
                parents.append((i + 1, basis_column(b, self.X), b.variables))

        for parent_id, parent_column, used in parents:
            for variable in range(self.X.shape[1]):
                if variable in used:
                    continue
                knots = self.knots_for(variable, parent_column, parent_id)
                if knots.size == 0:
                    continue
                candidates.extend(
                    self._score(Q, residual, rss, parent_id, parent_column, variable, knots, pair)
                )

        if not candidates:
            return None
        lowest = min(c.sse for c in candidates)
        tied = [c for c in candidates if c.sse <= lowest + tie_tol]
        return min(tied, key=_Candidate.order_key)

    def _score(
        self,
        Q: np.ndarray,
        residual: np.ndarray,
        rss: float,
        parent: int,
        parent_column: np.ndarray,
        variable: int,
        knots: np.ndarray,
        pair: bool
    ) -> List[_Candidate]:
        x = self.X[:, variable][:, None]
        P = parent_column[:, None] * np.maximum(0.0, x - knots[None, :])
        M = parent_column[:, None] * np.maximum(0.0, knots[None, :] - x)
        P_norm = np.einsum('ij,ij->j', P, P)
        M_norm = np.einsum('ij,ij->j', M, M)
        # Components orthogonal to the current design
        P = P - Q @ (Q.T @ P)
        M = M - Q @ (Q.T @ M)
        pp = np.einsum('ij,ij->j', P, P)
        mm = np.einsum('ij,ij->j', M, M)
        pr = P.T @ residual
        mr = M.T @ residual

        p_ok = pp > _DEPENDENCE_TOL * P_norm
        m_ok = mm > _DEPENDENCE_TOL * M_norm
        safe_pp = np.where(p_ok, pp, 1.0)
        safe_mm = np.where(m_ok, mm, 1.0)
        gain_p = np.where(p_ok, pr * pr / safe_pp, 0.0)
        gain_m = np.where(m_ok, mr * mr / safe_mm, 0.0)

        if not pair:
            out = []
            for j, knot in enumerate(knots):
                out.append(_Candidate(rss - gain_p[j], variable, float(knot), parent, HingeDirection.POSITIVE))
                out.append(_Candidate(rss - gain_m[j], variable, float(knot), parent, HingeDirection.MIRROR))
            return out

        # Mirror column after removing its component along the positive one
        pm = np.einsum('ij,ij->j', P, M)
        ratio = np.where(p_ok, pm / safe_pp, 0.0)
        mm2 = mm - ratio * pm
        mr2 = mr - ratio * pr
        m2_ok = mm2 > _DEPENDENCE_TOL * M_norm
        gain_m2 = np.where(m2_ok, mr2 * mr2 / np.where(m2_ok, mm2, 1.0), 0.0)
        sse = rss - gain_p - gain_m2
        return [
            _Candidate(float(sse[j]), variable, float(knot), parent)
            for j, knot in enumerate(knots)
        ]


def _extend(parent: Optional[BasisFunction], variable: int, knot: float, direction: HingeDirection) -> BasisFunction:
    factors = list(parent.factors) if parent is not None else []
    factors.append(HingeTerm(variable=variable, knot=knot, direction=direction))
    return BasisFunction(factors=factors)


def _build_model(
    bases: Sequence[BasisFunction],
    fit: LeastSquaresResult,
    n_samples: int,
    n_predictors: int,
    penalty: float
) -> MarsModel:
    knots = count_knots(bases)
    return MarsModel(
        intercept=float(fit.coefficients[0]),
        terms=[
            MarsTerm(coefficient=float(c), basis=b)
            for c, b in zip(fit.coefficients[1:], bases)
        ],
        n_predictors=n_predictors,
        fit_mse=fit.mse,
        fit_gcv=gcv_score(fit.mse, n_samples, fit.rank + penalty * knots),
        knot_count=knots,
    )


def forward_pass(X: np.ndarray, y: np.ndarray, config: MarsFitConfig) -> Tuple[MarsModel, ForwardTrace]:
    """
    Grow an overfit model from the constant by adding hinge pairs.

    Each step adds the (parent, variable, knot) pair with the lowest training
    MSE after refitting. The pass stops at ``max_basis_functions``, when no
    knot candidates remain, or when the MSE decrease relative to the
    intercept-only MSE is at most ``improvement_tolerance``.
    """
    X, y = _validate_data(X, y)
    n, p = X.shape
    start_time = time.perf_counter()
    penalty = config.effective_penalty

    bases: List[BasisFunction] = []
    design = np.ones((n, 1))
    if np.all(y == y[0]):
        logger.debug("Forward pass: constant target, returning the intercept-only model")
        fit = LeastSquaresResult(np.array([y[0]]), 0.0, 1, [])
        return _build_model(bases, fit, n, p, penalty), ForwardTrace(initial_mse=0.0)

    fit = least_squares_fit(design, y)
    initial_mse = fit.mse
    trace = ForwardTrace(initial_mse=initial_mse)
    floor = config.improvement_tolerance * initial_mse
    search = _ForwardSearch(X, y, config)

    step = 0
    while config.max_basis_functions - len(bases) > 0 and fit.mse > 0.0:
        pair = config.max_basis_functions - len(bases) >= 2
        best = search.best(design, bases, pair, tie_tol=floor * n)
        if best is None:
            logger.debug("Forward pass: no knot candidates left")
            break

        parent = bases[best.parent - 1] if best.parent > 0 else None
        if best.direction is None:
            added = [
                _extend(parent, best.variable, best.knot, HingeDirection.POSITIVE),
                _extend(parent, best.variable, best.knot, HingeDirection.MIRROR),
            ]
        else:
            added = [_extend(parent, best.variable, best.knot, best.direction)]

        new_design = np.column_stack([design] + [basis_column(b, X) for b in added])
        new_fit = least_squares_fit(new_design, y)
        if not (fit.mse - new_fit.mse > floor):
            logger.debug(
                f"Forward pass: best candidate improves MSE by {fit.mse - new_fit.mse:.3e}, stopping"
            )
            break

        step += 1
        bases.extend(added)
        design, fit = new_design, new_fit
        trace.steps.append(ForwardStep(
            step=step,
            variable=best.variable,
            knot=best.knot,
            parent=best.parent,
            pair=best.direction is None,
            mse=fit.mse,
        ))
        logger.debug(
            f"Forward step {step}: x{best.variable} knot={best.knot:.6g} "
            f"parent={best.parent} mse={fit.mse:.6g}"
        )

    model = _build_model(bases, fit, n, p, penalty)
    log_performance(
        logger, "MARS forward pass", start_time,
        steps=step, bases=len(bases), mse=f"{fit.mse:.6g}"
    )
    return model, trace


def _subset_fit(
    B: np.ndarray,
    bases: Sequence[BasisFunction],
    subset: Sequence[int],
    y: np.ndarray,
    penalty: float
) -> Tuple[LeastSquaresResult, float]:
    n = y.shape[0]
    design = np.column_stack([np.ones(n)] + [B[:, i] for i in subset])
    fit = least_squares_fit(design, y)
    knots = count_knots([bases[i] for i in subset])
    return fit, gcv_score(fit.mse, n, fit.rank + penalty * knots)


def backward_prune(
    model: MarsModel,
    X: np.ndarray,
    y: np.ndarray,
    config: MarsFitConfig
) -> Tuple[MarsModel, PruneTrace]:
    """
    Remove basis functions one at a time and keep the GCV-minimal model.

    At every step the basis whose removal leaves the lowest training MSE is
    deleted (lowest id on ties) until only the intercept remains. GCV values
    within the improvement floor of zero are treated as zero, with ties going
    to the smaller model. Models with at most ``exhaustive_prune_limit`` bases
    are additionally searched over every subset.
    """
    X, y = _validate_data(X, y)
    n, p = X.shape
    if p != model.n_predictors:
        raise StructuralError(
            f"model expects {model.n_predictors} predictors, data has {p}"
        )
    start_time = time.perf_counter()
    penalty = config.effective_penalty
    bases = [t.basis for t in model.terms]
    B = basis_matrix(bases, X)

    active = list(range(len(bases)))
    fit, gcv = _subset_fit(B, bases, active, y, penalty)
    floor = config.improvement_tolerance * float(np.var(y))
    trace = PruneTrace(initial_mse=fit.mse, initial_gcv=gcv)
    sequence: List[Tuple[List[int], float]] = [(list(active), gcv)]

    step = 0
    while active:
        best_removal: Optional[Tuple[int, LeastSquaresResult, float]] = None
        for idx in active:
            trial = [i for i in active if i != idx]
            trial_fit, trial_gcv = _subset_fit(B, bases, trial, y, penalty)
            if best_removal is None or trial_fit.mse < best_removal[1].mse:
                best_removal = (idx, trial_fit, trial_gcv)
        idx, removal_fit, removal_gcv = best_removal
        active.remove(idx)
        step += 1
        trace.steps.append(PruneStep(step=step, removed=idx + 1, mse=removal_fit.mse, gcv=removal_gcv))
        sequence.append((list(active), removal_gcv))
        logger.debug(f"Prune step {step}: removed basis {idx + 1} gcv={removal_gcv:.6g}")

    def clipped(score: float) -> float:
        return 0.0 if score <= floor else score

    # Later (smaller) models win exact ties
    best_index = 0
    for i, (_, score) in enumerate(sequence):
        if clipped(score) <= clipped(sequence[best_index][1]):
            best_index = i
    selected, selected_gcv = sequence[best_index]

    exhaustive = False
    if 0 < len(bases) <= config.exhaustive_prune_limit:
        for size in range(len(bases) + 1):
            for subset in itertools.combinations(range(len(bases)), size):
                _, subset_gcv = _subset_fit(B, bases, subset, y, penalty)
                current = clipped(selected_gcv)
                better = clipped(subset_gcv) < current
                smaller_tie = clipped(subset_gcv) == current and size < len(selected)
                if better or smaller_tie:
                    selected, selected_gcv = list(subset), subset_gcv
                    exhaustive = True

    if exhaustive:
        # Subset search result may lie outside the deletion sequence
        best_index = next((i for i, (subset, _) in enumerate(sequence) if subset == selected), None)
    trace.best_index = best_index
    trace.selected_terms = [i + 1 for i in selected]
    trace.exhaustive = exhaustive

    kept = [bases[i] for i in selected]
    final_fit, _ = _subset_fit(B, bases, selected, y, penalty)
    pruned = _build_model(kept, final_fit, n, p, penalty)
    log_performance(
        logger, "MARS backward prune", start_time,
        kept=len(kept), removed=len(bases) - len(kept), gcv=f"{pruned.fit_gcv:.6g}"
    )
    return pruned, trace


def default_fit_config() -> MarsFitConfig:
    """Fit configuration from the MARS_* settings."""
    return MarsFitConfig(
        max_basis_functions=settings.MARS_MAX_BASIS_FUNCTIONS,
        min_span=settings.MARS_MIN_SPAN,
        max_interaction_degree=settings.MARS_MAX_DEGREE,
        gcv_penalty=settings.MARS_GCV_PENALTY,
        improvement_tolerance=settings.MARS_IMPROVEMENT_TOLERANCE,
        exhaustive_prune_limit=settings.MARS_EXHAUSTIVE_PRUNE_LIMIT,
    )


def fit(
    X: np.ndarray,
    y: np.ndarray,
    config: Optional[MarsFitConfig] = None
) -> Tuple[MarsModel, ForwardTrace, PruneTrace]:
    """Forward pass followed by backward pruning. Deterministic."""
    config = config or default_fit_config()
    X, y = _validate_data(X, y)
    overfit, forward_trace = forward_pass(X, y, config)
    model, prune_trace = backward_prune(overfit, X, y, config)
    logger.info(
        f"MARS fit: {len(overfit.terms)} forward bases -> {len(model.terms)} kept, "
        f"mse={model.fit_mse:.6g} gcv={model.fit_gcv:.6g}"
    )
    return model, forward_trace, prune_trace


def forward_trace_to_frame(trace: ForwardTrace) -> pd.DataFrame:
    """CSV layout ``step, variable, knot, mse`` (plus parent and pair flag)."""
    return pd.DataFrame(
        [
            {
                "step": s.step,
                "variable": s.variable,
                "knot": s.knot,
                "mse": s.mse,
                "parent": s.parent,
                "pair": int(s.pair),
            }
            for s in trace.steps
        ],
        columns=["step", "variable", "knot", "mse", "parent", "pair"],
    )


def prune_trace_to_frame(trace: PruneTrace) -> pd.DataFrame:
    """CSV layout ``step, removed, mse, gcv``; step 0 is the unpruned model."""
    rows = [{"step": 0, "removed": 0, "mse": trace.initial_mse, "gcv": trace.initial_gcv}]
    rows.extend(
        {"step": s.step, "removed": s.removed, "mse": s.mse, "gcv": s.gcv}
        for s in trace.steps
    )
    return pd.DataFrame(rows, columns=["step", "removed", "mse", "gcv"])
