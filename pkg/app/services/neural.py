"""
Feedforward multilayer perceptron with batch backpropagation and three
trainers: gradient descent with momentum, conjugate gradient with a line
search, and scaled conjugate gradient (no line search).

The optimizers work on a flat parameter vector through the ``Objective``
protocol, so the same code trains a network or minimises any smooth function.
"""

import json
import math
import time
from dataclasses import dataclass, replace
from typing import Any, Callable, Dict, List, Optional, Protocol, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import minimize_scalar
from scipy.special import expit

from app.logger_config import get_logger, log_performance
from app.models.neural_models import (
    Activation, BetaVariant, GdConfig, StoppingConfig, TerminationReason,
    TrainerKind, TrainReport
)
from app.utils.errors import DomainError, StructuralError, TrainingDivergedError
from config.settings import get_settings

logger = get_logger(__name__)
settings = get_settings()

_GOLDEN = 1.618033988749895
_LAMBDA_MIN = 1e-15


# --- Network ---

@dataclass
class MlpNetwork:
    """
    Layered weights and biases. Layer ``k`` maps ``layer_sizes[k]`` inputs to
    ``layer_sizes[k + 1]`` outputs with a weight matrix of shape
    ``(layer_sizes[k + 1], layer_sizes[k])``.
    """
    layer_sizes: List[int]
    weights: List[np.ndarray]
    biases: List[np.ndarray]
    hidden_activation: Activation = Activation.LOG_SIGMOID
    output_activation: Activation = Activation.LINEAR

    def __post_init__(self) -> None:
        if len(self.layer_sizes) < 2 or any(s < 1 for s in self.layer_sizes):
            raise StructuralError(f"invalid layer sizes {self.layer_sizes}")
        if len(self.weights) != len(self.layer_sizes) - 1 or len(self.biases) != len(self.weights):
            raise StructuralError("one weight matrix and bias vector is required per layer")
        for k, (W, b) in enumerate(zip(self.weights, self.biases)):
            expected = (self.layer_sizes[k + 1], self.layer_sizes[k])
            if W.shape != expected or b.shape != (expected[0],):
                raise StructuralError(
                    f"layer {k}: weights {W.shape} / biases {b.shape}, expected {expected}"
                )

    @property
    def n_parameters(self) -> int:
        return sum(W.size + b.size for W, b in zip(self.weights, self.biases))

    def activation(self, layer: int) -> Activation:
        if layer == len(self.weights) - 1:
            return self.output_activation
        return self.hidden_activation

    def get_parameters(self) -> np.ndarray:
        """Flat vector: per layer the row-major weights followed by the biases."""
        parts: List[np.ndarray] = []
        for W, b in zip(self.weights, self.biases):
            parts.append(W.ravel())
            parts.append(b)
        return np.concatenate(parts)

    def set_parameters(self, vector: np.ndarray) -> None:
        vector = np.asarray(vector, dtype=float)
        if vector.shape != (self.n_parameters,):
            raise StructuralError(
                f"expected {self.n_parameters} parameters, got {vector.shape}"
            )
        offset = 0
        for k, (W, b) in enumerate(zip(self.weights, self.biases)):
            self.weights[k] = vector[offset:offset + W.size].reshape(W.shape).copy()
            offset += W.size
            self.biases[k] = vector[offset:offset + b.size].copy()
            offset += b.size

    def copy(self) -> "MlpNetwork":
        return replace(
            self,
            layer_sizes=list(self.layer_sizes),
            weights=[W.copy() for W in self.weights],
            biases=[b.copy() for b in self.biases],
        )


def init_weights(
    layer_sizes: Sequence[int],
    seed: int,
    hidden_activation: Activation = Activation.LOG_SIGMOID,
    output_activation: Activation = Activation.LINEAR
) -> MlpNetwork:
    """Uniform weights and biases in ``[-1/sqrt(fan_in), 1/sqrt(fan_in)]``."""
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        bound = 1.0 / math.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(rng.uniform(-bound, bound, size=fan_out))
    return MlpNetwork(
        layer_sizes=list(layer_sizes),
        weights=weights,
        biases=biases,
        hidden_activation=hidden_activation,
        output_activation=output_activation,
    )


def _activate(z: np.ndarray, activation: Activation) -> np.ndarray:
    if activation == Activation.LOG_SIGMOID:
        return expit(z)
    return z


def _activation_slope(a: np.ndarray, activation: Activation) -> np.ndarray:
    # In terms of the activation output
    if activation == Activation.LOG_SIGMOID:
        return a * (1.0 - a)
    return np.ones_like(a)


def _as_batch(net: MlpNetwork, X: np.ndarray, y: Optional[np.ndarray] = None) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != net.layer_sizes[0]:
        raise StructuralError(
            f"expected inputs with {net.layer_sizes[0]} columns, got shape {X.shape}"
        )
    if y is None:
        return X, None
    Y = np.asarray(y, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    if Y.shape != (X.shape[0], net.layer_sizes[-1]):
        raise StructuralError(
            f"targets {Y.shape} do not match {X.shape[0]} rows x {net.layer_sizes[-1]} outputs"
        )
    return X, Y


def _forward_batch(net: MlpNetwork, X: np.ndarray) -> List[np.ndarray]:
    activations = [X]
    for k, (W, b) in enumerate(zip(net.weights, net.biases)):
        activations.append(_activate(activations[-1] @ W.T + b, net.activation(k)))
    return activations


def mlp_forward(net: MlpNetwork, input: Sequence[float]) -> Tuple[np.ndarray, List[np.ndarray]]:
    """
    Output for one input vector, plus the per-layer activations
    (input first, output last) needed by backpropagation.
    """
    x = np.asarray(input, dtype=float)
    if x.shape != (net.layer_sizes[0],):
        raise StructuralError(
            f"expected an input of length {net.layer_sizes[0]}, got shape {x.shape}"
        )
    cache = [a[0] for a in _forward_batch(net, x[None, :])]
    return cache[-1], cache


def mlp_predict(net: MlpNetwork, X: np.ndarray) -> np.ndarray:
    """Batch outputs; a single-output network returns a 1-D vector."""
    X, _ = _as_batch(net, X)
    out = _forward_batch(net, X)[-1]
    return out[:, 0] if out.shape[1] == 1 else out


def mlp_loss(net: MlpNetwork, X: np.ndarray, y: np.ndarray) -> float:
    """Mean over samples of the squared output error."""
    X, Y = _as_batch(net, X, y)
    if X.shape[0] == 0:
        raise DomainError("loss needs at least one sample")
    error = _forward_batch(net, X)[-1] - Y
    return float(np.sum(error * error) / X.shape[0])


def _loss_and_gradient(net: MlpNetwork, X: np.ndarray, Y: np.ndarray) -> Tuple[float, np.ndarray]:
    n = X.shape[0]
    activations = _forward_batch(net, X)
    error = activations[-1] - Y
    loss = float(np.sum(error * error) / n)

    delta = (2.0 / n) * error * _activation_slope(activations[-1], net.output_activation)
    grads: List[Tuple[np.ndarray, np.ndarray]] = []
    for k in range(len(net.weights) - 1, -1, -1):
        grads.append(((delta.T @ activations[k]).ravel(), delta.sum(axis=0)))
        if k > 0:
            delta = (delta @ net.weights[k]) * _activation_slope(activations[k], net.activation(k - 1))
    grads.reverse()
    return loss, np.concatenate([part for pair in grads for part in pair])


def backprop_gradient(net: MlpNetwork, X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Gradient of ``mlp_loss`` in the ``get_parameters`` ordering."""
    X, Y = _as_batch(net, X, y)
    if X.shape[0] == 0:
        raise DomainError("gradient needs at least one sample")
    return _loss_and_gradient(net, X, Y)[1]


# --- Objectives ---

class Objective(Protocol):
    """Smooth function of a parameter vector."""
    gradient_evaluations: int

    def value(self, w: np.ndarray) -> float: ...

    def gradient(self, w: np.ndarray) -> np.ndarray: ...

    def value_and_gradient(self, w: np.ndarray) -> Tuple[float, np.ndarray]: ...


class NetworkObjective:
    """Batch MSE of a network as a function of its flat parameters."""

    def __init__(self, net: MlpNetwork, X: np.ndarray, y: np.ndarray):
        self.X, self.Y = _as_batch(net, X, y)
        if self.X.shape[0] == 0:
            raise DomainError("training needs at least one sample")
        self.net = net.copy()
        self.gradient_evaluations = 0

    def value(self, w: np.ndarray) -> float:
        self.net.set_parameters(w)
        error = _forward_batch(self.net, self.X)[-1] - self.Y
        return float(np.sum(error * error) / self.X.shape[0])

    def gradient(self, w: np.ndarray) -> np.ndarray:
        return self.value_and_gradient(w)[1]

    def value_and_gradient(self, w: np.ndarray) -> Tuple[float, np.ndarray]:
        self.net.set_parameters(w)
        self.gradient_evaluations += 1
        return _loss_and_gradient(self.net, self.X, self.Y)


def _check_finite(loss: float, w: np.ndarray, epoch: int, model: str) -> None:
    if not math.isfinite(loss) or not np.all(np.isfinite(w)):
        raise TrainingDivergedError(epoch=epoch, model=model, loss=loss)


def _stopping(stopping: Optional[StoppingConfig]) -> StoppingConfig:
    if stopping is not None:
        return stopping
    return StoppingConfig(
        gradient_floor=settings.ANN_GRADIENT_FLOOR,
        mse_floor=settings.ANN_MSE_FLOOR,
    )


# --- Gradient descent ---

def gradient_descent(
    objective: Objective,
    w0: np.ndarray,
    config: GdConfig,
    stopping: Optional[StoppingConfig] = None,
    model: str = "gd"
) -> Tuple[np.ndarray, TrainReport]:
    """
    Batch descent with momentum on the weight changes:
    ``dw(n) = -eps * grad E + alpha * dw(n-1)``, ``w(n) = w(n-1) + dw(n)``.
    """
    stopping = _stopping(stopping)
    w = np.array(w0, dtype=float)
    change = np.zeros_like(w)
    loss, g = objective.value_and_gradient(w)
    _check_finite(loss, w, 0, model)
    report = TrainReport(trainer=TrainerKind.GD)

    for epoch in range(1, config.epochs + 1):
        if np.linalg.norm(g) <= stopping.gradient_floor:
            report.termination = TerminationReason.GRADIENT_FLOOR
            break
        if loss <= stopping.mse_floor:
            report.termination = TerminationReason.MSE_FLOOR
            break
        change = -config.learning_rate * g + config.momentum * change
        w = w + change
        loss, g = objective.value_and_gradient(w)
        _check_finite(loss, w, epoch, model)
        report.mse_curve.append(loss)
        if epoch % settings.ANN_LOG_EVERY == 0:
            logger.debug(f"GD epoch {epoch}: mse={loss:.6g}")

    report.epochs_run = len(report.mse_curve)
    report.final_mse = loss
    report.gradient_evaluations = objective.gradient_evaluations
    return w, report


# --- Conjugate gradient ---

@dataclass
class CgState:
    """Per-iteration conjugate gradient scratch."""
    gradient: np.ndarray
    direction: np.ndarray
    beta_variant: BetaVariant
    iteration: int = 0
    step: float = 0.0
    beta: float = 0.0
    since_reset: int = 0


@dataclass
class LineSearchResult:
    step: float
    value: float
    evaluations: int
    success: bool


def line_search(
    phi: Callable[[float], float],
    f0: float,
    initial_step: float,
    tol: float = 1e-4,
    max_evals: int = 20
) -> LineSearchResult:
    """
    Minimise ``phi(a)`` for ``a > 0``: bracket the minimum by shrinking or
    golden-ratio expansion from ``initial_step``, then refine with Brent's
    method (golden section with parabolic steps) to relative tolerance ``tol``.
    """
    evals = 0

    def counted(a: float) -> float:
        nonlocal evals
        evals += 1
        value = phi(a)
        return value if math.isfinite(value) else math.inf

    a, fa = 0.0, f0
    b = initial_step
    fb = counted(b)
    if fb >= fa:
        while True:
            if evals >= max_evals:
                return LineSearchResult(0.0, f0, evals, False)
            c, fc = b, fb
            b = b * (1.0 / _GOLDEN) ** 2
            fb = counted(b)
            if fb < fa:
                break
    else:
        c = b + _GOLDEN * (b - a)
        fc = counted(c)
        while fc < fb:
            if evals >= max_evals:
                return LineSearchResult(c, fc, evals, True)
            a, fa, b, fb = b, fb, c, fc
            c = b + _GOLDEN * (b - a)
            fc = counted(c)
        if not fc > fb:
            return LineSearchResult(b, fb, evals, True)

    # Brent re-evaluates the three bracket points before iterating
    remaining = max_evals - evals - 3
    if remaining <= 0:
        return LineSearchResult(b, fb, evals, True)
    result = minimize_scalar(
        counted,
        bracket=(a, b, c),
        method='brent',
        tol=tol,
        options={'maxiter': remaining},
    )
    if math.isfinite(result.fun) and result.fun < fb and result.x > 0:
        return LineSearchResult(float(result.x), float(result.fun), evals, True)
    return LineSearchResult(b, fb, evals, True)


def conjugate_gradient(
    objective: Objective,
    w0: np.ndarray,
    epochs: int,
    beta_variant: BetaVariant = BetaVariant.FLETCHER_REEVES,
    stopping: Optional[StoppingConfig] = None,
    callback: Optional[Callable[[CgState], None]] = None,
    model: str = "cg"
) -> Tuple[np.ndarray, TrainReport]:
    """
    Conjugate gradient training:

    1. start from ``d = -g``;
    2. line-search ``a_min`` along ``d`` and move ``w <- w + a_min d``;
    3. stop on the epoch cap or the gradient / MSE floors;
    4. refresh the gradient and set ``d <- -g_new + beta d`` with Fletcher-Reeves
       or Polak-Ribiere ``beta``.

    The direction is reset to ``-g`` every ``P`` iterations (``P`` parameters),
    when it is not a descent direction, or after a failed line search.
    """
    if epochs < 1:
        raise DomainError("epochs must be at least 1")
    stopping = _stopping(stopping)
    w = np.array(w0, dtype=float)
    loss, g = objective.value_and_gradient(w)
    _check_finite(loss, w, 0, model)
    state = CgState(gradient=g, direction=-g, beta_variant=beta_variant)
    report = TrainReport(trainer=TrainerKind.CG)
    previous_step: Optional[float] = None
    previous_slope: Optional[float] = None

    for epoch in range(1, epochs + 1):
        if np.linalg.norm(g) <= stopping.gradient_floor:
            report.termination = TerminationReason.GRADIENT_FLOOR
            break
        if loss <= stopping.mse_floor:
            report.termination = TerminationReason.MSE_FLOOR
            break

        d = state.direction
        slope = float(g @ d)
        if slope >= 0:
            d, slope = -g, -float(g @ g)
            state.since_reset = 0

        if previous_step is not None and previous_slope is not None:
            guess = previous_step * previous_slope / slope
        else:
            guess = 1.0 / max(float(np.linalg.norm(d)), 1.0)

        search = line_search(
            lambda a: objective.value(w + a * d), loss, guess,
            tol=settings.CG_LINE_SEARCH_TOL, max_evals=settings.CG_LINE_SEARCH_MAX_EVALS,
        )
        if not search.success and not np.array_equal(d, -g):
            logger.debug(f"CG epoch {epoch}: line search failed, resetting direction")
            d, slope = -g, -float(g @ g)
            state.since_reset = 0
            search = line_search(
                lambda a: objective.value(w + a * d), loss, 1.0 / max(float(np.linalg.norm(d)), 1.0),
                tol=settings.CG_LINE_SEARCH_TOL, max_evals=settings.CG_LINE_SEARCH_MAX_EVALS,
            )
        if not search.success:
            report.termination = TerminationReason.STALLED
            break

        w = w + search.step * d
        loss_new, g_new = objective.value_and_gradient(w)
        _check_finite(loss_new, w, epoch, model)

        g_sq = float(g @ g)
        if beta_variant == BetaVariant.FLETCHER_REEVES:
            beta = float(g_new @ g_new) / g_sq
        else:
            beta = float(g_new @ (g_new - g)) / g_sq

        state.gradient, state.direction = g, d
        state.iteration, state.step, state.beta = epoch, search.step, beta
        if callback is not None:
            callback(replace(state, gradient=g.copy(), direction=d.copy()))

        state.since_reset += 1
        if state.since_reset >= w.size:
            state.direction = -g_new
            state.since_reset = 0
        else:
            state.direction = -g_new + beta * d

        previous_step, previous_slope = search.step, slope
        loss, g = loss_new, g_new
        report.mse_curve.append(loss)
        if epoch % settings.ANN_LOG_EVERY == 0:
            logger.debug(f"CG epoch {epoch}: mse={loss:.6g} step={search.step:.3g}")

    report.epochs_run = len(report.mse_curve)
    report.final_mse = loss
    report.gradient_evaluations = objective.gradient_evaluations
    return w, report


# --- Scaled conjugate gradient ---

@dataclass
class ScgState:
    """Scaled conjugate gradient scratch."""
    direction: np.ndarray           # p
    residual: np.ndarray            # r = -E'(w)
    loss: float
    lam: float                      # scale lambda
    lam_bar: float = 0.0            # raised lambda when the curvature estimate was not positive
    success: bool = True
    comparison: float = 0.0         # Delta
    delta: float = 0.0              # second-order estimate along p
    since_restart: int = 0
    iteration: int = 0


def scg_init(objective: Objective, w: np.ndarray, lam: Optional[float] = None) -> ScgState:
    loss, g = objective.value_and_gradient(w)
    return ScgState(
        direction=-g,
        residual=-g,
        loss=loss,
        lam=settings.SCG_LAMBDA_INIT if lam is None else lam,
    )


def scg_step(
    objective: Objective,
    w: np.ndarray,
    state: ScgState,
    sigma0: Optional[float] = None,
    lam_max: Optional[float] = None
) -> Tuple[np.ndarray, ScgState]:
    """
    One scaled conjugate gradient iteration with exactly two gradient
    evaluations: a finite-difference curvature probe along ``p`` and the
    value/gradient at the trial point. No line search is performed.
    """
    sigma0 = settings.SCG_SIGMA if sigma0 is None else sigma0
    lam_max = settings.SCG_LAMBDA_MAX if lam_max is None else lam_max
    p, r = state.direction, state.residual
    lam = state.lam
    p_sq = float(p @ p)
    if p_sq == 0.0:
        raise DomainError("SCG direction vanished")

    sigma = sigma0 / math.sqrt(p_sq)
    g_probe = objective.gradient(w + sigma * p)
    s = (g_probe + r) / sigma
    delta = float(p @ s) + lam * p_sq
    lam_bar = 0.0
    if delta <= 0:
        # Make the Hessian estimate positive definite
        lam_bar = 2.0 * (lam - delta / p_sq)
        delta = -delta + lam * p_sq
        lam = lam_bar

    mu = float(p @ r)
    alpha = mu / delta
    w_trial = w + alpha * p
    loss_trial, g_trial = objective.value_and_gradient(w_trial)
    if math.isfinite(loss_trial) and mu != 0.0:
        comparison = 2.0 * delta * (state.loss - loss_trial) / (mu * mu)
    else:
        comparison = -math.inf

    new_state = replace(
        state, lam_bar=lam_bar, delta=delta, comparison=comparison,
        iteration=state.iteration + 1,
    )
    if comparison >= 0:
        r_new = -g_trial
        since_restart = state.since_restart + 1
        if since_restart >= w.size:
            p_new = r_new
            since_restart = 0
        else:
            beta = (float(r_new @ r_new) - float(r_new @ r)) / mu
            p_new = r_new + beta * p
        new_state = replace(
            new_state, direction=p_new, residual=r_new, loss=loss_trial,
            success=True, since_restart=since_restart,
        )
        w = w_trial
    else:
        new_state = replace(new_state, success=False)

    if comparison > 0.75:
        lam = max(lam / 2.0, _LAMBDA_MIN)
    if comparison < 0.25:
        lam = min(4.0 * lam, lam_max)
    new_state.lam = lam
    return w, new_state


def scaled_conjugate_gradient(
    objective: Objective,
    w0: np.ndarray,
    epochs: int,
    stopping: Optional[StoppingConfig] = None,
    model: str = "scg"
) -> Tuple[np.ndarray, TrainReport]:
    """Scaled conjugate gradient training; one epoch is one ``scg_step``."""
    if epochs < 1:
        raise DomainError("epochs must be at least 1")
    stopping = _stopping(stopping)
    w = np.array(w0, dtype=float)
    state = scg_init(objective, w)
    _check_finite(state.loss, w, 0, model)
    report = TrainReport(trainer=TrainerKind.SCG)

    for epoch in range(1, epochs + 1):
        if np.linalg.norm(state.residual) <= stopping.gradient_floor:
            report.termination = TerminationReason.GRADIENT_FLOOR
            break
        if state.loss <= stopping.mse_floor:
            report.termination = TerminationReason.MSE_FLOOR
            break
        if not np.any(state.direction):
            state = replace(state, direction=state.residual.copy(), since_restart=0)
        w, state = scg_step(objective, w, state)
        _check_finite(state.loss, w, epoch, model)
        report.mse_curve.append(state.loss)
        if epoch % settings.ANN_LOG_EVERY == 0:
            logger.debug(f"SCG epoch {epoch}: mse={state.loss:.6g} lambda={state.lam:.3g}")

    report.epochs_run = len(report.mse_curve)
    report.final_mse = state.loss
    report.gradient_evaluations = objective.gradient_evaluations
    return w, report


# --- Network trainers ---

def _finish(net: MlpNetwork, w: np.ndarray, report: TrainReport, start_time: float) -> TrainReport:
    net.set_parameters(w)
    log_performance(
        logger, f"{report.trainer.value.upper()} training", start_time,
        epochs=report.epochs_run, mse=f"{report.final_mse:.6g}",
        termination=report.termination.value,
    )
    return report


def gd_train(net: MlpNetwork, X: np.ndarray, y: np.ndarray, config: GdConfig,
             stopping: Optional[StoppingConfig] = None) -> TrainReport:
    """Train ``net`` in place with batch gradient descent and momentum."""
    start_time = time.perf_counter()
    objective = NetworkObjective(net, X, y)
    w, report = gradient_descent(objective, net.get_parameters(), config, stopping, model="ANN-GD")
    return _finish(net, w, report, start_time)


def cg_train(net: MlpNetwork, X: np.ndarray, y: np.ndarray, epochs: int,
             beta_variant: BetaVariant = BetaVariant.FLETCHER_REEVES,
             stopping: Optional[StoppingConfig] = None,
             callback: Optional[Callable[[CgState], None]] = None) -> TrainReport:
    """Train ``net`` in place with line-search conjugate gradient."""
    start_time = time.perf_counter()
    objective = NetworkObjective(net, X, y)
    w, report = conjugate_gradient(
        objective, net.get_parameters(), epochs, beta_variant, stopping, callback, model="ANN-CG"
    )
    return _finish(net, w, report, start_time)


def scg_train(net: MlpNetwork, X: np.ndarray, y: np.ndarray, epochs: int,
              stopping: Optional[StoppingConfig] = None) -> TrainReport:
    """Train ``net`` in place with scaled conjugate gradient."""
    start_time = time.perf_counter()
    objective = NetworkObjective(net, X, y)
    w, report = scaled_conjugate_gradient(objective, net.get_parameters(), epochs, stopping, model="ANN-SCG")
    return _finish(net, w, report, start_time)


def train_network(
    net: MlpNetwork,
    X: np.ndarray,
    y: np.ndarray,
    trainer: TrainerKind,
    epochs: int,
    gd_config: Optional[GdConfig] = None,
    beta_variant: BetaVariant = BetaVariant.FLETCHER_REEVES,
    stopping: Optional[StoppingConfig] = None
) -> TrainReport:
    """Dispatch to the requested trainer."""
    if trainer == TrainerKind.GD:
        base = gd_config or GdConfig(
            learning_rate=settings.ANN_LEARNING_RATE, momentum=settings.ANN_MOMENTUM
        )
        return gd_train(net, X, y, base.model_copy(update={"epochs": epochs}), stopping)
    if trainer == TrainerKind.CG:
        return cg_train(net, X, y, epochs, beta_variant, stopping)
    return scg_train(net, X, y, epochs, stopping)


# --- Text forms ---

def network_to_json(net: MlpNetwork) -> str:
    """JSON text form with row-major weight matrices."""
    document: Dict[str, Any] = {
        "kind": "mlp",
        "layer_sizes": list(net.layer_sizes),
        "hidden_activation": net.hidden_activation.value,
        "output_activation": net.output_activation.value,
        "weights": [W.tolist() for W in net.weights],
        "biases": [b.tolist() for b in net.biases],
    }
    return json.dumps(document, indent=2)


def network_from_json(text: str) -> MlpNetwork:
    data = json.loads(text)
    if data.get("kind") != "mlp":
        raise StructuralError(f"not a network document (kind={data.get('kind')!r})")
    try:
        return MlpNetwork(
            layer_sizes=[int(s) for s in data["layer_sizes"]],
            weights=[np.array(W, dtype=float).reshape(len(W), -1) for W in data["weights"]],
            biases=[np.array(b, dtype=float) for b in data["biases"]],
            hidden_activation=Activation(data["hidden_activation"]),
            output_activation=Activation(data["output_activation"]),
        )
    except (KeyError, ValueError) as e:
        raise StructuralError(f"malformed network document: {e}") from e


def train_report_to_frame(report: TrainReport) -> pd.DataFrame:
    """``(epoch, mse)`` rows, one per epoch run."""
    return pd.DataFrame(
        {"epoch": np.arange(1, report.epochs_run + 1), "mse": report.mse_curve},
        columns=["epoch", "mse"],
    )
