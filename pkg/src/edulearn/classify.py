"""Logistic regression, binary and multinomial, with three hand-built
trainers (full-batch gradient descent, SGD, L-BFGS) plus the metrics suite.

All trainers start from zero weights and optimize a packed parameter
vector. Binary models pack ``[w_1 .. w_d, intercept]``; multinomial models
pack ``[W row-major (K x d), b_1 .. b_K]``. L2 penalties never touch
intercepts; L1 is available only on the SGD path (per-step soft threshold).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionError,
    DivergenceError,
    ParameterError,
    StalledDescentError,
)
from .numcore import DenseMatrix, DenseVector, as_matrix, as_vector

__all__ = [
    "OptimizerConfig",
    "LogisticModel",
    "ClassMetrics",
    "MetricsReport",
    "sigmoid",
    "binary_loss_grad",
    "softmax_loss_grad",
    "fit_gd",
    "fit_sgd",
    "fit_lbfgs",
    "train_logistic",
    "predict_proba",
    "predict",
    "proba_full",
    "compute_metrics",
]

SOLVERS = ("gd", "sgd", "lbfgs")

# outputs of sigmoid are clamped into the open interval (0, 1): the largest
# representable double below 1, and the smallest positive normal double
_P_MAX = float(np.nextafter(1.0, 0.0))
_P_MIN = float(np.finfo(np.float64).tiny)

_ARMIJO_C = 1e-4
_MAX_HALVINGS = 50
_CURVATURE_TOL = 1e-12


@dataclass(frozen=True)
class OptimizerConfig:
    """Solver choice plus caps, rates, tolerances, penalties, and seed.

    ``max_iter`` caps GD/L-BFGS iterations; ``epochs`` and ``learning_rate``
    drive SGD; ``tol`` is the infinity-norm gradient stop for GD/L-BFGS.
    """

    solver: str = "lbfgs"
    max_iter: int = 1000
    epochs: int = 100
    learning_rate: float = 0.01
    tol: float = 1e-6
    l2: float = 0.0
    l1: float = 0.0
    lbfgs_memory: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.solver not in SOLVERS:
            raise ParameterError(f"unknown solver '{self.solver}', expected one of {SOLVERS}")
        if self.max_iter < 0 or self.epochs < 0:
            raise ParameterError("max_iter and epochs must be non-negative")
        if self.learning_rate <= 0:
            raise ParameterError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.tol <= 0:
            raise ParameterError(f"tol must be > 0, got {self.tol}")
        if self.l2 < 0 or self.l1 < 0:
            raise ParameterError("l2 and l1 must be non-negative")
        if self.lbfgs_memory < 1:
            raise ParameterError(f"lbfgs_memory must be >= 1, got {self.lbfgs_memory}")
        if self.seed < 0:
            raise ParameterError(f"seed must be non-negative, got {self.seed}")
        if self.l1 > 0 and self.solver != "sgd":
            raise ParameterError(
                "l1 regularization is only supported with the sgd solver "
                "(the objective is non-smooth)"
            )


@dataclass(frozen=True)
class LogisticModel:
    """Fitted logistic model.

    ``weights`` has one row for binary models (scores for class 1) and
    ``n_classes`` rows for multinomial models. ``loss_path`` records the
    training loss per accepted iteration (GD/L-BFGS) or per epoch (SGD).
    """

    weights: DenseMatrix
    intercepts: DenseVector
    class_names: tuple[str, ...]
    converged: bool
    iterations_used: int
    loss_path: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "class_names", tuple(self.class_names))
        if len(self.class_names) < 2:
            raise ParameterError("a logistic model needs at least 2 classes")
        expected_rows = 1 if len(self.class_names) == 2 else len(self.class_names)
        if self.weights.rows != expected_rows:
            raise DimensionError(
                f"{len(self.class_names)}-class model needs {expected_rows} weight rows, "
                f"got {self.weights.rows}"
            )
        if len(self.intercepts) != self.weights.rows:
            raise DimensionError("one intercept per weight row required")

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    @property
    def is_binary(self) -> bool:
        return self.weights.rows == 1

    @property
    def n_features(self) -> int:
        return self.weights.cols


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class MetricsReport:
    """Accuracy, per-class and macro precision/recall/F1, confusion matrix.

    Confusion rows are true classes, columns predicted classes.
    """

    accuracy: float
    per_class: tuple[ClassMetrics, ...]
    macro: ClassMetrics
    confusion: tuple[tuple[int, ...], ...]


def sigmoid(z):
    """Numerically stable logistic function, clamped into (0, 1).

    Accepts scalars or arrays; evaluates exp only on the non-overflowing
    branch. Raw float64 rounds sigmoid(100) up to exactly 1.0, so outputs
    are clamped to the nearest representable values inside the open
    interval.
    """
    arr = np.asarray(z, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ParameterError("sigmoid requires finite input")
    out = np.empty_like(arr)
    pos = arr >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-arr[pos]))
    ez = np.exp(arr[~pos])
    out[~pos] = ez / (1.0 + ez)
    out = np.clip(out, _P_MIN, _P_MAX)
    if np.isscalar(z) or arr.ndim == 0:
        return float(out)
    return out


def _sigmoid_scalar(z: float) -> float:
    # fast path for the SGD inner loop; no clamping needed for gradients
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


def _softmax_rows(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def _binary_value_grad(theta: np.ndarray, x: np.ndarray, y: np.ndarray, l2: float):
    """Mean negative log-likelihood + (l2/2)||w||^2 and its gradient.

    theta packs [w, intercept]; the intercept is unpenalized.
    """
    n, d = x.shape
    w, b = theta[:d], theta[d]
    z = x @ w + b
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z)) + 0.5 * l2 * float(w @ w)
    dz = (sigmoid(z) - y) / n
    grad = np.empty(d + 1)
    grad[:d] = x.T @ dz + l2 * w
    grad[d] = dz.sum()
    return loss, grad


def _multinomial_value_grad(theta: np.ndarray, x: np.ndarray, y: np.ndarray, k: int, l2: float):
    """Mean categorical cross-entropy + (l2/2)||W||^2 and its packed gradient.

    theta packs [W row-major (k x d), b (k)]; intercepts are unpenalized.
    """
    n, d = x.shape
    w = theta[: k * d].reshape(k, d)
    b = theta[k * d :]
    z = x @ w.T + b
    zmax = z.max(axis=1)
    lse = zmax + np.log(np.exp(z - zmax[:, None]).sum(axis=1))
    loss = float(np.mean(lse - z[np.arange(n), y])) + 0.5 * l2 * float((w * w).sum())
    p = np.exp(z - lse[:, None])
    p[np.arange(n), y] -= 1.0
    p /= n
    grad = np.empty(k * d + k)
    grad[: k * d] = (p.T @ x + l2 * w).ravel()
    grad[k * d :] = p.sum(axis=0)
    return loss, grad


def binary_loss_grad(weights_and_intercept, x, y, l2: float = 0.0):
    """Binary logistic loss and gradient at a packed [w, intercept] point."""
    theta = as_vector(weights_and_intercept)
    xm = as_matrix(x)
    yv = as_vector(y)
    if theta.shape[0] != xm.shape[1] + 1:
        raise DimensionError(
            f"expected {xm.shape[1] + 1} packed parameters (weights + intercept), "
            f"got {theta.shape[0]}"
        )
    if yv.shape[0] != xm.shape[0]:
        raise DimensionError(f"{xm.shape[0]} rows but {yv.shape[0]} labels")
    if np.any((yv != 0.0) & (yv != 1.0)):
        raise ParameterError("binary labels must be 0 or 1")
    loss, grad = _binary_value_grad(theta, xm, yv, l2)
    return loss, DenseVector(grad)


def softmax_loss_grad(weights, intercepts, x, y, l2: float = 0.0):
    """Multinomial cross-entropy loss and packed gradient.

    The gradient packs [dW row-major, db] to match the trainers' parameter
    layout.
    """
    wm = as_matrix(weights)
    bv = as_vector(intercepts)
    xm = as_matrix(x)
    yi = np.asarray(y, dtype=np.int64)
    k, d = wm.shape
    if d != xm.shape[1]:
        raise DimensionError(f"weights have {d} columns but input has {xm.shape[1]}")
    if bv.shape[0] != k:
        raise DimensionError(f"{k} weight rows but {bv.shape[0]} intercepts")
    if yi.shape[0] != xm.shape[0]:
        raise DimensionError(f"{xm.shape[0]} rows but {yi.shape[0]} labels")
    if yi.size and (yi.min() < 0 or yi.max() >= k):
        raise ParameterError(f"class indices must lie in [0, {k})")
    theta = np.concatenate([wm.ravel(), bv])
    loss, grad = _multinomial_value_grad(theta, xm, yi, k, l2)
    return loss, DenseVector(grad)


def _resolve_classes(y: np.ndarray, class_names) -> tuple[tuple[str, ...], int]:
    if class_names is None:
        k = max(2, int(y.max()) + 1 if y.size else 2)
        names = tuple(str(c) for c in range(k))
    else:
        names = tuple(class_names)
        k = len(names)
        if k < 2:
            raise ParameterError("need at least 2 class names")
    if y.size and (y.min() < 0 or y.max() >= k):
        raise ParameterError(f"labels must lie in [0, {k})")
    return names, k


def _make_objective(x: np.ndarray, y: np.ndarray, k: int, l2: float):
    if k == 2:
        yb = y.astype(np.float64)

        def objective(theta):
            return _binary_value_grad(theta, x, yb, l2)

        return objective, x.shape[1] + 1

    def objective(theta):
        return _multinomial_value_grad(theta, x, y, k, l2)

    return objective, k * x.shape[1] + k


def _unpack_model(
    theta: np.ndarray,
    d: int,
    k: int,
    names: tuple[str, ...],
    converged: bool,
    iterations: int,
    loss_path: list[float],
) -> LogisticModel:
    if k == 2:
        weights = theta[:d].reshape(1, d)
        intercepts = theta[d:]
    else:
        weights = theta[: k * d].reshape(k, d)
        intercepts = theta[k * d :]
    return LogisticModel(
        weights=DenseMatrix(weights),
        intercepts=DenseVector(intercepts),
        class_names=names,
        converged=converged,
        iterations_used=iterations,
        loss_path=tuple(loss_path),
    )


def _armijo_step(objective, theta, value, grad, direction):
    """Backtracking line search: halve the step until sufficient decrease."""
    slope = float(grad @ direction)
    step = 1.0
    for _ in range(_MAX_HALVINGS + 1):
        candidate = theta + step * direction
        cand_value, cand_grad = objective(candidate)
        if math.isfinite(cand_value) and cand_value <= value + _ARMIJO_C * step * slope:
            return candidate, cand_value, cand_grad
        step *= 0.5
    raise StalledDescentError(
        f"line search found no decrease after {_MAX_HALVINGS} halvings", iterate=theta
    )


def _descent_loop(objective, n_params: int, cfg: OptimizerConfig, direction_fn, on_step=None):
    """Shared GD / L-BFGS shell: iterate until grad tolerance or max_iter."""
    theta = np.zeros(n_params)
    value, grad = objective(theta)
    loss_path = [value]
    iterations = 0
    converged = bool(np.max(np.abs(grad)) < cfg.tol) if grad.size else True
    while not converged and iterations < cfg.max_iter:
        direction = direction_fn(grad)
        if float(direction @ grad) >= 0.0:
            direction = -grad
        new_theta, value, new_grad = _armijo_step(objective, theta, value, grad, direction)
        if on_step is not None:
            on_step(new_theta - theta, new_grad - grad)
        theta, grad = new_theta, new_grad
        loss_path.append(value)
        iterations += 1
        converged = bool(np.max(np.abs(grad)) < cfg.tol)
    return theta, converged, iterations, loss_path


def fit_gd(x, y, cfg: OptimizerConfig, class_names=None) -> LogisticModel:
    """Full-batch gradient descent with Armijo backtracking from zero weights."""
    if cfg.solver != "gd":
        raise ParameterError(f"fit_gd called with solver '{cfg.solver}'")
    xm = as_matrix(x)
    yi = np.asarray(y, dtype=np.int64)
    names, k = _resolve_classes(yi, class_names)
    objective, n_params = _make_objective(xm, yi, k, cfg.l2)
    theta, converged, iterations, loss_path = _descent_loop(
        objective, n_params, cfg, lambda grad: -grad
    )
    return _unpack_model(theta, xm.shape[1], k, names, converged, iterations, loss_path)


def fit_lbfgs(x, y, cfg: OptimizerConfig, class_names=None) -> LogisticModel:
    """L-BFGS with two-loop recursion and Armijo backtracking.

    The inverse-Hessian seed is scaled by s.y / y.y from the most recent
    pair; pairs with curvature s.y <= 1e-12 are skipped.
    """
    if cfg.solver != "lbfgs":
        raise ParameterError(f"fit_lbfgs called with solver '{cfg.solver}'")
    xm = as_matrix(x)
    yi = np.asarray(y, dtype=np.int64)
    names, k = _resolve_classes(yi, class_names)
    objective, n_params = _make_objective(xm, yi, k, cfg.l2)

    history: list[tuple[np.ndarray, np.ndarray, float]] = []

    def direction_fn(grad: np.ndarray) -> np.ndarray:
        q = grad.copy()
        alphas: list[float] = []
        for s, yb, rho in reversed(history):
            a = rho * float(s @ q)
            q -= a * yb
            alphas.append(a)
        if history:
            s_last, y_last, _ = history[-1]
            gamma = float(s_last @ y_last) / float(y_last @ y_last)
        else:
            gamma = 1.0
        r = gamma * q
        for (s, yb, rho), a in zip(history, reversed(alphas)):
            b = rho * float(yb @ r)
            r += (a - b) * s
        return -r

    def on_step(s: np.ndarray, yb: np.ndarray) -> None:
        curvature = float(s @ yb)
        if curvature > _CURVATURE_TOL:
            history.append((s, yb, 1.0 / curvature))
            if len(history) > cfg.lbfgs_memory:
                history.pop(0)

    theta, converged, iterations, loss_path = _descent_loop(
        objective, n_params, cfg, direction_fn, on_step
    )
    return _unpack_model(theta, xm.shape[1], k, names, converged, iterations, loss_path)


def fit_sgd(x, y, cfg: OptimizerConfig, class_names=None) -> LogisticModel:
    """Per-sample SGD: constant rate, seeded reshuffle each epoch, exactly
    cfg.epochs epochs, l2 added per sample and l1 via per-step soft threshold."""
    if cfg.solver != "sgd":
        raise ParameterError(f"fit_sgd called with solver '{cfg.solver}'")
    xm = np.ascontiguousarray(as_matrix(x))
    yi = np.asarray(y, dtype=np.int64)
    names, k = _resolve_classes(yi, class_names)
    objective, n_params = _make_objective(xm, yi, k, cfg.l2)
    n, d = xm.shape
    lr, l1, l2 = cfg.learning_rate, cfg.l1, cfg.l2
    rng = np.random.default_rng(cfg.seed)

    theta = np.zeros(n_params)
    loss_path: list[float] = []

    def check_finite(epoch: int, value: float) -> None:
        if not math.isfinite(value):
            raise DivergenceError(
                f"sgd diverged at epoch {epoch + 1} with learning rate {lr}",
                epoch=epoch + 1,
                learning_rate=lr,
            )

    # a diverging run overflows before the per-epoch loss check catches it;
    # silence the transient warnings and rely on that check
    with np.errstate(over="ignore", invalid="ignore"):
        if k == 2:
            w = np.zeros(d)
            b = 0.0
            yb = yi.astype(np.float64)
            buf = np.empty(d)
            for epoch in range(cfg.epochs):
                for i in rng.permutation(n):
                    xi = xm[i]
                    gs = _sigmoid_scalar(float(w @ xi) + b) - yb[i]
                    if l2 > 0.0:
                        w *= 1.0 - lr * l2  # the l2 part of the per-sample gradient
                    np.multiply(xi, lr * gs, out=buf)
                    w -= buf
                    b -= lr * gs
                    if l1 > 0.0:
                        w = np.sign(w) * np.maximum(np.abs(w) - lr * l1, 0.0)
                theta = np.concatenate([w, [b]])
                value, _ = objective(theta)
                check_finite(epoch, value)
                loss_path.append(value)
        else:
            w = np.zeros((k, d))
            b = np.zeros(k)
            delta = np.empty(k)
            buf = np.empty((k, d))
            for epoch in range(cfg.epochs):
                for i in rng.permutation(n):
                    xi = xm[i]
                    np.matmul(w, xi, out=delta)
                    delta += b
                    delta -= delta.max()
                    np.exp(delta, out=delta)
                    delta /= delta.sum()
                    delta[yi[i]] -= 1.0
                    delta *= lr
                    if l2 > 0.0:
                        w *= 1.0 - lr * l2
                    np.multiply(delta[:, None], xi, out=buf)
                    w -= buf
                    b -= delta
                    if l1 > 0.0:
                        w = np.sign(w) * np.maximum(np.abs(w) - lr * l1, 0.0)
                theta = np.concatenate([w.ravel(), b])
                value, _ = objective(theta)
                check_finite(epoch, value)
                loss_path.append(value)

    converged = cfg.epochs > 0
    return _unpack_model(theta, d, k, names, converged, cfg.epochs, loss_path)


def train_logistic(x, y, cfg: OptimizerConfig, class_names=None) -> LogisticModel:
    """Dispatch to the trainer named by cfg.solver."""
    if cfg.solver == "gd":
        return fit_gd(x, y, cfg, class_names)
    if cfg.solver == "sgd":
        return fit_sgd(x, y, cfg, class_names)
    return fit_lbfgs(x, y, cfg, class_names)


def predict_proba(model: LogisticModel, x) -> DenseMatrix:
    """Class-1 probabilities (binary, one column) or row-stochastic softmax."""
    xm = as_matrix(x)
    if xm.shape[1] != model.n_features:
        raise DimensionError(
            f"model expects {model.n_features} features, input has {xm.shape[1]}"
        )
    if model.is_binary:
        z = xm @ model.weights.values[0] + model.intercepts.values[0]
        return DenseMatrix(sigmoid(z)[:, None])
    z = xm @ model.weights.values.T + model.intercepts.values
    return DenseMatrix(_softmax_rows(z))


def predict(model: LogisticModel, x) -> np.ndarray:
    """Class indices; binary threshold 0.5 (boundary to class 1), multinomial
    argmax with lowest-index tie-break."""
    proba = predict_proba(model, x).values
    if model.is_binary:
        return (proba[:, 0] >= 0.5).astype(np.int64)
    return np.argmax(proba, axis=1).astype(np.int64)


def proba_full(model: LogisticModel, x) -> np.ndarray:
    """Per-class probability matrix (n x n_classes) for any model.

    Binary models expand to two columns [1-p, p] so reporting code can
    treat both shapes alike.
    """
    proba = predict_proba(model, x).values
    if model.is_binary:
        return np.column_stack([1.0 - proba[:, 0], proba[:, 0]])
    return proba


def compute_metrics(y_true, y_pred, n_classes: int) -> MetricsReport:
    """Confusion matrix plus per-class and macro precision/recall/F1.

    Zero-denominator precision/recall are defined as 0 so macro averages
    never propagate NaN.
    """
    yt = np.asarray(y_true, dtype=np.int64)
    yp = np.asarray(y_pred, dtype=np.int64)
    if yt.shape != yp.shape:
        raise DimensionError(f"length mismatch: {yt.shape[0]} true vs {yp.shape[0]} predicted")
    if yt.size < 1:
        raise DimensionError("compute_metrics needs at least one row")
    if n_classes < 2:
        raise ParameterError(f"n_classes must be >= 2, got {n_classes}")
    for name, arr in (("true", yt), ("predicted", yp)):
        if arr.min() < 0 or arr.max() >= n_classes:
            raise ParameterError(f"{name} labels must lie in [0, {n_classes})")

    confusion = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(confusion, (yt, yp), 1)

    per_class = []
    for c in range(n_classes):
        tp = int(confusion[c, c])
        fp = int(confusion[:, c].sum()) - tp
        fn = int(confusion[c, :].sum()) - tp
        precision = tp / (tp + fp) if tp + fp > 0 else 0.0
        recall = tp / (tp + fn) if tp + fn > 0 else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
        per_class.append(ClassMetrics(precision=precision, recall=recall, f1=f1))

    macro = ClassMetrics(
        precision=sum(m.precision for m in per_class) / n_classes,
        recall=sum(m.recall for m in per_class) / n_classes,
        f1=sum(m.f1 for m in per_class) / n_classes,
    )
    return MetricsReport(
        accuracy=float(np.trace(confusion)) / yt.size,
        per_class=tuple(per_class),
        macro=macro,
        confusion=tuple(tuple(int(v) for v in row) for row in confusion),
    )
