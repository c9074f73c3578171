"""Linear multiclass SVM in the single-objective Weston-Watkins form.

Minimizes ``0.5 * sum_k ||w_k||^2 + C * sum_i sum_{t != y_i} xi_it`` with
``xi_it = max(0, 2 - (f_{y_i}(x_i) - f_t(x_i)))`` and ``f_k(x) = w_k'x + b_k``
by full-batch subgradient descent from zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivergenceDetected, InvalidHyperparameter, ShapeMismatch
from .numkernel import as_matrix

MARGIN = 2.0
MAX_HALVINGS = 60
DIVERGENCE_FACTOR = 10.0


@dataclass(frozen=True)
class SvmModel:
    weights: np.ndarray  # K x J
    biases: np.ndarray  # K
    c: float
    history: np.ndarray
    x_mean: np.ndarray
    eta0: float
    epochs: int
    class_names: tuple[str, ...] = ()

    @property
    def n_features(self) -> int:
        return self.weights.shape[1]


def slacks(weights, biases, x, labels) -> np.ndarray:
    """n x K hinge values; the column of each row's own class is zero."""
    scores = x @ weights.T + biases
    own = scores[np.arange(x.shape[0]), labels - 1]
    xi = np.maximum(0.0, MARGIN - own[:, None] + scores)
    xi[np.arange(x.shape[0]), labels - 1] = 0.0
    return xi


def objective(weights, biases, x, labels, c: float) -> float:
    return 0.5 * float(np.sum(weights**2)) + c * float(np.sum(slacks(weights, biases, x, labels)))


def _subgradient(weights, biases, x, labels, c):
    n = x.shape[0]
    rows = np.arange(n)
    active = (slacks(weights, biases, x, labels) > 0.0).astype(np.float64)
    # each violated pair (i, t) pushes f_t(x_i) down and f_{y_i}(x_i) up
    coeff = active.copy()
    coeff[rows, labels - 1] -= active.sum(axis=1)
    grad_w = weights + c * (coeff.T @ x)
    grad_b = c * coeff.sum(axis=0)
    return grad_w, grad_b


def fit_svm(
    x,
    labels,
    c: float = 1.0,
    epochs: int = 2000,
    eta0: float | None = None,
    class_names=(),
    n_classes: int | None = None,
) -> SvmModel:
    """Train on spectra ``x`` (centered internally) with 1-based ``labels``.

    The step at epoch ``e`` starts from ``eta0 / (1 + e)`` (``eta0`` defaults
    to ``0.1 / n``) and is halved until the objective does not increase, so
    the recorded history is monotone. ``history[0]`` is the objective at the
    zero initialization.
    """
    x = as_matrix(x, "x")
    labels = np.asarray(labels, dtype=np.int64).ravel()
    if labels.size != x.shape[0]:
        raise ShapeMismatch(f"{labels.size} labels for {x.shape[0]} rows")
    k = int(n_classes or max(labels.max(), len(class_names)))
    if not c > 0:
        raise InvalidHyperparameter(f"C must be positive, got {c}")
    if epochs < 1:
        raise InvalidHyperparameter(f"epochs must be >= 1, got {epochs}")
    if k < 2:
        raise InvalidHyperparameter("need at least two classes")
    n, j = x.shape
    eta0 = 0.1 / n if eta0 is None else float(eta0)
    if not eta0 > 0:
        raise InvalidHyperparameter(f"eta0 must be positive, got {eta0}")

    x_mean = x.mean(axis=0)
    xc = x - x_mean
    w = np.zeros((k, j))
    b = np.zeros(k)
    current = objective(w, b, xc, labels, c)
    initial = current
    history = [current]
    for epoch in range(epochs):
        grad_w, grad_b = _subgradient(w, b, xc, labels, c)
        step = eta0 / (1.0 + epoch)
        for _ in range(MAX_HALVINGS):
            w_try = w - step * grad_w
            b_try = b - step * grad_b
            trial = objective(w_try, b_try, xc, labels, c)
            if trial <= current:
                w, b, current = w_try, b_try, trial
                break
            step *= 0.5
        if not np.isfinite(current) or current > DIVERGENCE_FACTOR * initial:
            raise DivergenceDetected(f"objective reached {current:.3e} at epoch {epoch + 1}")
        history.append(current)
    return SvmModel(w, b, float(c), np.array(history), x_mean, eta0, int(epochs), tuple(class_names))


def decision_function(model: SvmModel, x_new) -> np.ndarray:
    x_new = as_matrix(x_new, "x_new")
    if x_new.shape[1] != model.n_features:
        raise ShapeMismatch(f"model expects {model.n_features} columns, got {x_new.shape[1]}")
    return (x_new - model.x_mean) @ model.weights.T + model.biases


def svm_predict(model: SvmModel, x_new) -> np.ndarray:
    """1-based argmax of ``w_k'x + b_k``; ties go to the lowest class."""
    return np.argmax(decision_function(model, x_new), axis=1) + 1
