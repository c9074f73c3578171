"""Partial least squares by NIPALS deflation, with the PLS-DA classifier built on it."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from . import metrics, numkernel
from .errors import DegenerateComponent, InvalidConfig, ShapeMismatch, Singular, SingularPTW
from .numkernel import as_matrix

DEGENERATE_WEIGHT_TOL = 1e-12
TRIANGULAR_TOL = 1e-8
DEFAULT_P_RANGE = range(2, 11)


@dataclass(frozen=True)
class PlsModel:
    """A fitted PLS model.

    ``weights``, ``x_loadings`` are J x P, ``scores`` n x P, ``y_loadings``
    K x P and ``coefficients`` J x K. ``score_norms[p]`` is the factor that
    normalized score ``p``; it lets new data be scored by replaying the
    deflation. ``x_scale`` is all ones unless the data were autoscaled.
    """

    n_components: int
    weights: np.ndarray
    scores: np.ndarray
    x_loadings: np.ndarray
    y_loadings: np.ndarray
    coefficients: np.ndarray
    x_mean: np.ndarray
    y_mean: np.ndarray
    explained_variance_x: np.ndarray
    score_norms: np.ndarray
    x_scale: np.ndarray
    residual_norms: np.ndarray
    class_names: tuple[str, ...] = ()
    x_residual: np.ndarray | None = field(default=None, repr=False, compare=False)
    scree: tuple[tuple[int, float], ...] = ()

    @property
    def n_features(self) -> int:
        return self.weights.shape[0]

    @property
    def n_responses(self) -> int:
        return self.y_loadings.shape[0]


def one_hot(labels, n_classes: int | None = None) -> np.ndarray:
    """n x K indicator matrix for 1-based class labels."""
    labels = np.asarray(labels, dtype=np.int64).ravel()
    k = int(n_classes or labels.max())
    coding = np.zeros((labels.size, k))
    coding[np.arange(labels.size), labels - 1] = 1.0
    return coding


def _dominant_direction(cross: np.ndarray) -> np.ndarray:
    if cross.shape[1] == 1:
        return np.ones(1)
    return numkernel.sym_eigen(cross.T @ cross).eigenvectors[:, 0]


def fit_pls(
    x,
    y,
    n_components: int,
    x_mean=None,
    y_mean=None,
    x_scale=None,
) -> PlsModel:
    """Run the NIPALS loop on column-centered ``x`` (n x J) and ``y`` (n x K).

    Each component takes the weight vector from ``E'F`` (reduced to its
    dominant direction when ``y`` has several columns), forms a unit-norm
    score, extracts the X and Y loadings and deflates both residuals.
    The means and scale are only stored, for use at prediction time.
    """
    e = as_matrix(x, "x").copy()
    f = as_matrix(y, "y").copy()
    n, j = e.shape
    if f.shape[0] != n:
        raise ShapeMismatch(f"x has {n} rows, y has {f.shape[0]}")
    if not 1 <= n_components <= min(n - 1, j):
        raise InvalidConfig(f"n_components must lie in [1, {min(n - 1, j)}], got {n_components}")
    k = f.shape[1]
    p_count = n_components
    w_mat = np.zeros((j, p_count))
    t_mat = np.zeros((n, p_count))
    p_mat = np.zeros((j, p_count))
    q_mat = np.zeros((k, p_count))
    norms = np.zeros(p_count)
    residual_norms = [float(np.linalg.norm(e))]
    reference = None
    for p in range(p_count):
        cross = e.T @ f
        w = cross @ _dominant_direction(cross)
        w_norm = float(np.linalg.norm(w))
        if reference is None:
            reference = w_norm
        if w_norm == 0.0 or w_norm < DEGENERATE_WEIGHT_TOL * reference:
            raise DegenerateComponent(f"weight vector vanished at component {p + 1}")
        ew = e @ w
        s = float(np.sqrt(ew @ ew))
        if s == 0.0:
            raise DegenerateComponent(f"score vector vanished at component {p + 1}")
        t = ew / s
        p_load = e.T @ t
        q_load = f.T @ t
        e -= np.outer(t, p_load)
        f -= np.outer(t, q_load)
        w_mat[:, p], t_mat[:, p], p_mat[:, p], q_mat[:, p], norms[p] = w, t, p_load, q_load, s
        residual_norms.append(float(np.linalg.norm(e)))

    total = float(np.sum(as_matrix(x) ** 2))
    ev = 100.0 * np.sum(p_mat**2, axis=0) * np.sum(t_mat**2, axis=0) / total if total > 0 else np.zeros(p_count)
    model = PlsModel(
        n_components=p_count,
        weights=w_mat,
        scores=t_mat,
        x_loadings=p_mat,
        y_loadings=q_mat,
        coefficients=np.zeros((j, k)),
        x_mean=np.zeros(j) if x_mean is None else np.asarray(x_mean, dtype=float),
        y_mean=np.zeros(k) if y_mean is None else np.asarray(y_mean, dtype=float),
        explained_variance_x=ev,
        score_norms=norms,
        x_scale=np.ones(j) if x_scale is None else np.asarray(x_scale, dtype=float),
        residual_norms=np.array(residual_norms),
        x_residual=e,
    )
    return replace(model, coefficients=coefficients(model))


def coefficients(model: PlsModel) -> np.ndarray:
    """Regression coefficients ``W (P'W)^-1 Q'`` (J x K) in the preprocessed space."""
    ptw = model.x_loadings.T @ model.weights
    scale = max(float(np.max(np.abs(ptw))), np.finfo(float).tiny)
    try:
        if np.max(np.abs(np.tril(ptw, -1)), initial=0.0) < TRIANGULAR_TOL * scale:
            inner = numkernel.solve_upper_triangular(ptw, model.y_loadings.T)
        else:
            inner = numkernel.solve(ptw, model.y_loadings.T)
    except Singular as exc:
        raise SingularPTW(str(exc)) from exc
    return model.weights @ inner


def _preprocess(model: PlsModel, x_new) -> np.ndarray:
    x_new = as_matrix(x_new, "x_new")
    if x_new.shape[1] != model.n_features:
        raise ShapeMismatch(f"model expects {model.n_features} columns, got {x_new.shape[1]}")
    return (x_new - model.x_mean) / model.x_scale


def predict_response(model: PlsModel, x_new) -> np.ndarray:
    """Predicted responses through the coefficient matrix."""
    return _preprocess(model, x_new) @ model.coefficients + model.y_mean


def transform(model: PlsModel, x_new) -> np.ndarray:
    """Scores of new rows, obtained by replaying the deflation sequence."""
    e = _preprocess(model, x_new).copy()
    t_new = np.zeros((e.shape[0], model.n_components))
    for p in range(model.n_components):
        t = e @ model.weights[:, p] / model.score_norms[p]
        e -= np.outer(t, model.x_loadings[:, p])
        t_new[:, p] = t
    return t_new


def predict_response_scores(model: PlsModel, x_new) -> np.ndarray:
    """Predicted responses through the score space, ``T_new Q' + y_mean``."""
    return transform(model, x_new) @ model.y_loadings.T + model.y_mean


def explained_variance(model: PlsModel, x) -> tuple[np.ndarray, np.ndarray]:
    """Per-component and cumulative percentages of ``||x||_F^2`` reproduced by ``T_p P_p'``."""
    x = as_matrix(x)
    total = float(np.sum(x**2))
    if total == 0.0:
        per = np.zeros(model.n_components)
    else:
        per = np.array(
            [
                100.0 * np.sum(np.outer(model.scores[:, p], model.x_loadings[:, p]) ** 2) / total
                for p in range(model.n_components)
            ]
        )
    return per, np.cumsum(per)


def fit_plsda(x, labels, n_components: int, class_names: Sequence[str] = (), scale: bool = False) -> PlsModel:
    """PLS regression of one-hot class codes on (optionally autoscaled) centered spectra."""
    x = as_matrix(x, "x")
    labels = np.asarray(labels, dtype=np.int64).ravel()
    k = max(int(labels.max()), len(class_names))
    y = one_hot(labels, k)
    x_mean = x.mean(axis=0)
    xc = x - x_mean
    x_scale = None
    if scale:
        std = xc.std(axis=0, ddof=1)
        x_scale = np.where(std > 0, std, 1.0)
        xc = xc / x_scale
    y_mean = y.mean(axis=0)
    model = fit_pls(xc, y - y_mean, n_components, x_mean=x_mean, y_mean=y_mean, x_scale=x_scale)
    return replace(model, class_names=tuple(class_names))


def predict_plsda(model: PlsModel, x_new) -> np.ndarray:
    """1-based class of the largest predicted code; ties go to the lowest index."""
    return np.argmax(predict_response(model, x_new), axis=1) + 1


def select_components(
    x,
    labels,
    p_range: Iterable[int] = DEFAULT_P_RANGE,
    scale: bool = False,
) -> tuple[int, list[tuple[int, float]]]:
    """Pick the component count whose training-set partition maximizes chi-squared.

    Returns the best count (smallest on ties) and the full ``(P, chi2)`` curve.
    """
    x = as_matrix(x, "x")
    labels = np.asarray(labels, dtype=np.int64).ravel()
    candidates = sorted(set(int(p) for p in p_range))
    if not candidates:
        raise InvalidConfig("empty component range")
    limit = min(x.shape[0] - 1, x.shape[1])
    if candidates[0] < 1 or candidates[-1] > limit:
        raise InvalidConfig(f"component range must lie within [1, {limit}]")
    k = int(labels.max())
    curve = []
    for p in candidates:
        model = fit_plsda(x, labels, p, scale=scale)
        cm = metrics.confusion(labels, predict_plsda(model, x), k)
        curve.append((p, metrics.chi_squared(cm)))
    best = max(curve, key=lambda item: (item[1], -item[0]))[0]
    return best, curve
