"""Scatter matrices and the LDA family: Fisher LDA, direct LDA, shrunken LDA, maximum-uncertainty LDA.

All four variants project centered spectra onto at most K-1 discriminant
directions and allocate a sample to the nearest projected class centroid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from . import numkernel
from .errors import (
    ClassTooSmall,
    GammaOutOfRange,
    MTooLarge,
    ShapeMismatch,
    SingularWithinScatter,
    ZeroEigenvalue,
)
from .numkernel import EigenDecomposition, as_matrix

SINGULAR_TOL = 1e-10
ZERO_EIGEN_TOL = 1e-12
TIE_TOL = 1e-12
DEFAULT_GAMMA_GRID = tuple(round(0.05 * i, 2) for i in range(21))
VARIANTS = ("LDA", "DLDA", "SLDA", "MLDA")


@dataclass(frozen=True)
class ScatterSet:
    s_b: np.ndarray
    s_w: np.ndarray
    s_p: np.ndarray
    class_means: np.ndarray
    overall_mean: np.ndarray
    class_counts: np.ndarray
    between_factor: np.ndarray = field(repr=False)

    @property
    def n_samples(self) -> int:
        return int(self.class_counts.sum())

    @property
    def n_classes(self) -> int:
        return int(self.class_counts.size)

    @property
    def n_features(self) -> int:
        return self.s_p.shape[0]

    @cached_property
    def pooled_eigen(self) -> EigenDecomposition:
        return numkernel.sym_eigen(self.s_p)

    @property
    def mean_eigenvalue(self) -> float:
        return float(np.trace(self.s_p)) / self.n_features


@dataclass(frozen=True)
class DiscriminantModel:
    """``projection`` is d x J; rows are discriminant directions."""

    variant: str
    projection: np.ndarray
    projected_centroids: np.ndarray
    x_mean: np.ndarray
    gamma: float | None = None
    m: int | None = None
    class_names: tuple[str, ...] = ()
    whitening: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def n_features(self) -> int:
        return self.x_mean.size

    @property
    def n_classes(self) -> int:
        return self.projected_centroids.shape[0]


def scatter(x, labels) -> ScatterSet:
    """Between-class, within-class and pooled scatter of spectra ``x`` with 1-based ``labels``."""
    x = as_matrix(x, "x")
    labels = np.asarray(labels, dtype=np.int64).ravel()
    if labels.size != x.shape[0]:
        raise ShapeMismatch(f"{labels.size} labels for {x.shape[0]} rows")
    k = int(labels.max())
    counts = np.bincount(labels, minlength=k + 1)[1:]
    if np.any(counts < 2):
        raise ClassTooSmall(f"every class needs at least 2 samples, counts are {counts.tolist()}")
    n, j = x.shape
    overall = x.mean(axis=0)
    means = np.vstack([x[labels == c].mean(axis=0) for c in range(1, k + 1)])
    within = x - means[labels - 1]
    between = np.sqrt(counts)[:, None] * (means - overall)
    s_w = within.T @ within
    s_w = 0.5 * (s_w + s_w.T)
    s_b = between.T @ between
    s_b = 0.5 * (s_b + s_b.T)
    return ScatterSet(
        s_b=s_b,
        s_w=s_w,
        s_p=s_w / (n - k),
        class_means=means,
        overall_mean=overall,
        class_counts=counts,
        between_factor=between,
    )


def shrunken_covariance(s_p, gamma: float) -> np.ndarray:
    """Convex blend ``(1 - gamma) S_p + gamma * mean_eigenvalue * I``."""
    if not 0.0 <= gamma <= 1.0:
        raise GammaOutOfRange(f"gamma must lie in [0, 1], got {gamma}")
    s_p = as_matrix(s_p)
    lam_bar = float(np.trace(s_p)) / s_p.shape[0]
    return (1.0 - gamma) * s_p + gamma * lam_bar * np.eye(s_p.shape[0])


def floored_eigenvalues(eigenvalues: np.ndarray, lam_bar: float) -> np.ndarray:
    return np.maximum(eigenvalues, lam_bar)


def mlda_covariance(s_p) -> np.ndarray:
    """Pooled covariance rebuilt with every eigenvalue floored at the mean eigenvalue."""
    s_p = as_matrix(s_p)
    values, vectors = numkernel.sym_eigen(s_p)
    lam_bar = float(np.trace(s_p)) / s_p.shape[0]
    rebuilt = (vectors * floored_eigenvalues(values, lam_bar)) @ vectors.T
    return 0.5 * (rebuilt + rebuilt.T)


def _fisher_projection(within_values, within_vectors, between_factor, max_dims) -> np.ndarray:
    # symmetric reduction: with S_w = Phi diag(lam) Phi', whiten by Phi diag(lam^-1/2),
    # then take the leading eigenvectors of the whitened S_b through its K x K Gram matrix
    lam_max = float(within_values[0])
    if lam_max <= 0.0 or float(within_values[-1]) <= SINGULAR_TOL * lam_max:
        raise SingularWithinScatter(
            "within-class scatter is singular (more variables than samples?); use DLDA, SLDA or MLDA"
        )
    whiten = within_vectors / np.sqrt(within_values)
    factor = whiten.T @ between_factor.T  # J x K, whitened S_b = factor @ factor.T
    gram = numkernel.sym_eigen(factor.T @ factor)
    d = min(max_dims, numkernel.rank_from_eigenvalues(gram.eigenvalues))
    if d == 0:
        return np.zeros((0, within_vectors.shape[0]))
    u = factor @ gram.eigenvectors[:, :d] / np.sqrt(gram.eigenvalues[:d])
    directions = numkernel.fix_signs(whiten @ u)
    return np.ascontiguousarray(directions.T)


def _build(variant, projection, sc: ScatterSet, class_names, **extra) -> DiscriminantModel:
    centroids = (sc.class_means - sc.overall_mean) @ projection.T
    return DiscriminantModel(
        variant=variant,
        projection=projection,
        projected_centroids=centroids,
        x_mean=sc.overall_mean.copy(),
        class_names=tuple(class_names),
        **extra,
    )


def fit_lda(sc: ScatterSet, class_names: Sequence[str] = ()) -> DiscriminantModel:
    """Fisher LDA: leading K-1 eigenvectors of ``S_w^-1 S_b``.

    Raises :class:`SingularWithinScatter` when the smallest eigenvalue of
    ``S_w`` is at most 1e-10 times the largest, which is always the case
    for n <= J.
    """
    values, vectors = sc.pooled_eigen
    scale = sc.n_samples - sc.n_classes
    projection = _fisher_projection(scale * values, vectors, sc.between_factor, sc.n_classes - 1)
    return _build("LDA", projection, sc, class_names)


def fit_slda(sc: ScatterSet, gamma: float, class_names: Sequence[str] = ()) -> DiscriminantModel:
    """Fisher directions with ``S_w`` replaced by ``(n - K) * shrunken_covariance(S_p, gamma)``.

    The shrunken matrix shares the eigenvectors of ``S_p``; its eigenvalues
    are ``(1 - gamma) * lam + gamma * mean(lam)``.
    """
    if not 0.0 <= gamma <= 1.0:
        raise GammaOutOfRange(f"gamma must lie in [0, 1], got {gamma}")
    values, vectors = sc.pooled_eigen
    shrunk = (1.0 - gamma) * values + gamma * sc.mean_eigenvalue
    order = np.argsort(-shrunk, kind="stable")
    scale = sc.n_samples - sc.n_classes
    projection = _fisher_projection(scale * shrunk[order], vectors[:, order], sc.between_factor, sc.n_classes - 1)
    return _build("SLDA", projection, sc, class_names, gamma=float(gamma))


def fit_mlda(sc: ScatterSet, class_names: Sequence[str] = ()) -> DiscriminantModel:
    """Fisher directions with ``S_w`` replaced by ``(n - K) * mlda_covariance(S_p)``."""
    values, vectors = sc.pooled_eigen
    floored = floored_eigenvalues(values, sc.mean_eigenvalue)
    scale = sc.n_samples - sc.n_classes
    projection = _fisher_projection(scale * floored, vectors, sc.between_factor, sc.n_classes - 1)
    return _build("MLDA", projection, sc, class_names)


def fit_dlda(sc: ScatterSet, m: int | None = None, class_names: Sequence[str] = ()) -> DiscriminantModel:
    """Direct LDA: diagonalize ``S_b`` first, whiten it, then diagonalize the reduced ``S_w``.

    ``m`` defaults to the numerical rank of ``S_b`` (at most K-1). The
    whitening matrix ``Z`` (J x m, ``Z' S_b Z = I``) is kept on the model.
    """
    b_values, v = numkernel.sym_eigen(sc.s_b)
    r = numkernel.rank_from_eigenvalues(b_values)
    if m is None:
        m = r
    if m > r:
        raise MTooLarge(f"m={m} exceeds rank(S_b)={r}")
    if m < 1:
        raise ZeroEigenvalue("between-class scatter is zero; nothing to diagonalize")
    y = v[:, :m]
    d_b = np.diag(y.T @ sc.s_b @ y)
    if np.min(d_b) <= ZERO_EIGEN_TOL * max(float(b_values[0]), np.finfo(float).tiny):
        raise ZeroEigenvalue("a retained eigenvalue of S_b is zero; use a smaller m")
    z = y / np.sqrt(d_b)
    reduced = z.T @ sc.s_w @ z
    u_values, u = numkernel.sym_eigen(0.5 * (reduced + reduced.T))
    if np.min(u_values) <= ZERO_EIGEN_TOL * max(float(np.max(np.abs(u_values))), np.finfo(float).tiny):
        raise ZeroEigenvalue("reduced within-class scatter has a zero eigenvalue")
    projection = (u / np.sqrt(u_values)).T @ z.T
    return _build("DLDA", np.ascontiguousarray(projection), sc, class_names, m=int(m), whitening=z)


def project(model: DiscriminantModel, x_new) -> np.ndarray:
    x_new = as_matrix(x_new, "x_new")
    if x_new.shape[1] != model.n_features:
        raise ShapeMismatch(f"model expects {model.n_features} columns, got {x_new.shape[1]}")
    return (x_new - model.x_mean) @ model.projection.T


def nearest_centroid(projected: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    d2 = np.sum((projected[:, None, :] - centroids[None, :, :]) ** 2, axis=2)
    best = d2.min(axis=1, keepdims=True)
    # distances equal up to rounding count as a tie, resolved to the lowest class
    tied = d2 <= best * (1.0 + TIE_TOL) + np.finfo(float).tiny
    return np.argmax(tied, axis=1) + 1


def classify(model: DiscriminantModel, x_new) -> np.ndarray:
    """1-based class of the nearest projected centroid (Euclidean, no priors)."""
    return nearest_centroid(project(model, x_new), model.projected_centroids)


def select_gamma(x, labels, grid: Sequence[float] = DEFAULT_GAMMA_GRID) -> tuple[float, list[float]]:
    """Leave-one-out accuracy of SLDA over ``grid``; returns the best gamma (smallest on ties).

    Every held-out row gets a full scatter refit on the remaining rows. A
    gamma whose fit fails scores that row as misclassified.
    """
    x = as_matrix(x, "x")
    labels = np.asarray(labels, dtype=np.int64).ravel()
    grid = [float(g) for g in grid]
    if not grid:
        raise GammaOutOfRange("empty gamma grid")
    for g in grid:
        if not 0.0 <= g <= 1.0:
            raise GammaOutOfRange(f"gamma must lie in [0, 1], got {g}")
    hits = np.zeros(len(grid))
    n = x.shape[0]
    for i in range(n):
        keep = np.arange(n) != i
        sc = scatter(x[keep], labels[keep])
        for gi, g in enumerate(grid):
            try:
                model = fit_slda(sc, g)
            except SingularWithinScatter:
                continue
            hits[gi] += int(classify(model, x[i : i + 1])[0] == labels[i])
    accuracy = (hits / n).tolist()
    best = max(range(len(grid)), key=lambda gi: (accuracy[gi], -grid[gi]))
    return grid[best], accuracy
