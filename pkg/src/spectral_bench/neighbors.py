"""Brute-force K-nearest-neighbor classification with majority voting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyTrainingSet, InvalidHyperparameter, ShapeMismatch
from .numkernel import as_matrix

_CHUNK_ELEMENTS = 4_000_000


@dataclass(frozen=True)
class KnnModel:
    train_x: np.ndarray
    train_labels: np.ndarray
    k: int = 3
    class_names: tuple[str, ...] = ()

    @property
    def n_features(self) -> int:
        return self.train_x.shape[1]


def fit_knn(x, labels, k: int = 3, class_names=()) -> KnnModel:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise EmptyTrainingSet("KNN needs at least one training row")
    x = as_matrix(x, "train_x")
    labels = np.asarray(labels, dtype=np.int64).ravel()
    if labels.size != x.shape[0]:
        raise ShapeMismatch(f"{labels.size} labels for {x.shape[0]} rows")
    if not 1 <= k <= x.shape[0]:
        raise InvalidHyperparameter(f"k must lie in [1, {x.shape[0]}], got {k}")
    return KnnModel(x.copy(), labels.copy(), int(k), tuple(class_names))


def squared_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact squared Euclidean distances, rows of ``a`` against rows of ``b``."""
    out = np.empty((a.shape[0], b.shape[0]))
    step = max(1, _CHUNK_ELEMENTS // max(1, b.size))
    for start in range(0, a.shape[0], step):
        diff = a[start : start + step, None, :] - b[None, :, :]
        out[start : start + step] = np.einsum("ijk,ijk->ij", diff, diff)
    return out


def _vote(labels: np.ndarray, dists: np.ndarray) -> int:
    classes, counts = np.unique(labels, return_counts=True)
    tied = classes[counts == counts.max()]
    if tied.size == 1:
        return int(tied[0])
    # tied vote: class with the closest member wins, then the lowest index
    closest = np.array([dists[labels == c].min() for c in tied])
    return int(tied[closest == closest.min()].min())


def knn_predict(model: KnnModel, x_new) -> np.ndarray:
    """Majority label among the ``k`` nearest training rows.

    Equal distances are ordered by training-row index.
    """
    x_new = as_matrix(x_new, "x_new")
    if x_new.shape[1] != model.n_features:
        raise ShapeMismatch(f"model expects {model.n_features} columns, got {x_new.shape[1]}")
    d2 = squared_distances(x_new, model.train_x)
    order = np.argsort(d2, axis=1, kind="stable")[:, : model.k]
    out = np.empty(x_new.shape[0], dtype=np.int64)
    for i, nearest in enumerate(order):
        out[i] = _vote(model.train_labels[nearest], d2[i, nearest])
    return out
