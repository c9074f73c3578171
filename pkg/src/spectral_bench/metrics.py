"""Partition comparison: confusion matrix, misclassification rate, ARI and Pearson chi-squared."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LengthMismatch, NonSquare, Undefined


@dataclass(frozen=True)
class ConfusionMatrix:
    """Rows are real classes, columns predicted classes, both indexed 1..K in order."""

    counts: np.ndarray

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def row_sums(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def col_sums(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    def to_list(self) -> list[list[int]]:
        return self.counts.astype(int).tolist()


@dataclass(frozen=True)
class EvaluationReport:
    confusion: ConfusionMatrix
    mis: float
    ari: float
    chi2: float


def _labels(v) -> np.ndarray:
    return np.asarray(v, dtype=np.int64).ravel()


def confusion(real, predicted, n_classes: int | None = None) -> ConfusionMatrix:
    """Cross-tabulate 1-based class labels into a square K x K table."""
    real = _labels(real)
    predicted = _labels(predicted)
    if real.shape != predicted.shape or real.size < 1:
        raise LengthMismatch(f"{real.size} real vs {predicted.size} predicted labels")
    k = int(max(real.max(), predicted.max(), n_classes or 0))
    counts = np.zeros((k, k), dtype=np.int64)
    np.add.at(counts, (real - 1, predicted - 1), 1)
    return ConfusionMatrix(counts)


def mis_rate(cm: ConfusionMatrix) -> float:
    """Share of off-diagonal mass, ``1 - trace / n``."""
    c = cm.counts
    if c.shape[0] != c.shape[1]:
        raise NonSquare(f"confusion matrix is {c.shape}")
    return 1.0 - float(np.trace(c)) / float(c.sum())


def _pairs(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return x * (x - 1.0) / 2.0


def _is_same_partition(table: np.ndarray) -> bool:
    nz = table > 0
    return bool(np.all(nz.sum(axis=0) <= 1) and np.all(nz.sum(axis=1) <= 1))


def ari_from_table(table: np.ndarray) -> float:
    table = np.asarray(table)
    n = table.sum()
    sum_cells = _pairs(table).sum()
    sum_rows = _pairs(table.sum(axis=1)).sum()
    sum_cols = _pairs(table.sum(axis=0)).sum()
    expected = sum_rows * sum_cols / _pairs(n)
    denom = 0.5 * (sum_rows + sum_cols) - expected
    if denom == 0.0:
        if _is_same_partition(table):
            return 1.0
        raise Undefined("adjusted Rand index has a zero denominator")
    return float((sum_cells - expected) / denom)


def adjusted_rand(real, predicted) -> float:
    """Hubert-Arabie adjusted Rand index between two labelings."""
    real = _labels(real)
    predicted = _labels(predicted)
    if real.shape != predicted.shape:
        raise LengthMismatch(f"{real.size} real vs {predicted.size} predicted labels")
    if real.size < 2:
        raise LengthMismatch("ARI needs at least two observations")
    _, r = np.unique(real, return_inverse=True)
    _, c = np.unique(predicted, return_inverse=True)
    table = np.zeros((r.max() + 1, c.max() + 1), dtype=np.int64)
    np.add.at(table, (r, c), 1)
    return ari_from_table(table)


def chi_squared(cm: ConfusionMatrix) -> float:
    """Pearson statistic of the contingency table.

    Rows and columns with zero margin are dropped. A table left with a
    single row or column carries no association and scores 0.
    """
    c = cm.counts.astype(np.float64)
    c = c[c.sum(axis=1) > 0][:, c.sum(axis=0) > 0]
    if c.shape[0] < 2 or c.shape[1] < 2:
        return 0.0
    n = c.sum()
    # n * (sum n_rc^2 / (n_r n_c) - 1) equals the usual sum over (O - E)^2 / E
    # but stays exact on diagonal tables
    ratio = c**2 / np.outer(c.sum(axis=1), c.sum(axis=0))
    return float(n * (ratio.sum() - 1.0))


def evaluate(real, predicted, n_classes: int | None = None) -> EvaluationReport:
    cm = confusion(real, predicted, n_classes)
    return EvaluationReport(cm, mis_rate(cm), adjusted_rand(real, predicted), chi_squared(cm))
