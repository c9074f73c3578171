"""Dense matrix primitives.

Everything here is a pure function of its inputs. Matrices are 2-D float64
numpy arrays; vectors are 1-D. Inputs are never modified.
"""

from __future__ import annotations

import warnings
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import NoConvergence, NonFiniteValue, NonSquare, NotSymmetric, ShapeMismatch, Singular

SYMMETRY_TOL = 1e-10
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
SOLVE_PIVOT_TOL = 1e-12
RANK_TOL = 1e-10


class EigenDecomposition(NamedTuple):
    """Eigenvalues sorted descending; column j of ``eigenvectors`` pairs with ``eigenvalues[j]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite, non-empty 2-D float64 array."""
    m = np.asarray(a, dtype=np.float64)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ShapeMismatch(f"{name} must be a non-empty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFiniteValue(f"{name} contains NaN or Inf")
    return m


def norm_inf(a: np.ndarray) -> float:
    """Maximum absolute row sum."""
    return float(np.max(np.sum(np.abs(a), axis=1)))


def transpose(a) -> np.ndarray:
    return np.ascontiguousarray(as_matrix(a).T)


def matmul(a, b) -> np.ndarray:
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise ShapeMismatch(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def trace(a) -> float:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ShapeMismatch(f"trace needs a square matrix, got {a.shape}")
    return float(np.trace(a))


def column_means(a) -> np.ndarray:
    return as_matrix(a).mean(axis=0)


def _check_symmetric(a) -> np.ndarray:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise NonSquare(f"expected a square matrix, got {a.shape}")
    asym = float(np.max(np.abs(a - a.T)))
    if asym >= SYMMETRY_TOL * max(1.0, norm_inf(a)):
        raise NotSymmetric(f"max |a_ij - a_ji| = {asym:.3e}")
    return a


def fix_signs(vectors: np.ndarray) -> np.ndarray:
    # largest-magnitude component of each column made positive
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def _jacobi(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = a.copy()
    n = a.shape[0]
    v = np.eye(n)
    threshold = JACOBI_TOL * np.linalg.norm(a)
    upper = np.triu_indices(n, 1)
    for _ in range(JACOBI_MAX_SWEEPS):
        if n == 1 or np.max(np.abs(a[upper])) <= threshold:
            return np.diag(a).copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= threshold:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.copysign(1.0, theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
                vec_p = v[:, p].copy()
                vec_q = v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q
    if np.max(np.abs(a[upper])) <= threshold:
        return np.diag(a).copy(), v
    raise NoConvergence(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")


def sym_eigen(a, method: str = "lapack") -> EigenDecomposition:
    """Eigendecomposition of a real symmetric matrix.

    Parameters
    ----------
    a : array_like
        Square symmetric matrix.
    method : {"lapack", "jacobi"}
        ``"lapack"`` calls the divide-and-conquer driver via numpy and is the
        default for the J x J problems in this package. ``"jacobi"`` runs
        cyclic Jacobi sweeps in pure numpy; it is slow but self-contained.

    Returns
    -------
    EigenDecomposition
        Eigenvalues in non-increasing order, orthonormal eigenvectors with the
        largest-magnitude entry of each column positive.
    """
    a = _check_symmetric(a)
    sym = 0.5 * (a + a.T)
    if method == "lapack":
        values, vectors = np.linalg.eigh(sym)
    elif method == "jacobi":
        values, vectors = _jacobi(sym)
    else:
        raise ValueError(f"unknown eigen method {method!r}")
    order = np.argsort(-values, kind="stable")
    return EigenDecomposition(values[order], fix_signs(vectors[:, order]))


def rank_from_eigenvalues(eigenvalues: np.ndarray, tol: float = RANK_TOL) -> int:
    lam_max = float(np.max(eigenvalues)) if eigenvalues.size else 0.0
    if lam_max <= 0.0:
        return 0
    return int(np.sum(eigenvalues > tol * lam_max))


def rank(a) -> int:
    """Numerical rank of a symmetric matrix: eigenvalues above 1e-10 * lambda_max."""
    return rank_from_eigenvalues(sym_eigen(a).eigenvalues)


def solve(a, b) -> np.ndarray:
    """Solve ``a @ x = b`` by LU with partial pivoting.

    Raises :class:`Singular` when a pivot falls below 1e-12 relative to the
    largest entry of ``a``. A 1-D ``b`` yields a 1-D result.
    """
    vector_rhs = np.ndim(b) == 1
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[0] != a.shape[1]:
        raise NonSquare(f"expected a square matrix, got {a.shape}")
    if b.shape[0] != a.shape[0]:
        raise ShapeMismatch(f"b has {b.shape[0]} rows, a has {a.shape[0]}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    scale = float(np.max(np.abs(a)))
    if scale == 0.0 or np.min(np.abs(np.diag(lu))) < SOLVE_PIVOT_TOL * scale:
        raise Singular("pivot below relative tolerance")
    x = scipy.linalg.lu_solve((lu, piv), b, check_finite=False)
    return x.ravel() if vector_rhs else x


def solve_upper_triangular(u, b) -> np.ndarray:
    """Back-substitution for upper-triangular ``u``."""
    vector_rhs = np.ndim(b) == 1
    u = as_matrix(u, "u")
    b = as_matrix(b, "b")
    if u.shape[0] != u.shape[1] or b.shape[0] != u.shape[0]:
        raise ShapeMismatch(f"incompatible shapes {u.shape} and {b.shape}")
    diag = np.abs(np.diag(u))
    if np.min(diag) < SOLVE_PIVOT_TOL * max(float(np.max(np.abs(u))), np.finfo(float).tiny):
        raise Singular("zero on the diagonal of a triangular system")
    x = scipy.linalg.solve_triangular(u, b, lower=False, check_finite=False)
    return x.ravel() if vector_rhs else x
