"""Small dense symmetric linear algebra.

Everything here works on d x d matrices with d in the tens at most. The
eigensolver is a cyclic Jacobi iteration so results do not depend on which
LAPACK build numpy happens to link against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Tolerances:
    pd: float = 1e-12  # smallest eigenvalue accepted as positive definite
    eig: float = 1e-9  # eigenvalue accuracy target, relative to max(1, |M|)
    recon: float = 1e-8  # |N M N - I|_F for inverse square roots
    unit: float = 1e-9  # accepted deviation of a unit vector's norm from 1
    offdiag: float = 1e-12  # Jacobi stops when off-diagonal mass drops below this
    symmetry: float = 1e-12


TOL = Tolerances()


class NotPositiveDefinite(ValueError):
    def __init__(self, lambda_min: float):
        super().__init__(f"matrix is not positive definite (lambda_min={lambda_min:.3e})")
        self.lambda_min = lambda_min


def _as_points(points) -> np.ndarray:
    if len(points) == 0:
        raise ValueError("need at least one point")
    rows = [np.asarray(p, dtype=float).ravel() for p in points]
    d = rows[0].shape[0]
    if d == 0:
        raise ValueError("points must have dimension >= 1")
    for r in rows:
        if r.shape[0] != d:
            raise ValueError(f"dimension mismatch: expected {d}, got {r.shape[0]}")
    P = np.vstack(rows)
    if not np.all(np.isfinite(P)):
        raise ValueError("non-finite coordinate")
    return P


def check_symmetric(M, tol: float = TOL.symmetry) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    bound = tol * np.maximum(1.0, np.abs(M))
    if np.any(np.abs(M - M.T) > bound):
        raise ValueError("matrix is not symmetric")
    return M


def second_moment(points) -> np.ndarray:
    """Return (1/m) * sum_i h_i h_i^T for the given points."""
    P = _as_points(points)
    M = P.T @ P / P.shape[0]
    return 0.5 * (M + M.T)


def jacobi_eigh(M, tol: float = TOL.offdiag, max_sweeps: int = 100):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns ``(w, V)`` with eigenvalues in ascending order and the matching
    eigenvectors as columns of ``V``.
    """
    A = check_symmetric(M).copy()
    d = A.shape[0]
    V = np.eye(d)
    scale = max(1.0, float(np.linalg.norm(A)))
    for _ in range(max_sweeps):
        # direct norm: subtracting the diagonal from the total cancels catastrophically
        off = float(np.linalg.norm(A - np.diag(np.diag(A))))
        if off < tol * scale:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                diff = A[q, q] - A[p, p]
                if abs(apq) < 1e-150 * abs(diff):
                    t = apq / diff  # theta would overflow; small-angle limit
                else:
                    theta = diff / (2.0 * apq)
                    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    if theta < 0:
                        t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                colp = A[:, p].copy()
                colq = A[:, q].copy()
                A[:, p] = c * colp - s * colq
                A[:, q] = s * colp + c * colq
                rowp = A[p, :].copy()
                rowq = A[q, :].copy()
                A[p, :] = c * rowp - s * rowq
                A[q, :] = s * rowp + c * rowq
                A[p, q] = A[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    w = np.diag(A).copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def min_eigenvalue(M) -> float:
    w, _ = jacobi_eigh(M)
    return float(w[0])


def inv_sqrt(M, eps_pd: float = TOL.pd, eig=None) -> np.ndarray:
    """Symmetric N with N M N = I, for symmetric positive definite M.

    ``eig`` may pass a precomputed ``jacobi_eigh(M)``.
    """
    w, V = eig if eig is not None else jacobi_eigh(M)
    if w[0] <= eps_pd:
        raise NotPositiveDefinite(float(w[0]))
    N = (V / np.sqrt(w)) @ V.T
    return 0.5 * (N + N.T)


@dataclass(frozen=True)
class IsotropyReport:
    lambda_min: float
    measure: float
    c_level: float


def check_unit(points, tol: float = TOL.unit) -> np.ndarray:
    P = _as_points(points)
    norms = np.linalg.norm(P, axis=1)
    bad = np.flatnonzero(np.abs(norms - 1.0) > tol)
    if bad.size:
        raise ValueError(f"point {int(bad[0])} is not a unit vector (norm {norms[bad[0]]!r})")
    return P


def isotropy_report(points) -> IsotropyReport:
    """Isotropy measure d * lambda_min of the second-moment matrix.

    A set of unit vectors is in c-approximate isotropic position exactly when
    ``c_level >= c``.
    """
    P = check_unit(points)
    lam = min_eigenvalue(second_moment(P))
    measure = P.shape[1] * lam
    # rounding can push a singular measure slightly below zero
    return IsotropyReport(lambda_min=lam, measure=measure, c_level=max(measure, 0.0))


def normalize_rows(points) -> np.ndarray:
    P = _as_points(points)
    norms = np.linalg.norm(P, axis=1)
    if np.any(norms == 0):
        raise ValueError("zero vector cannot be normalized")
    return P / norms[:, None]
