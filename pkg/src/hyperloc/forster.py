"""Forster scaling: bring a set of directions into approximate isotropic position.

The iteration is the usual fixed-point scaling: take the unit images of the
current transform, compute their second-moment matrix M and left-multiply the
transform by (d M)^(-1/2). For sets in general position the smallest
eigenvalue of d M climbs to 1; when too much mass sits in a proper subspace it
stalls below 1 and we report a ConvergenceFailure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import NotPositiveDefinite, _as_points, inv_sqrt, isotropy_report, jacobi_eigh, min_eigenvalue, second_moment


class ConvergenceFailure(RuntimeError):
    def __init__(self, best_achieved_c: float, iterations: int):
        super().__init__(
            f"Forster iteration did not reach the target (best c={best_achieved_c:.6f} "
            f"after {iterations} sweeps)"
        )
        self.best_achieved_c = best_achieved_c
        self.iterations = iterations


class DimensionTooFew(ValueError):
    pass


@dataclass
class ForsterCertificate:
    transform: np.ndarray
    scales: np.ndarray  # 1 / |T h| for each input h (original, unnormalized h)
    achieved_c: float
    iterations: int

    def __post_init__(self):
        T = np.asarray(self.transform, dtype=float)
        scale = max(1.0, float(np.max(np.abs(T))))
        if abs(np.linalg.det(T)) <= 1e-12 * scale ** T.shape[0]:
            raise ValueError("transform is singular")
        if not np.all(np.isfinite(self.scales)) or np.any(self.scales <= 0):
            raise ValueError("scales must be finite and positive")


def _unit_images(T: np.ndarray, P: np.ndarray) -> np.ndarray:
    Y = P @ T.T
    return Y / np.linalg.norm(Y, axis=1)[:, None]


def forster_transform(H, target_c: float = 0.99, max_iters: int = 10_000,
                      stall_window: int | None = 200) -> ForsterCertificate:
    """Compute a transform T with {T h/|T h|} in ``target_c``-approximate isotropic position.

    ``stall_window``: give up early when the isotropy measure has not improved
    by more than 1e-12 over this many consecutive sweeps (None disables).
    """
    P = _as_points(H)
    m, d = P.shape
    if not 0.0 < target_c < 1.0:
        raise ValueError("target_c must lie in (0, 1)")
    norms = np.linalg.norm(P, axis=1)
    if np.any(norms == 0):
        raise ValueError("zero hyperplane")
    if m < d:
        raise DimensionTooFew(f"need at least d={d} vectors, got {m}")
    U0 = P / norms[:, None]

    T = np.eye(d)
    best = -np.inf
    last_gain = 0
    it = 0
    while True:
        U = _unit_images(T, U0)
        M = second_moment(U)
        eig = jacobi_eigh(M)
        c = d * float(eig[0][0])
        if c >= target_c:
            break
        if c > best + 1e-12:
            best, last_gain = c, it
        elif stall_window is not None and it - last_gain >= stall_window:
            raise ConvergenceFailure(max(best, 0.0), it)
        if it >= max_iters:
            raise ConvergenceFailure(max(best, 0.0), it)
        try:
            N = inv_sqrt(d * M, eig=(d * eig[0], eig[1]))
        except NotPositiveDefinite:
            raise ConvergenceFailure(max(best, 0.0), it) from None
        T = N @ T
        T /= abs(np.linalg.det(T)) ** (1.0 / d)
        it += 1

    # certificate values are recomputed from the final images, not carried over
    achieved = isotropy_report(_unit_images(T, U0)).c_level
    if achieved < target_c:
        raise ConvergenceFailure(achieved, it)
    scales = 1.0 / np.linalg.norm(P @ T.T, axis=1)
    return ForsterCertificate(transform=T, scales=scales, achieved_c=achieved, iterations=it)


def identity_certificate(H) -> ForsterCertificate:
    """Certificate for T = I; used as the fallback when Forster scaling fails."""
    P = _as_points(H)
    U = P / np.linalg.norm(P, axis=1)[:, None]
    d = P.shape[1]
    c = d * min_eigenvalue(second_moment(U)) if P.shape[0] else 0.0
    return ForsterCertificate(transform=np.eye(d), scales=1.0 / np.linalg.norm(P, axis=1),
                              achieved_c=float(c), iterations=0)


def apply_certificate(cert: ForsterCertificate, H, indices=None) -> np.ndarray:
    """Unit vectors T h / |T h| for the rows of H (or the rows named by ``indices``)."""
    P = _as_points(H)
    if indices is not None:
        indices = np.asarray(indices, dtype=int)
        if indices.shape[0] != P.shape[0]:
            raise ValueError("indices must align with the rows of H")
        if len(cert.scales) and (indices.min() < 0 or indices.max() >= len(cert.scales)):
            raise IndexError("index outside the certified set")
    elif P.shape[0] != len(cert.scales):
        raise ValueError(f"certificate covers {len(cert.scales)} vectors, got {P.shape[0]}")
    T = np.asarray(cert.transform, dtype=float)
    if T.shape != (P.shape[1], P.shape[1]):
        raise ValueError("dimension mismatch between certificate and H")
    return _unit_images(T, P)


def scaled_originals(cert: ForsterCertificate, H) -> np.ndarray:
    """The rescaled originals h / |T h|, paired with the certificate's scales.

    Plain comparisons between these are generalized comparisons on H.
    """
    P = _as_points(H)
    if P.shape[0] != len(cert.scales):
        raise ValueError(f"certificate covers {len(cert.scales)} vectors, got {P.shape[0]}")
    return P * np.asarray(cert.scales)[:, None]
