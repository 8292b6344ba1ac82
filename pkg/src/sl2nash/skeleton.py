"""The skeleton of normal matrices, its retraction, and the two-sphere desingularization."""

from __future__ import annotations

import numpy as np

from .errors import DomainError
from .matrixcore import (IDENTITY2, casimir, commutator, frob, from_coords,
                         hermitian_eig2, norm_sq)


def is_skeleton(a: np.ndarray, tol: float) -> bool:
    """True iff ||[A, A*]|| <= tol * (1 + R^2)."""
    if tol <= 0:
        raise DomainError("tol must be positive")
    return frob(commutator(a, a.conj().T)) <= tol * (1.0 + norm_sq(a))


def membership_residuals(a: np.ndarray) -> dict[str, float]:
    """Scaled residuals of the equivalent normality criteria, for cross-checks."""
    f = casimir(a)
    r2 = norm_sq(a)
    scale2 = 1.0 + r2
    aah = a @ a.conj().T
    return {
        "commutator": frob(commutator(a, a.conj().T)) / scale2,
        "norm_vs_fiber": abs(r2 - 2.0 * abs(f)) / scale2,
        "aah_vs_fiber": frob(aah - abs(f) * IDENTITY2) / scale2,
    }


def retract(a: np.ndarray) -> np.ndarray:
    """Continuous projection onto the skeleton.

    For f(A) != 0 this conjugates by (1 + AA*/|f|)^(1/2); the square root and
    inverse are taken in the eigenbasis of AA*, where 1 + lambda/|f| stays
    well-conditioned even when AA*/|f| has huge entries near the cone.
    """
    f = abs(casimir(a))
    if f == 0.0:
        return np.zeros((2, 2), dtype=complex)
    aah = a @ a.conj().T
    lam_hi, _, u = hermitian_eig2(aah)
    # det(AA*) = |f|^2, so the small eigenvalue is recovered without cancellation
    lam_lo = (f * f) / lam_hi
    d_hi = np.sqrt(1.0 + lam_hi / f)
    d_lo = np.sqrt(1.0 + lam_lo / f)
    b = u.conj().T @ a @ u
    scale = np.array([[1.0, d_lo / d_hi], [d_hi / d_lo, 1.0]])
    return u @ (b * scale) @ u.conj().T


def rho(w: np.ndarray, lam: complex) -> np.ndarray:
    """Desingularization (w, lambda) -> traceless matrix with coordinates lambda*w."""
    w = np.asarray(w, dtype=float)
    if abs(np.linalg.norm(w) - 1.0) > 1e-9:
        raise DomainError("w must be a unit vector in R^3")
    return from_coords(lam * w)


def rho_tangent(w: np.ndarray, lam: complex, u_sphere: np.ndarray,
                dlam: complex) -> np.ndarray:
    """Differential of rho applied to (u_sphere, dlam), in real coordinates R^6.

    ``u_sphere`` must be tangent to S^2 at w (or zero); ``dlam`` is a complex
    increment of lambda.
    """
    w = np.asarray(w, dtype=float)
    u = np.asarray(u_sphere, dtype=float)
    dz = lam * u + dlam * w
    return np.concatenate([dz.real, dz.imag])


def hopf(u: np.ndarray) -> np.ndarray:
    """Hopf-fibration image of U = [[a, b], [-conj(b), conj(a)]] in S^2."""
    a, b = u[0, 0], u[0, 1]
    return np.array([abs(a) ** 2 - abs(b) ** 2,
                     (-2 * a * b).imag,
                     (-2 * a * b).real])
