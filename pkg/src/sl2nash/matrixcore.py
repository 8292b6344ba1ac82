"""sl2(C) matrix algebra: invariants, Hermitian functional calculus, SU(2) structure.

Matrices are plain 2x2 complex numpy arrays.  Traceless matrices are identified
with coordinate triples (z1, z2, z3) in C^3; the real coordinates on R^6 are
(x1, x2, x3, y1, y2, y3) with z_j = x_j + i*y_j.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

IDENTITY2 = np.eye(2, dtype=complex)


def from_coords(z) -> np.ndarray:
    """Map a complex triple (z1, z2, z3) to the traceless matrix it labels."""
    z1, z2, z3 = z
    return np.array([[1j * z1, -z2 + 1j * z3],
                     [z2 + 1j * z3, -1j * z1]], dtype=complex)


def to_coords(a: np.ndarray) -> np.ndarray:
    """Inverse of :func:`from_coords`; exact on traceless input."""
    z1 = -1j * a[0, 0]
    z2 = 0.5 * (a[1, 0] - a[0, 1])
    z3 = -0.5j * (a[0, 1] + a[1, 0])
    return np.array([z1, z2, z3])


def from_real_coords(x: np.ndarray) -> np.ndarray:
    """Matrix for real coordinates (x1, x2, x3, y1, y2, y3)."""
    x = np.asarray(x, dtype=float)
    return from_coords(x[:3] + 1j * x[3:])


def to_real_coords(a: np.ndarray) -> np.ndarray:
    z = to_coords(a)
    return np.concatenate([z.real, z.imag])


def casimir(a: np.ndarray) -> complex:
    """det(A); equals z1^2 + z2^2 + z3^2 in coordinates."""
    return complex(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0])


def norm_sq(a: np.ndarray) -> float:
    """R^2 = tr(A A*)."""
    return float(np.sum(np.abs(a) ** 2))


def frob(a: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.abs(a) ** 2)))


def char_residuals(a: np.ndarray) -> tuple[float, float]:
    """Frobenius norms of A^2 + f*1 and (AA*)^2 - R^2 AA* + |f|^2*1.

    Both vanish identically; the returned values are floating-point noise of
    size O(eps * (1 + R^4)).
    """
    f = casimir(a)
    r2 = norm_sq(a)
    aah = a @ a.conj().T
    res1 = frob(a @ a + f * IDENTITY2)
    res2 = frob(aah @ aah - r2 * aah + abs(f) ** 2 * IDENTITY2)
    return res1, res2


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def hermitian_eig2(h: np.ndarray) -> tuple[float, float, np.ndarray]:
    """Eigenvalues (descending) and unitary eigenvector matrix of a 2x2 Hermitian."""
    tr = float(h[0, 0].real + h[1, 1].real)
    half_gap = np.hypot(0.5 * float(h[0, 0].real - h[1, 1].real), abs(h[0, 1]))
    lam_hi = 0.5 * tr + half_gap
    lam_lo = 0.5 * tr - half_gap
    if half_gap <= 1e-300:
        return lam_hi, lam_lo, IDENTITY2.copy()
    # eigenvector for lam_hi: pick the numerically larger column of (H - lam_lo)
    m = h - lam_lo * IDENTITY2
    c0 = m[:, 0]
    c1 = m[:, 1]
    v = c0 if np.linalg.norm(c0) >= np.linalg.norm(c1) else c1
    v = v / np.linalg.norm(v)
    w = np.array([-np.conj(v[1]), np.conj(v[0])])
    return lam_hi, lam_lo, np.column_stack([v, w])


def hermitian_sqrt(h: np.ndarray) -> np.ndarray:
    """Principal square root of a 2x2 Hermitian psd matrix, in closed form."""
    tr = float(h[0, 0].real + h[1, 1].real)
    lam_hi, lam_lo, _ = hermitian_eig2(h)
    if lam_lo < -1e-10 * max(tr, 1e-300):
        raise DomainError(f"matrix is not positive semi-definite: min eigenvalue {lam_lo}")
    det = max(lam_hi, 0.0) * max(lam_lo, 0.0)
    s = np.sqrt(det)
    denom = tr + 2.0 * s
    if denom <= 0.0:
        return np.zeros((2, 2), dtype=complex)
    hh = 0.5 * (h + h.conj().T)
    return (hh + s * IDENTITY2) / np.sqrt(denom)


def hermitian_apply(h: np.ndarray, func) -> np.ndarray:
    """Apply a scalar function to a 2x2 Hermitian matrix via its spectrum."""
    lam_hi, lam_lo, u = hermitian_eig2(h)
    return u @ np.diag([func(lam_hi), func(lam_lo)]).astype(complex) @ u.conj().T


def adjoint(u: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Ad_U(A) = U A U*."""
    return u @ a @ u.conj().T


def adjoint_real_matrix(u: np.ndarray) -> np.ndarray:
    """The 6x6 real matrix of Ad_U in the coordinates (x1..x3, y1..y3)."""
    cols = []
    for k in range(6):
        e = np.zeros(6)
        e[k] = 1.0
        cols.append(to_real_coords(adjoint(u, from_real_coords(e))))
    return np.stack(cols, axis=-1)


def su2_exp(v: np.ndarray) -> np.ndarray:
    """exp of the su(2) element i*(v . sigma) for a real 3-vector v."""
    v = np.asarray(v, dtype=float)
    theta = float(np.linalg.norm(v))
    if theta < 1e-14:
        return IDENTITY2.copy()
    n = v / theta
    sigma_n = n[0] * PAULI[0] + n[1] * PAULI[1] + n[2] * PAULI[2]
    return np.cos(theta) * IDENTITY2 + 1j * np.sin(theta) * sigma_n


def su2_algebra_element(v: np.ndarray) -> np.ndarray:
    """The anti-Hermitian traceless matrix i*(v . sigma)."""
    v = np.asarray(v, dtype=float)
    return 1j * (v[0] * PAULI[0] + v[1] * PAULI[1] + v[2] * PAULI[2])


def _sphere_quadrature(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Tensor-product quadrature on S^2 with weights summing to 1."""
    from numpy.polynomial.legendre import leggauss

    n_polar = max(order + 1, 2)
    n_azim = 2 * n_polar
    cos_t, w_t = leggauss(n_polar)
    phi = 2.0 * np.pi * (np.arange(n_azim) + 0.5) / n_azim
    pts, wts = [], []
    for c, wc in zip(cos_t, w_t):
        s = np.sqrt(max(1.0 - c * c, 0.0))
        for p in phi:
            pts.append([s * np.cos(p), s * np.sin(p), c])
            wts.append(wc / 2.0 / n_azim)
    return np.array(pts), np.array(wts)


def su2_ball_quadrature(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature for the Haar density pushed to exponential coordinates.

    Returns nodes v in R^3 (|v| <= pi; the matrix is i*(v.sigma), with
    eigenvalue angle theta = |v| and |X| = sqrt(2)*theta <= sqrt(2)*pi) and
    weights for the measure with density proportional to (sin theta / theta)^2
    against Lebesgue measure, i.e. sin^2(theta) d theta x uniform(S^2),
    normalized numerically to total mass 1.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    from numpy.polynomial.legendre import leggauss

    n_theta = 2 * order + 2
    xs, ws = leggauss(n_theta)
    theta = 0.5 * np.pi * (xs + 1.0)
    w_theta = 0.5 * np.pi * ws * np.sin(theta) ** 2 * (2.0 / np.pi)
    dirs, w_dirs = _sphere_quadrature(order)
    nodes, weights = [], []
    for t, wt in zip(theta, w_theta):
        for d, wd in zip(dirs, w_dirs):
            nodes.append(t * d)
            weights.append(wt * wd)
    nodes = np.array(nodes)
    weights = np.array(weights)
    weights /= weights.sum()
    return nodes, weights


def su2_haar(order: int, method: str = "tensor", n_mc: int = 4096,
             seed: int = 0) -> list[tuple[np.ndarray, float]]:
    """Quadrature nodes (U, weight) for the normalized Haar measure on SU(2).

    ``tensor``: deterministic tensor-product Gauss-Legendre rule in the angle
    coordinates of the exponential chart.  ``mc``: seeded Monte-Carlo fallback
    (uniform on S^3 via normalized Gaussians).
    """
    if method == "tensor":
        nodes, weights = su2_ball_quadrature(order)
        return [(su2_exp(v), float(w)) for v, w in zip(nodes, weights)]
    if method == "mc":
        rng = np.random.default_rng(seed)
        q = rng.normal(size=(n_mc, 4))
        q /= np.linalg.norm(q, axis=1, keepdims=True)
        out = []
        for a0, a1, a2, a3 in q:
            u = np.array([[a0 + 1j * a1, a2 + 1j * a3],
                          [-a2 + 1j * a3, a0 - 1j * a1]], dtype=complex)
            out.append((u, 1.0 / n_mc))
        return out
    raise ValueError(f"unknown method {method!r}")


def random_sl2(rng: np.random.Generator, scale: float = 1.0,
               n: int | None = None) -> np.ndarray:
    """Random traceless matrices with complex Gaussian coordinates."""
    size = (n, 3) if n is not None else (3,)
    z = scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2)
    if n is None:
        return from_coords(z)
    return np.stack([from_coords(zi) for zi in z])
