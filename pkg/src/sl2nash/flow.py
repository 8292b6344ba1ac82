"""The gradient-like matrix flow: closed form, RK4 oracle, and decay machinery."""

from __future__ import annotations

import numpy as np

from .errors import DomainError
from .matrixcore import (casimir, commutator, from_real_coords,
                         hermitian_eig2, norm_sq, to_real_coords)
from .numerics import central_diff, central_diff2, mixed_diff2


def theta(j: int, s: float) -> float:
    """theta_1(s) = tanh(sqrt(s))/sqrt(s), theta_2 = cosh(sqrt(s)), theta_3 = sinh(sqrt(s))/sqrt(s).

    Evaluated through even power series near s = 0, so the functions are smooth
    across the origin.
    """
    if s < 0:
        raise DomainError("argument must be nonnegative")
    if j == 1:
        if s < 1e-6:
            return 1.0 - s / 3.0 + 2.0 * s * s / 15.0
        x = np.sqrt(s)
        return float(np.tanh(x) / x)
    if j == 2:
        return float(np.cosh(np.sqrt(s)))
    if j == 3:
        if s < 1e-6:
            return 1.0 + s / 6.0 + s * s / 120.0
        x = np.sqrt(s)
        return float(np.sinh(x) / x)
    raise DomainError("j must be 1, 2 or 3")


def theta1_prime(s: float) -> float:
    """d/ds of theta_1(s)."""
    if s < 1e-6:
        return -1.0 / 3.0 + 4.0 * s / 15.0 - 17.0 * s * s / 105.0
    x = np.sqrt(s)
    sech2 = 1.0 / np.cosh(x) ** 2
    return float((x * sech2 - np.tanh(x)) / (2.0 * x ** 3))


def mu_eval(u: float, v: int, t: float, r: float) -> float:
    """The comparison polynomial sum_{j=0}^{min(2u, v)} t^(u - j/2) R^(v - j)."""
    two_u = round(2 * u)
    if abs(2 * u - two_u) > 1e-12 or two_u < 0 or v < 0:
        raise DomainError("u must be a nonnegative half-integer and v a nonnegative integer")
    p = min(two_u, v)
    total = 0.0
    for j in range(p + 1):
        e_t = u - 0.5 * j
        e_r = v - j
        term = 1.0
        if e_t != 0:
            term *= t ** e_t
        if e_r != 0:
            term *= r ** e_r
        total += term
    return total


def vector_field_w(a: np.ndarray) -> np.ndarray:
    """W_A = (1/4) [A, [A, A*]]."""
    return 0.25 * commutator(a, commutator(a, a.conj().T))


def _tanh_over(f: float, t: float) -> float:
    """tanh(f*t)/f, continued through f = 0 as t."""
    return t * theta(1, (f * t) ** 2)


def flow(a: np.ndarray, t: float) -> np.ndarray:
    """Closed-form flow of W at time t >= 0.

    Conjugation by g_t(A) = (1 + tanh(|f| t)/|f| * AA*)^(1/2), taken in the
    eigenbasis of AA*.  The f = 0 branch (1 + t AA*)^(1/2) is reached by
    continuity of tanh(u)/u.
    """
    if t < 0:
        raise DomainError("t must be nonnegative")
    if t == 0.0:
        return a.copy()
    f = abs(casimir(a))
    c = _tanh_over(f, t)
    aah = a @ a.conj().T
    lam_hi, _, u = hermitian_eig2(aah)
    lam_hi = max(lam_hi, 0.0)
    lam_lo = (f * f) / lam_hi if lam_hi > 0 else 0.0
    d_hi = np.sqrt(1.0 + c * lam_hi)
    d_lo = np.sqrt(1.0 + c * lam_lo)
    b = u.conj().T @ a @ u
    scale = np.array([[1.0, d_lo / d_hi], [d_hi / d_lo, 1.0]])
    return u @ (b * scale) @ u.conj().T


def flow_rk4(a: np.ndarray, t: float, steps: int) -> np.ndarray:
    """Classical RK4 integration of A' = (1/4)[A, [A, A*]]; the independent oracle."""
    if steps < 1:
        raise DomainError("steps must be >= 1")
    h = t / steps
    x = a.astype(complex)
    for _ in range(steps):
        k1 = vector_field_w(x)
        k2 = vector_field_w(x + 0.5 * h * k1)
        k3 = vector_field_w(x + 0.5 * h * k2)
        k4 = vector_field_w(x + h * k3)
        x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return x


def r_t_sq(a: np.ndarray, t: float) -> float:
    """Norm squared along the flow.

    Stable rewrite of 2|f| (2|f| tanh(2|f|t) + R^2) / (2|f| + R^2 tanh(2|f|t))
    through tanh(x)/x, with limit R^2/(1 + R^2 t) as f -> 0.
    """
    if t < 0:
        raise DomainError("t must be nonnegative")
    f2 = 2.0 * abs(casimir(a))
    r2 = norm_sq(a)
    c = _tanh_over(f2, t)
    return (f2 * f2 * c + r2) / (1.0 + r2 * c)


def epsilon_t(a: np.ndarray, t: float) -> float:
    """The commutator decay factor 1/(cosh(2|f|t) + sinh(2|f|t) R^2 / (2|f|))."""
    if t < 0:
        raise DomainError("t must be nonnegative")
    f2 = 2.0 * abs(casimir(a))
    r2 = norm_sq(a)
    x = f2 * t
    if x > 30.0:
        # asymptotic 2 e^{-x} / (1 + R^2/(2|f|)), relative error O(e^{-2x})
        return 2.0 * np.exp(-x) / (1.0 + r2 / f2)
    return 1.0 / (theta(2, x * x) + t * r2 * theta(3, x * x))


def k_t(a: np.ndarray, t: float) -> np.ndarray:
    """Commutator along the flow: K_t = epsilon_t * [A, A*]."""
    return epsilon_t(a, t) * commutator(a, a.conj().T)


def flow_real(x: np.ndarray, t: float) -> np.ndarray:
    """Flow in real coordinates on R^6 (plumbing for derivative probes)."""
    return to_real_coords(flow(from_real_coords(x), t))


def flow_derivative_bound_probe(multi_index: tuple[int, ...], samples: np.ndarray,
                                times: np.ndarray) -> float:
    """Sup over (sample, time) of |D^a A_t| / mu_{2n+1/2, 3n+2}(t, R), n = |a|.

    Derivatives of order |a| <= 2 in the base point, by 4th-order central
    differences with step 1e-4 * (1 + R).
    """
    a = tuple(multi_index)
    n = sum(a)
    if n > 2:
        raise DomainError("only derivative orders |a| <= 2 are supported")
    if len(samples) == 0:
        raise DomainError("sample set is empty")
    dirs = [i for i, m in enumerate(a) for _ in range(m)]
    worst = 0.0
    for x in samples:
        x = np.asarray(x, dtype=float)
        r = np.sqrt(float(np.dot(x, x)))
        h = 1e-4 * (1.0 + r)
        for t in times:
            fun = lambda y: flow_real(y, t)
            if n == 0:
                val = fun(x)
            elif n == 1:
                e = np.zeros(6)
                e[dirs[0]] = 1.0
                val = central_diff(fun, x, e, h)
            else:
                e1 = np.zeros(6)
                e1[dirs[0]] = 1.0
                if dirs[0] == dirs[1]:
                    val = central_diff2(fun, x, e1, h)
                else:
                    e2 = np.zeros(6)
                    e2[dirs[1]] = 1.0
                    val = mixed_diff2(fun, x, e1, e2, h)
            bound = mu_eval(2 * n + 0.5, 3 * n + 2, float(t), r)
            if bound == 0.0:
                continue  # the comparison polynomial vanishes (t = 0, n >= 2)
            worst = max(worst, float(np.linalg.norm(val)) / bound)
    return worst


def decay_time(a: np.ndarray, tail: float = 1e-8) -> float:
    """Time T with exp(-2|f|T) < tail; requires f != 0."""
    f = abs(casimir(a))
    if f == 0.0:
        raise DomainError("decay time is finite only for f != 0")
    return float(-np.log(tail) / (2.0 * f))
