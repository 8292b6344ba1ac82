"""Fast-convergence iteration machinery: constants, schedules, the exact
integer inequality ledger, the Maurer-Cartan residual, flows of flat vector
fields, and a single-step driver with pluggable homotopy and smoothing
providers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import DomainError, FlowEscapeError, ProviderError
from .foliation import pi_field, poisson_diff, schouten
from .numerics import halton_ball, jacobian_fd
from .tensors import (CONTRAVARIANT, FieldHandle, PointTensor,
                      pushforward_multivector_linear)


@dataclass(frozen=True)
class SlbTriple:
    """Loss-of-regularity triple (a, b, c) of a semi-local bounded operator."""

    a: int
    b: int
    c: int

    def __post_init__(self):
        if min(self.a, self.b, self.c) < 0:
            raise DomainError("triple entries must be nonnegative")


@dataclass(frozen=True)
class ScheduleParams:
    """Iteration constants derived from an SLB triple, plus radii and t0."""

    p: int
    x_a: int
    y_a: int
    x_b: int
    y_b: int
    x_c: int
    y_c: int
    alpha: int
    r: float = 1.0
    big_r: float = 2.0
    t0: float = 2.0

    def __post_init__(self):
        if not (0 < self.r < self.big_r):
            raise DomainError("radii must satisfy 0 < r < R")
        if self.t0 <= 1.0:
            raise DomainError("t0 must exceed 1")


def derive_constants(slb: SlbTriple, r: float = 1.0, big_r: float = 2.0,
                     t0: float = 2.0) -> ScheduleParams:
    """p = max(a+c+1, b+1, 22) and the standard multiples of p and p^2."""
    p = max(slb.a + slb.c + 1, slb.b + 1, 22)
    return ScheduleParams(p=p, x_a=p, y_a=p * p, x_b=13 * p, y_b=13 * p * p,
                          x_c=2 * p, y_c=130 * p * p, alpha=50 * p * p,
                          r=r, big_r=big_r, t0=t0)


def schedules(params: ScheduleParams, i: int) -> tuple[float, float, float]:
    """(r_i, t_i, log t_i) with r_i = r + (R-r)/(i+1) and t_i = t0^(3/2)^i.

    log t_i is returned alongside because t_i overflows quickly.
    """
    if i < 0:
        raise DomainError("step index must be nonnegative")
    r_i = params.r + (params.big_r - params.r) / (i + 1)
    log_t = (1.5 ** i) * np.log(params.t0)
    t_i = float(np.exp(log_t)) if log_t < 700 else float("inf")
    return r_i, t_i, float(log_t)


@dataclass(frozen=True)
class LedgerEntry:
    name: str
    passed: bool
    margin: Fraction

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed,
                "margin": f"{self.margin.numerator}/{self.margin.denominator}"
                if self.margin.denominator != 1 else str(self.margin.numerator)}


def ledger_verify(params: ScheduleParams, alpha: int | None = None) -> list[LedgerEntry]:
    """Evaluate the proof's inequality ledger in exact integer arithmetic.

    ``alpha`` overrides the schedule's value (used to demonstrate that a
    tampered constant is caught).  Margins are reported as exact fractions of
    the right-hand side minus the left-hand side (nonnegative means pass,
    except for the equality entry which must vanish).
    """
    p = params.p
    a = params.alpha if alpha is None else alpha
    xa, ya, xb, yb, xc, yc = (params.x_a, params.y_a, params.x_b,
                              params.y_b, params.x_c, params.y_c)
    entries: list[LedgerEntry] = []

    def strict(name: str, lhs: Fraction | int, rhs: Fraction | int):
        lhs, rhs = Fraction(lhs), Fraction(rhs)
        entries.append(LedgerEntry(name, lhs < rhs, rhs - lhs))

    def weak(name: str, lhs: Fraction | int, rhs: Fraction | int):
        lhs, rhs = Fraction(lhs), Fraction(rhs)
        entries.append(LedgerEntry(name, lhs <= rhs, rhs - lhs))

    half_a = Fraction(a, 2)
    strict("13p^2+2p-1 < alpha/2", 13 * p * p + 2 * p - 1, half_a)
    strict("24p^2-9p-1 < alpha/2", 24 * p * p - 9 * p - 1, half_a)
    strict("12p^2+13p-1 < alpha/2", 12 * p * p + 13 * p - 1, half_a)
    strict("-132p^2 < -(5/2)alpha", -Fraction(132 * p * p), -Fraction(5 * a, 2))
    strict("-y_c+2p^2 < -(5/2)alpha", -Fraction(yc - 2 * p * p), -Fraction(5 * a, 2))
    strict("12p^2 + 2 alpha (y_b-y_a+p-1)/(y_c-y_a) < (3/2)alpha",
           12 * p * p + Fraction(2 * a * (yb - ya + p - 1), yc - ya), Fraction(3 * a, 2))
    strict("4p < x_b-x_a", 4 * p, xb - xa)
    weak("(p-1)x_a <= y_a", (p - 1) * xa, ya)
    weak("22p <= y_a", 22 * p, ya)
    entries.append(LedgerEntry("x_a+p = x_c", xa + p == xc, Fraction(xc - xa - p)))
    weak("y_a+(p-1)(x_b-p+1)-22p <= y_b", ya + (p - 1) * (xb - p + 1) - 22 * p, yb)
    weak("2p+(p-1)(x_b-p+1) <= y_b", 2 * p + (p - 1) * (xb - p + 1), yb)
    weak("3p+1 <= y_a", 3 * p + 1, ya)
    strict("4p(p-1)+3 < N (= alpha)", 4 * p * (p - 1) + 3, a)
    return entries


def ledger_report(entries: list[LedgerEntry]) -> dict:
    return {"passed": all(e.passed for e in entries),
            "entries": [e.as_dict() for e in entries]}


def maurer_cartan_residual(z_field: FieldHandle, point: np.ndarray) -> PointTensor:
    """d_pi Z + (1/2)[Z, Z]: vanishes at the sampled jet iff pi + Z is Poisson."""
    point = np.asarray(point, dtype=float)
    return poisson_diff(z_field, point) + 0.5 * schouten(z_field, z_field, point)


def flow_of_field(y_field: FieldHandle, point: np.ndarray, theta: float = 0.1,
                  outer_radius: float | None = None, inner_radius: float | None = None,
                  steps: int = 64, report: dict | None = None) -> np.ndarray:
    """Time-one RK4 flow of a flat vector field, with smallness bookkeeping.

    Sampled norms stand in for sups: the measured ||Y||_0 over Halton points
    is compared against (r - s) * theta and recorded; leaving the outer ball
    raises.
    """
    point = np.asarray(point, dtype=float)
    dim = y_field.dim
    outer = outer_radius if outer_radius is not None else 2.0 * max(1.0, float(np.linalg.norm(point)))
    inner = inner_radius if inner_radius is not None else 0.5 * outer
    if report is not None:
        pts = halton_ball(dim, 128, outer)
        sup0 = max(float(np.linalg.norm(y_field(x).components)) for x in pts)
        report["sampled_norm_0"] = sup0
        report["smallness_bound"] = (outer - inner) * theta
        report["smallness_ok"] = sup0 < (outer - inner) * theta
    x = point.copy()
    h = 1.0 / steps
    vec = lambda q: y_field(q).components
    for _ in range(steps):
        k1 = vec(x)
        k2 = vec(x + 0.5 * h * k1)
        k3 = vec(x + 0.5 * h * k2)
        k4 = vec(x + h * k3)
        x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if float(np.linalg.norm(x)) > outer:
            raise FlowEscapeError(f"flow left the ball of radius {outer}")
    return x


def pullback_multivector(field: FieldHandle, flow_map: Callable[[np.ndarray], np.ndarray],
                         point: np.ndarray, step: float = 1e-5) -> PointTensor:
    """(phi^* V)_x = (D phi_x)^{-1} V_{phi(x)}, Jacobian by central differences."""
    point = np.asarray(point, dtype=float)
    target = np.asarray(flow_map(point), dtype=float)
    value = field(target)
    if field.degree == 0:
        return value
    jac = jacobian_fd(flow_map, point, step * (1.0 + float(np.linalg.norm(point))))
    return pushforward_multivector_linear(value, np.linalg.inv(jac))


def sampled_weighted_norm(field: FieldHandle, n: int, k: int, radius: float,
                          n_points: int = 256, seed: int = 0) -> float:
    """Weighted sup over Halton points of |x|^-k |components| (and first FD
    derivatives for n = 1); a sampled stand-in for the flat norms."""
    if n > 1:
        raise DomainError("sampled norms support n <= 1")
    pts = halton_ball(field.dim, n_points, radius, seed=seed)
    worst = 0.0
    for x in pts:
        r = float(np.linalg.norm(x))
        if r < 1e-6:
            continue
        weight = r ** (-k) if k else 1.0
        worst = max(worst, weight * float(np.max(np.abs(field(x).components))))
        if n >= 1:
            jac = field.component_jacobian(x)
            worst = max(worst, weight * float(np.max(np.abs(jac))))
    return worst


@dataclass
class IterationState:
    """One step of the iteration: the deviation field and its bookkeeping."""

    z_field: FieldHandle
    index: int = 0
    params: ScheduleParams = field(default_factory=lambda: derive_constants(SlbTriple(1, 21, 167)))
    history: list = field(default_factory=list)


def iterate_step(state: IterationState,
                 homotopy_provider: Callable[[FieldHandle], FieldHandle],
                 smoothing_provider: Callable[[FieldHandle, float], FieldHandle] | None = None,
                 base_bivector: FieldHandle | None = None,
                 sample_radius: float = 1.0, seed: int = 0) -> IterationState:
    """One iteration: X = S_i(h1(Z_i)), Z_{i+1} = phi_X^*(pi + Z_i) - pi.

    Providers are the declared seam: ``homotopy_provider`` maps a bivector
    field to a vector field (an approximate primitive), ``smoothing_provider``
    maps (vector field, t_i) to a vector field.  The returned deviation is a
    lazy field evaluating the pullback pointwise; sampled-norm diagnostics are
    recorded in the state history, labeled as sampled.
    """
    params = state.params
    r_i, t_i, log_t = schedules(params, state.index)
    pi_g = base_bivector if base_bivector is not None else pi_field(1)
    x_raw = homotopy_provider(state.z_field)
    x_field = smoothing_provider(x_raw, t_i) if smoothing_provider else x_raw

    def flow_map(q: np.ndarray) -> np.ndarray:
        return flow_of_field(x_field, q, outer_radius=4.0 * sample_radius,
                             inner_radius=sample_radius)

    def next_z(point: np.ndarray) -> PointTensor:
        total = FieldHandle(2, CONTRAVARIANT,
                            lambda q: pi_g(q) + state.z_field(q), dim=pi_g.dim)
        return pullback_multivector(total, flow_map, point) - pi_g(point)

    z_next = FieldHandle(2, CONTRAVARIANT, next_z, dim=pi_g.dim)
    record = {
        "i": state.index,
        "r_i": r_i,
        "log_t_i": log_t,
        "sampled": True,
        "norm_z_0": sampled_weighted_norm(state.z_field, 0, 0, sample_radius, seed=seed),
        "norm_x_0": sampled_weighted_norm(x_field, 0, 0, sample_radius, seed=seed),
        "norm_z_next_0": sampled_weighted_norm(z_next, 0, 0, sample_radius,
                                               n_points=64, seed=seed),
    }
    return IterationState(z_field=z_next, index=state.index + 1, params=params,
                          history=state.history + [record])


def cocycle_homotopy_stub(samples: np.ndarray, tol: float = 1e-7
                          ) -> Callable[[FieldHandle], FieldHandle]:
    """Provider defined only on differential cocycles, where the primitive of
    the deviation is zero; anything else is outside the stub's domain."""
    def provider(z_field: FieldHandle) -> FieldHandle:
        for x in np.atleast_2d(samples):
            resid = poisson_diff(z_field, x).norm()
            scale = 1.0 + z_field(x).norm()
            if resid > tol * scale:
                raise ProviderError(
                    f"input is not a cocycle at {x} (residual {resid:.2e}); "
                    "the stub provider has no primitive for it")
        return FieldHandle(1, CONTRAVARIANT,
                           lambda q: PointTensor.zero(1, CONTRAVARIANT, z_field.dim),
                           dim=z_field.dim)
    return provider


def scaling_invariance_residual(bivector: FieldHandle, point: np.ndarray,
                                factor: float) -> float:
    """|t m_t^* P - P| at a point; zero exactly for linear P."""
    point = np.asarray(point, dtype=float)
    lin = np.eye(bivector.dim) * factor
    value = bivector(lin @ point)
    pulled = pushforward_multivector_linear(value, np.linalg.inv(lin))
    return (factor * pulled - bivector(point)).norm()
