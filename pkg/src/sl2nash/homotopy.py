"""Flow pullback, homotopy operators by quadrature, and SU(2) averaging."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, QuadratureError
from .flow import decay_time, flow_real, vector_field_w
from .matrixcore import (PAULI, adjoint_real_matrix, from_real_coords, su2_exp,
                         su2_ball_quadrature, su2_haar, to_real_coords)
from .numerics import gauss_legendre_panels, jacobian_fd
from .skeleton import retract
from .tensors import (COVARIANT, FieldHandle, PointTensor, interior,
                      pullback_form_linear)


@dataclass(frozen=True)
class QuadratureSpec:
    """Time-quadrature layout for the flow-line integral."""

    order: int = 6
    panels: int = 8
    geometric: float = 1.6

    def __post_init__(self):
        if self.order * self.panels < 2:
            raise DomainError("node count must be at least 2")


def flow_jacobian(point: np.ndarray, t: float) -> np.ndarray:
    """Jacobian of the time-t flow map, 4th-order differences with a step
    that shrinks with t (the flow contracts toward the skeleton)."""
    point = np.asarray(point, dtype=float)
    r = float(np.linalg.norm(point))
    h = 1e-4 * (1.0 + r) / (1.0 + t)
    return jacobian_fd(lambda x: flow_real(x, t), point, h)


def pullback_flow(form: FieldHandle, t: float, point: np.ndarray) -> PointTensor:
    """(phi_t^* alpha)_x(v, ...) = alpha_{phi_t(x)}(D phi_t v, ...).

    A non-finite difference Jacobian (possible near the cone for extreme
    times) is reported as an error rather than propagated silently.
    """
    if t < 0:
        raise DomainError("t must be nonnegative")
    point = np.asarray(point, dtype=float)
    target = flow_real(point, t)
    value = form(target)
    if form.degree == 0:
        return value
    jac = flow_jacobian(point, t)
    if not np.isfinite(jac).all():
        raise DomainError(
            f"flow Jacobian lost finiteness at t={t} near |x|={np.linalg.norm(point):.3e}")
    return pullback_form_linear(value, jac)


def _h_t_integrand(form: FieldHandle, s: float, point: np.ndarray) -> PointTensor:
    """i_W phi_s^*(alpha) at the point; equals phi_s^*(i_W alpha) along flow lines."""
    pulled = pullback_flow(form, s, point)
    w = PointTensor.vector(to_real_coords(vector_field_w(from_real_coords(point))))
    return interior(w, pulled)


def h_t(form: FieldHandle, t: float, point: np.ndarray,
        spec: QuadratureSpec = QuadratureSpec(), check: bool = False,
        check_factor: float = 10.0, tol: float = 1e-8) -> PointTensor:
    """Homotopy operator at finite time: integral of i_W phi_s^*(alpha) over [0, t]."""
    if t < 0:
        raise DomainError("t must be nonnegative")
    if form.degree == 0:
        raise DomainError("the integrand contracts a form of degree >= 1")
    out = PointTensor.zero(form.degree - 1, COVARIANT)
    if t == 0.0:
        return out
    nodes, weights = gauss_legendre_panels(0.0, t, spec.order, spec.panels, spec.geometric)
    for s, w in zip(nodes, weights):
        out = out + w * _h_t_integrand(form, float(s), point)
    if check:
        fine = QuadratureSpec(spec.order, 2 * spec.panels, spec.geometric)
        nodes2, weights2 = gauss_legendre_panels(0.0, t, fine.order, fine.panels, fine.geometric)
        out2 = PointTensor.zero(form.degree - 1, COVARIANT)
        for s, w in zip(nodes2, weights2):
            out2 = out2 + w * _h_t_integrand(form, float(s), point)
        if (out - out2).norm() > check_factor * tol:
            raise QuadratureError(
                f"refinement moved the value by {(out - out2).norm():.3e} > {check_factor * tol:.1e}")
    return out


def p_skeleton(form: FieldHandle, point: np.ndarray, tail: float = 1e-8,
               report: dict | None = None) -> PointTensor:
    """Pullback along the infinite-time retraction, approximated at a finite
    horizon T with exp(-2|f|T) < tail.

    On the cone f = 0 the norm decays only like 1/sqrt(t); the achieved horizon
    and expected accuracy are recorded in ``report`` instead of failing.
    """
    point = np.asarray(point, dtype=float)
    a = from_real_coords(point)
    from .matrixcore import casimir, norm_sq
    f = abs(casimir(a))
    if f > 0:
        horizon = decay_time(a, tail)
    else:
        r2 = norm_sq(a)
        horizon = (1.0 / tail - 1.0) / r2 if r2 > 0 else 0.0
        horizon = min(horizon, 1e8)
        if report is not None:
            report["achieved_tolerance"] = 2.0 / np.sqrt(max(horizon, 1.0))
            report["slow_convergence"] = True
    if report is not None:
        report["horizon"] = horizon
    return pullback_flow(form, horizon, point)


def retract_pullback(form: FieldHandle, point: np.ndarray, step: float = 1e-5) -> PointTensor:
    """Direct pullback along the algebraic retraction, with an FD Jacobian;
    the independent route to the infinite-time limit."""
    point = np.asarray(point, dtype=float)
    ret = lambda x: to_real_coords(retract(from_real_coords(x)))
    value = form(ret(point))
    if form.degree == 0:
        return value
    jac = jacobian_fd(ret, point, step * (1.0 + float(np.linalg.norm(point))))
    return pullback_form_linear(value, jac)


def _conjugation_pullback(field: FieldHandle, u_matrix: np.ndarray,
                          point: np.ndarray) -> PointTensor:
    """Pullback of a covariant field along A -> U A U^*, a linear map on R^6."""
    lin = adjoint_real_matrix(u_matrix)
    value = field(lin @ np.asarray(point, dtype=float))
    if field.degree == 0:
        return value
    if field.variance != COVARIANT:
        raise DomainError("averaging is implemented for covariant fields")
    return pullback_form_linear(value, lin)


def average_su2(field: FieldHandle, point: np.ndarray, order: int = 4) -> PointTensor:
    """Group average against the normalized invariant measure."""
    out = PointTensor.zero(field.degree, field.variance) if field.degree > 0 \
        else PointTensor.scalar(0.0, field.variance)
    for u, w in su2_haar(order):
        out = out + w * _conjugation_pullback(field, u, point)
    return out


def h_su2(form: FieldHandle, point: np.ndarray, order: int = 4,
          inner_order: int = 8) -> PointTensor:
    """Averaging homotopy: nested quadrature of the conjugation-line integrand.

    Outer integral over the exponential-chart ball with the invariant density;
    inner integral over the conjugation parameter in [0, 1].
    """
    if form.degree == 0:
        raise DomainError("the integrand contracts a form of degree >= 1")
    from numpy.polynomial.legendre import leggauss
    xs, ws = leggauss(inner_order)
    ts = 0.5 * (xs + 1.0)
    tw = 0.5 * ws
    nodes, weights = su2_ball_quadrature(order)
    point = np.asarray(point, dtype=float)
    out = PointTensor.zero(form.degree - 1, COVARIANT)
    for v, w_ball in zip(nodes, weights):
        x_alg = 1j * (v[0] * PAULI[0] + v[1] * PAULI[1] + v[2] * PAULI[2])
        for t, w_t in zip(ts, tw):
            u = su2_exp(t * v)
            lin = adjoint_real_matrix(u)
            target = lin @ point
            ad_vec = PointTensor.vector(to_real_coords(
                x_alg @ from_real_coords(target) - from_real_coords(target) @ x_alg))
            contracted = interior(ad_vec, form(target))
            out = out + (w_ball * w_t) * pullback_form_linear(contracted, lin)
    return out
