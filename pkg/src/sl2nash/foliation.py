"""Pointwise exterior calculus on R^6: Poisson bivectors, transversal fields,
extended leafwise symplectic forms, Cartan trivectors, Schouten bracket.

Real coordinates are ordered (x1, x2, x3, y1, y2, y3); z_j = x_j + i*y_j.
"""

from __future__ import annotations

from typing import Callable

import numpy as np
from scipy.linalg import null_space

from .errors import DomainError
from .tensors import (CONTRAVARIANT, COVARIANT, FieldHandle, PointTensor,
                      basis_tuples, interior, sort_sign, tuple_position, wedge)

_CYCLIC = ((0, 1, 2), (1, 2, 0), (2, 0, 1))


def norm_sq_real(u: np.ndarray) -> float:
    """R^2 = tr(A A*) = 2 |u|^2 in real coordinates."""
    u = np.asarray(u, dtype=float)
    return 2.0 * float(np.dot(u, u))


def _linear_component_matrix(terms) -> np.ndarray:
    """Matrix C with components(u) = C @ u for bivector terms ((i, j), coord, coeff)."""
    c = np.zeros((len(basis_tuples(6, 2)), 6))
    for (i, j), coord, coeff in terms:
        sign, idx = sort_sign((i, j))
        if sign == 0:
            continue
        c[tuple_position(6, 2, idx), coord] += sign * coeff
    return c


def _pi_terms(which: int):
    terms = []
    for a, b, cc in _CYCLIC:
        xa, ya = a, a + 3
        xb, yb = b, b + 3
        xc, yc = cc, cc + 3
        if which == 1:
            terms += [((xb, xc), xa, 1.0), ((yb, yc), xa, -1.0),
                      ((xb, yc), ya, 1.0), ((yb, xc), ya, 1.0)]
        else:
            terms += [((xb, xc), ya, 1.0), ((yb, yc), ya, -1.0),
                      ((xb, yc), xa, -1.0), ((yb, xc), xa, -1.0)]
    return terms


_PI_MATRIX = {1: _linear_component_matrix(_pi_terms(1)),
              2: _linear_component_matrix(_pi_terms(2))}


def _omega_terms(which: int):
    terms = []
    for a, b, cc in _CYCLIC:
        xa, ya = a, a + 3
        xb, yb = b, b + 3
        xc, yc = cc, cc + 3
        if which == 1:
            terms += [((yb, yc), xa, 1.0), ((xb, xc), xa, -1.0),
                      ((xb, yc), ya, -1.0), ((yb, xc), ya, -1.0)]
        else:
            terms += [((yb, yc), ya, 1.0), ((xb, xc), ya, -1.0),
                      ((xb, yc), xa, 1.0), ((yb, xc), xa, 1.0)]
    return terms


_OMEGA_MATRIX = {1: _linear_component_matrix(_omega_terms(1)),
                 2: _linear_component_matrix(_omega_terms(2))}


def pi(which: int, point: np.ndarray) -> PointTensor:
    """The Poisson bivectors: 4*Re and 4*Im of the complex linear structure."""
    if which not in (1, 2):
        raise DomainError("which must be 1 or 2")
    u = np.asarray(point, dtype=float)
    return PointTensor(2, CONTRAVARIANT, _PI_MATRIX[which] @ u)


def pi_field(which: int) -> FieldHandle:
    mat = _PI_MATRIX[which]
    return FieldHandle(2, CONTRAVARIANT, lambda u: PointTensor(2, CONTRAVARIANT, mat @ u),
                       jacobian=lambda u: mat)


def casimir_parts(point: np.ndarray) -> tuple[float, float]:
    """(f1, f2) with f = f1 + i f2 = z1^2 + z2^2 + z3^2."""
    u = np.asarray(point, dtype=float)
    x, y = u[:3], u[3:]
    return float(np.dot(x, x) - np.dot(y, y)), 2.0 * float(np.dot(x, y))


def grad_casimir(which: int, point: np.ndarray) -> np.ndarray:
    u = np.asarray(point, dtype=float)
    x, y = u[:3], u[3:]
    if which == 1:
        return np.concatenate([2 * x, -2 * y])
    if which == 2:
        return np.concatenate([2 * y, 2 * x])
    raise DomainError("which must be 1 or 2")


def casimir_field(which: int) -> FieldHandle:
    from .tensors import scalar_field
    return scalar_field(lambda u: casimir_parts(u)[which - 1],
                        grad=lambda u: grad_casimir(which, u))


def phi(point: np.ndarray) -> PointTensor:
    """The defining 2-form of the foliation, d f1 wedge d f2."""
    g1 = PointTensor.covector(grad_casimir(1, point))
    g2 = PointTensor.covector(grad_casimir(2, point))
    return wedge(g1, g2)


def _phi_jacobian(point: np.ndarray) -> np.ndarray:
    u = np.asarray(point, dtype=float)
    g1 = grad_casimir(1, u)
    g2 = grad_casimir(2, u)
    # d g1 / du and d g2 / du are constant matrices
    d1 = np.zeros((6, 6))
    d1[:3, :3] = 2 * np.eye(3)
    d1[3:, 3:] = -2 * np.eye(3)
    d2 = np.zeros((6, 6))
    d2[:3, 3:] = 2 * np.eye(3)
    d2[3:, :3] = 2 * np.eye(3)
    jac = np.zeros((len(basis_tuples(6, 2)), 6))
    for pos, (i, j) in enumerate(basis_tuples(6, 2)):
        jac[pos] = (d1[i] * g2[j] + g1[i] * d2[j] - d1[j] * g2[i] - g1[j] * d2[i])
    return jac


def phi_field() -> FieldHandle:
    return FieldHandle(2, COVARIANT, phi, jacobian=_phi_jacobian)


def vfield_v(which: int, point: np.ndarray) -> PointTensor:
    """Transversal vector fields dual to (df1, df2) away from the origin."""
    u = np.asarray(point, dtype=float)
    r2 = norm_sq_real(u)
    if r2 < 1e-20:
        raise DomainError("V fields are singular at the origin")
    x, y = u[:3], u[3:]
    if which == 1:
        vec = np.concatenate([x, -y]) / r2
    elif which == 2:
        vec = np.concatenate([y, x]) / r2
    else:
        raise DomainError("which must be 1 or 2")
    return PointTensor.vector(vec)


def omega_tilde(which: int, point: np.ndarray) -> PointTensor:
    """Extended leafwise symplectic 2-forms; R^2 * omega_tilde has linear coefficients."""
    u = np.asarray(point, dtype=float)
    r2 = norm_sq_real(u)
    if r2 < 1e-20:
        raise DomainError("omega_tilde is singular at the origin")
    if which not in (1, 2):
        raise DomainError("which must be 1 or 2")
    return PointTensor(2, COVARIANT, 2.0 * (_OMEGA_MATRIX[which] @ u) / r2)


def _omega_tilde_jacobian(which: int, u: np.ndarray) -> np.ndarray:
    r2 = norm_sq_real(u)
    lin = _OMEGA_MATRIX[which] @ u
    return 2.0 * _OMEGA_MATRIX[which] / r2 - np.outer(2.0 * lin, 4.0 * u) / (r2 * r2)


def omega_tilde_field(which: int) -> FieldHandle:
    return FieldHandle(2, COVARIANT, lambda u: omega_tilde(which, u),
                       jacobian=lambda u: _omega_tilde_jacobian(which, u))


def d_omega_tilde(which: int, point: np.ndarray) -> PointTensor:
    """Exterior derivative of omega_tilde, from the analytic jacobian."""
    from .tensors import exterior_derivative
    return exterior_derivative(omega_tilde_field(which), point)


def gamma(which: int, point: np.ndarray) -> PointTensor:
    """Variation 2-forms: contraction of d(omega_tilde_1) with the V fields."""
    return interior(vfield_v(which, point), d_omega_tilde(1, point))


def gamma_field(which: int) -> FieldHandle:
    return FieldHandle(2, COVARIANT, lambda u: gamma(which, u))


def cartan_trivector(kind: str) -> PointTensor:
    """The two constant invariant trivectors (real and imaginary flavor)."""
    x1, x2, x3, y1, y2, y3 = 0, 1, 2, 3, 4, 5
    if kind == "R":
        entries = {(x1, x2, x3): 0.5, (y1, y2, x3): -0.5,
                   (x1, y2, y3): -0.5, (y1, x2, y3): -0.5}
    elif kind == "I":
        entries = {(y1, y2, y3): 0.5, (y1, x2, x3): -0.5,
                   (x1, y2, x3): -0.5, (x1, x2, y3): -0.5}
    else:
        raise DomainError("kind must be 'R' or 'I'")
    return PointTensor.from_dict(3, CONTRAVARIANT, entries)


def cartan_field(kind: str) -> PointTensor | FieldHandle:
    value = cartan_trivector(kind)
    ncomp = len(value.components)
    return FieldHandle(3, CONTRAVARIANT, lambda u: value,
                       jacobian=lambda u: np.zeros((ncomp, 6)))


def _grassmann_derivative(t: PointTensor, l: int) -> PointTensor:
    """Right derivative with respect to the l-th odd generator.

    The right derivative (sign (-1)^(degree-1-slot)) is what makes the
    odd-coordinate bracket formula satisfy the graded Leibniz rule and square
    to zero against a Poisson bivector; the left derivative does not.
    """
    degree = t.degree - 1
    comps = np.zeros(len(basis_tuples(t.dim, degree)))
    for pos, idx in enumerate(basis_tuples(t.dim, t.degree)):
        if l not in idx:
            continue
        slot = idx.index(l)
        rest = idx[:slot] + idx[slot + 1:]
        comps[tuple_position(t.dim, degree, rest)] += ((-1) ** (t.degree - 1 - slot)) * t.components[pos]
    return PointTensor(degree, t.variance, comps, t.dim)


def schouten(p_field: FieldHandle, q_field: FieldHandle, point: np.ndarray) -> PointTensor:
    """Schouten-Nijenhuis bracket of multivector fields at a point.

    Odd-coordinate representation: [P,Q] = sum_l dP/dxi_l ^ d_l Q
    - (-1)^((p-1)(q-1)) sum_l dQ/dxi_l ^ d_l P.
    """
    if p_field.variance != CONTRAVARIANT or q_field.variance != CONTRAVARIANT:
        raise DomainError("schouten bracket acts on multivector fields")
    point = np.asarray(point, dtype=float)
    p_val = p_field(point)
    q_val = q_field(point)
    p_jac = p_field.component_jacobian(point)
    q_jac = q_field.component_jacobian(point)
    deg = p_val.degree + q_val.degree - 1
    if deg < 0:
        return PointTensor.scalar(0.0, CONTRAVARIANT)
    out = PointTensor.zero(deg, CONTRAVARIANT)
    sign = (-1) ** ((p_val.degree - 1) * (q_val.degree - 1))
    for l in range(6):
        dq_l = PointTensor(q_val.degree, CONTRAVARIANT, q_jac[:, l])
        dp_l = PointTensor(p_val.degree, CONTRAVARIANT, p_jac[:, l])
        if p_val.degree >= 1:
            out = out + wedge(_grassmann_derivative(p_val, l), dq_l)
        if q_val.degree >= 1:
            out = out - sign * wedge(_grassmann_derivative(q_val, l), dp_l)
    return out


def poisson_diff(p_field: FieldHandle, point: np.ndarray) -> PointTensor:
    """The Poisson differential [pi_1, P] at a point."""
    return schouten(pi_field(1), p_field, point)


def poisson_bracket(g_field: FieldHandle, h_field: FieldHandle, point: np.ndarray) -> float:
    """{g, h} = pi_1(dg, dh)."""
    point = np.asarray(point, dtype=float)
    dg = g_field.component_jacobian(point)[0]
    dh = h_field.component_jacobian(point)[0]
    m = pi(1, point).as_matrix()
    return float(dg @ m @ dh)


def linear_function(x_matrix: np.ndarray) -> FieldHandle:
    """The linear function A -> Re tr(X A), as a scalar field on R^6.

    With this pairing the bracket of linear functions represents the matrix
    commutator: {l_X, l_Y} = l_{[X,Y]}.
    """
    from .matrixcore import from_real_coords
    from .tensors import scalar_field

    grad = np.array([float(np.trace(x_matrix @ _basis_matrix(k)).real) for k in range(6)])

    def fun(u: np.ndarray) -> float:
        return float(np.trace(x_matrix @ from_real_coords(u)).real)

    return scalar_field(fun, grad=lambda u: grad)


def _basis_matrix(k: int) -> np.ndarray:
    from .matrixcore import from_real_coords
    e = np.zeros(6)
    e[k] = 1.0
    return from_real_coords(e)


def leaf_tangent_basis(point: np.ndarray) -> np.ndarray:
    """Orthonormal basis (columns) of the leaf tangent space ker(df1) * ker(df2)."""
    rows = np.stack([grad_casimir(1, point), grad_casimir(2, point)])
    basis = null_space(rows)
    if basis.shape[1] != 4:
        raise DomainError("leaf tangent space is degenerate at this point")
    return basis


def multivector_field(degree: int, evaluator: Callable[[np.ndarray], np.ndarray],
                      jacobian: Callable[[np.ndarray], np.ndarray] | None = None) -> FieldHandle:
    """Wrap a components-callable into a contravariant FieldHandle."""
    return FieldHandle(degree, CONTRAVARIANT,
                       lambda u: PointTensor(degree, CONTRAVARIANT, evaluator(u)),
                       jacobian=jacobian)


def form_field(degree: int, evaluator: Callable[[np.ndarray], np.ndarray],
               jacobian: Callable[[np.ndarray], np.ndarray] | None = None) -> FieldHandle:
    return FieldHandle(degree, COVARIANT,
                       lambda u: PointTensor(degree, COVARIANT, evaluator(u)),
                       jacobian=jacobian)
