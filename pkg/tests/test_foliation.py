import itertools

import numpy as np
import pytest

from sl2nash import foliation as fo
from sl2nash import matrixcore as mc
from sl2nash import skeleton as sk
from sl2nash.errors import DomainError
from sl2nash.tensors import (CONTRAVARIANT, FieldHandle, PointTensor,
                             evaluate_form, exterior_derivative,
                             flat_on_bivector, interior, scalar_field, wedge)


def rand_poly_field(degree, seed):
    rng = np.random.default_rng(seed)
    from math import comb
    n = comb(6, degree)
    lin = rng.standard_normal((n, 6))
    const = rng.standard_normal(n)
    quad = rng.standard_normal((n, 6, 6))
    quad = 0.5 * (quad + np.swapaxes(quad, 1, 2))

    def ev(u):
        return PointTensor(degree, CONTRAVARIANT,
                           const + lin @ u + 0.5 * np.einsum("kij,i,j->k", quad, u, u))

    def jac(u):
        return lin + np.einsum("kij,j->ki", quad, u)

    return FieldHandle(degree, CONTRAVARIANT, ev, jacobian=jac)


def test_pi_vanishes_at_origin():
    for i in (1, 2):
        assert fo.pi(i, np.zeros(6)).norm() == 0.0


def test_pi_jacobi_identity():
    rng = np.random.default_rng(0)
    for _ in range(100):
        u = rng.standard_normal(6)
        assert fo.schouten(fo.pi_field(1), fo.pi_field(1), u).norm() < 1e-9
        assert fo.schouten(fo.pi_field(2), fo.pi_field(2), u).norm() < 1e-9


def test_linear_functions_represent_bracket():
    rng = np.random.default_rng(1)
    basis = [mc.from_real_coords(np.eye(6)[k]) for k in range(6)]
    pts = [rng.standard_normal(6) for _ in range(5)]
    for a, b in itertools.product(range(6), repeat=2):
        lx, ly = fo.linear_function(basis[a]), fo.linear_function(basis[b])
        lz = fo.linear_function(mc.commutator(basis[a], basis[b]))
        for u in pts:
            assert abs(fo.poisson_bracket(lx, ly, u)
                       - lz(u).components[0]) < 1e-10


def test_transversal_fields_pair_with_differentials():
    rng = np.random.default_rng(2)
    for _ in range(300):
        u = rng.standard_normal(6)
        for i, j in itertools.product((1, 2), repeat=2):
            val = float(np.dot(fo.grad_casimir(j, u), fo.vfield_v(i, u).components))
            assert abs(val - (1.0 if i == j else 0.0)) < 1e-12
    with pytest.raises(DomainError):
        fo.vfield_v(1, np.zeros(6))


def test_transversal_example_point():
    u = np.zeros(6)
    u[0] = 1.0  # z = (1, 0, 0)
    v1 = fo.vfield_v(1, u).components
    assert np.allclose(v1, np.array([0.5, 0, 0, 0, 0, 0]))


def test_extended_forms_kernel_and_musical_identities():
    rng = np.random.default_rng(3)
    for _ in range(100):
        u = rng.standard_normal(6)
        for i in (1, 2):
            for j in (1, 2):
                assert interior(fo.vfield_v(j, u), fo.omega_tilde(i, u)).norm() < 1e-12
            p = fo.pi(i, u).as_matrix().T
            w = fo.omega_tilde(i, u).as_matrix().T
            assert np.abs(p @ w @ p - p).max() < 1e-10
        w1 = fo.omega_tilde(1, u)
        w2 = fo.omega_tilde(2, u)
        assert (flat_on_bivector(w1, fo.pi(1, u)) + w1).norm() < 1e-10
        assert (flat_on_bivector(w1, fo.pi(2, u)) - w2).norm() < 1e-10
        assert (flat_on_bivector(w2, fo.pi(1, u)) - w1).norm() < 1e-10
        assert (flat_on_bivector(w2, fo.pi(2, u)) + w2).norm() < 1e-10


def test_scaled_extension_is_polynomial():
    # R^2 * omega has linear coefficients: exact interpolation from two points
    rng = np.random.default_rng(4)
    for i in (1, 2):
        u = rng.standard_normal(6)
        v = rng.standard_normal(6)
        at = lambda x: fo.norm_sq_real(x) * fo.omega_tilde(i, x).components
        mid = at(0.5 * (u + v))
        assert np.allclose(mid, 0.5 * (at(u) + at(v)), atol=1e-12)


def _sphere_frame(w):
    a = np.array([1.0, 0, 0]) if abs(w[0]) < 0.9 else np.array([0, 1.0, 0])
    u1 = np.cross(w, a)
    u1 /= np.linalg.norm(u1)
    u2 = np.cross(w, u1)
    if np.linalg.det(np.stack([w, u1, u2])) < 0:
        u2 = -u2
    return u1, u2


def test_rho_pullbacks_of_forms():
    rng = np.random.default_rng(5)
    for _ in range(30):
        w = rng.standard_normal(3)
        w /= np.linalg.norm(w)
        lam = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
        if abs(lam) < 0.3:
            continue
        u1, u2 = _sphere_frame(w)
        pt = np.concatenate([(lam * w).real, (lam * w).imag])
        sphere_pair = [sk.rho_tangent(w, lam, u1, 0), sk.rho_tangent(w, lam, u2, 0)]
        lam_pair = [sk.rho_tangent(w, lam, np.zeros(3), 1.0),
                    sk.rho_tangent(w, lam, np.zeros(3), 1j)]
        l1, l2 = lam.real, lam.imag
        r2 = abs(lam) ** 2
        assert abs(evaluate_form(fo.omega_tilde(1, pt), sphere_pair) + l1) < 1e-9
        assert abs(evaluate_form(fo.omega_tilde(2, pt), sphere_pair) - l2) < 1e-9
        assert abs(evaluate_form(fo.gamma(1, pt), sphere_pair) + l1 / (2 * r2)) < 1e-8
        assert abs(evaluate_form(fo.gamma(2, pt), sphere_pair) + l2 / (2 * r2)) < 1e-8
        assert abs(evaluate_form(fo.phi(pt), lam_pair) - 4 * r2) < 1e-9
        assert abs(evaluate_form(fo.phi(pt), sphere_pair)) < 1e-9


def test_gamma_closed_on_leaves():
    rng = np.random.default_rng(6)
    for _ in range(10):
        pt = rng.standard_normal(6) * 0.8
        basis = fo.leaf_tangent_basis(pt)
        for i in (1, 2):
            dg = exterior_derivative(fo.gamma_field(i), pt)
            for c in itertools.combinations(range(4), 3):
                vecs = [basis[:, k] for k in c]
                assert abs(evaluate_form(dg, vecs)) < 1e-7


def test_gamma_transversal_contraction():
    # i_{V_i} gamma_i = i_{V_i} i_{V_i} d(omega) contracts twice with one vector
    rng = np.random.default_rng(7)
    for _ in range(20):
        u = rng.standard_normal(6)
        for i in (1, 2):
            v = fo.vfield_v(i, u)
            assert interior(v, fo.gamma(i, u)).norm() < 1e-14


def test_cartan_trivectors():
    cr = fo.cartan_trivector("R")
    ci = fo.cartan_trivector("I")
    assert cr.component((0, 1, 2)) == 0.5
    assert ci.component((3, 4, 5)) == 0.5
    top = wedge(cr, ci)
    assert abs(top.components[0]) > 0.1
    rng = np.random.default_rng(8)
    for _ in range(100):
        u = rng.standard_normal(6)
        assert fo.poisson_diff(fo.cartan_field("R"), u).norm() < 1e-8
        assert fo.poisson_diff(fo.cartan_field("I"), u).norm() < 1e-8
    with pytest.raises(DomainError):
        fo.cartan_trivector("X")


def test_casimir_functions_are_cocycles():
    gof = scalar_field(lambda v: fo.casimir_parts(v)[0] ** 2 + fo.casimir_parts(v)[1] ** 2,
                       grad=lambda v: 2 * fo.casimir_parts(v)[0] * fo.grad_casimir(1, v)
                       + 2 * fo.casimir_parts(v)[1] * fo.grad_casimir(2, v))
    gof_mv = FieldHandle(0, CONTRAVARIANT, gof.evaluator, jacobian=gof.jacobian)
    rng = np.random.default_rng(9)
    for _ in range(100):
        assert fo.poisson_diff(gof_mv, rng.standard_normal(6)).norm() < 1e-8


def test_poisson_differential_squares_to_zero():
    rng = np.random.default_rng(10)
    h = rand_poly_field(0, 11)
    dh_field = FieldHandle(1, CONTRAVARIANT, lambda v: fo.poisson_diff(h, v))
    for _ in range(20):
        u = rng.standard_normal(6)
        assert fo.poisson_diff(dh_field, u).norm() < 1e-7


def test_schouten_degree_cases():
    rng = np.random.default_rng(12)
    x_field = rand_poly_field(1, 13)
    g_field = rand_poly_field(0, 14)
    u = rng.standard_normal(6)
    # [X, g] = X(g)
    br = fo.schouten(x_field, g_field, u)
    direct = float(x_field(u).components @ g_field.component_jacobian(u).reshape(6))
    assert abs(br.components[0] - direct) < 1e-10
    # [X, Y] = Lie bracket
    y_field = rand_poly_field(1, 15)
    jx = x_field.component_jacobian(u)
    jy = y_field.component_jacobian(u)
    lie = jy @ x_field(u).components - jx @ y_field(u).components
    assert np.allclose(fo.schouten(x_field, y_field, u).components, lie, atol=1e-10)


def test_schouten_graded_antisymmetry_and_leibniz():
    rng = np.random.default_rng(16)
    u = rng.standard_normal(6)
    p2 = rand_poly_field(2, 17)
    q2 = rand_poly_field(2, 18)
    x1 = rand_poly_field(1, 19)
    y1 = rand_poly_field(1, 20)
    b1 = fo.schouten(p2, q2, u)
    b2 = fo.schouten(q2, p2, u)
    assert np.allclose(b1.components, b2.components, atol=1e-9)  # (p-1)(q-1) odd
    qy = FieldHandle(3, CONTRAVARIANT, lambda v: wedge(q2(v), y1(v)))
    lhs = fo.schouten(x1, qy, u)
    rhs = wedge(fo.schouten(x1, q2, u), y1(u)) + wedge(q2(u), fo.schouten(x1, y1, u))
    assert (lhs - rhs).norm() < 1e-7 * (1 + rhs.norm())
    xy = FieldHandle(2, CONTRAVARIANT, lambda v: wedge(x1(v), y1(v)))
    lhs2 = fo.schouten(p2, xy, u)
    rhs2 = wedge(fo.schouten(p2, x1, u), y1(u)) - wedge(x1(u), fo.schouten(p2, y1, u))
    assert (lhs2 - rhs2).norm() < 1e-7 * (1 + rhs2.norm())


def test_schouten_graded_jacobi():
    # graded Jacobi, checked against the direct expansion on polynomial fields
    rng = np.random.default_rng(21)
    p = rand_poly_field(2, 22)
    q = rand_poly_field(1, 23)
    r = rand_poly_field(1, 24)
    u = rng.standard_normal(6)

    def brk(a_field, b_field):
        return FieldHandle(a_field.degree + b_field.degree - 1, CONTRAVARIANT,
                           lambda v: fo.schouten(a_field, b_field, v))

    dp, dq, dr = 2, 1, 1
    term1 = ((-1) ** ((dp - 1) * (dr - 1))) * fo.schouten(brk(p, q), r, u)
    term2 = ((-1) ** ((dq - 1) * (dp - 1))) * fo.schouten(brk(q, r), p, u)
    term3 = ((-1) ** ((dr - 1) * (dq - 1))) * fo.schouten(brk(r, p), q, u)
    assert (term1 + term2 + term3).norm() < 1e-6


def test_phi_closed_and_leaf_basis():
    rng = np.random.default_rng(25)
    for _ in range(20):
        u = rng.standard_normal(6)
        assert exterior_derivative(fo.phi_field(), u).norm() < 1e-10
        basis = fo.leaf_tangent_basis(u)
        for k in range(4):
            assert abs(np.dot(fo.grad_casimir(1, u), basis[:, k])) < 1e-10
            assert abs(np.dot(fo.grad_casimir(2, u), basis[:, k])) < 1e-10


def test_bracket_estimate_probe_sampled_norms():
    # ||[V, W]||_{n,k+l} <= C (||V||_{0,k} ||W||_{n+1,l} + ||V||_{n+1,k} ||W||_{0,l})
    # with sampled weighted norms over a fixed ball; the fitted constant must be
    # finite and stable under sample doubling
    from sl2nash.numerics import halton_ball
    from sl2nash.tensors import wedge as _wedge

    def flat_field(seed):
        rng = np.random.default_rng(seed)
        lin = rng.standard_normal((6, 6))

        def ev(u):
            r2 = float(u @ u)
            env = np.exp(-1.0 / r2) if r2 > 1e-10 else 0.0
            return PointTensor.vector(env * (lin @ u))
        return FieldHandle(1, CONTRAVARIANT, ev)

    v_field = flat_field(31)
    w_field = flat_field(32)
    bracket = FieldHandle(1, CONTRAVARIANT, lambda u: fo.schouten(v_field, w_field, u))

    def sampled(field, n, k, pts):
        worst = 0.0
        for x in pts:
            r = float(np.linalg.norm(x))
            if r < 0.15:
                continue
            weight = r ** (-k) if k else 1.0
            worst = max(worst, weight * float(np.max(np.abs(field(x).components))))
            if n >= 1:
                worst = max(worst, weight * float(np.max(np.abs(
                    field.component_jacobian(x)))))
        return worst

    def fitted_c(n_pts, n, k, l):
        pts = halton_ball(6, n_pts, 0.9, seed=7)
        lhs = sampled(bracket, n, k + l, pts)
        rhs = (sampled(v_field, 0, k, pts) * sampled(w_field, n + 1, l, pts)
               + sampled(v_field, n + 1, k, pts) * sampled(w_field, 0, l, pts))
        return lhs / rhs

    for (n, k, l) in ((0, 1, 1), (0, 2, 1)):
        c1 = fitted_c(64, n, k, l)
        c2 = fitted_c(128, n, k, l)
        assert np.isfinite(c1) and c1 > 0
        assert abs(c2 - c1) <= 0.2 * max(c1, c2)
