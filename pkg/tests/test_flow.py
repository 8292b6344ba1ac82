import numpy as np
import pytest

from sl2nash import flow as fl
from sl2nash import matrixcore as mc
from sl2nash import skeleton as sk
from sl2nash.errors import DomainError

NILPOTENT = mc.from_coords((0, -0.5, -0.5j))


def test_vector_field_examples():
    assert mc.frob(fl.vector_field_w(mc.from_coords((1, 0, 0)))) < 1e-14
    expected = np.array([[0, -0.5], [0, 0]], dtype=complex)
    assert np.allclose(fl.vector_field_w(NILPOTENT), expected)


def test_speed_identity_quarter_coefficient():
    # brute-force trace computation fixes the coefficient at 1/4
    rng = np.random.default_rng(0)
    for _ in range(500):
        a = mc.random_sl2(rng, scale=rng.uniform(0.2, 2.0))
        r2 = mc.norm_sq(a)
        f = abs(mc.casimir(a))
        lhs = mc.norm_sq(fl.vector_field_w(a))
        assert abs(lhs - 0.25 * r2 * (r2 * r2 - 4 * f * f)) < 1e-11 * (1 + r2 ** 3)


def test_flow_fixes_skeleton():
    a = mc.from_coords((1.2, 0, 0))
    for t in (0.5, 3.0, 10.0):
        assert mc.frob(fl.flow(a, t) - a) < 1e-12


def test_flow_nilpotent_closed_form():
    for t in (0.5, 2.0, 7.0):
        out = fl.flow(NILPOTENT, t)
        expected = np.array([[0, (1 + t) ** -0.5], [0, 0]], dtype=complex)
        assert np.allclose(out, expected, atol=1e-13)


def test_flow_matches_rk4_oracle():
    rng = np.random.default_rng(1)
    for _ in range(10):
        a = mc.random_sl2(rng, scale=rng.uniform(0.3, 1.2))
        for t in (0.3, 1.0, 5.0):
            gap = mc.frob(fl.flow(a, t) - fl.flow_rk4(a, t, steps=max(100, int(t / 1e-3))))
            assert gap < 1e-8


def test_rk4_is_fourth_order():
    rng = np.random.default_rng(2)
    a = mc.random_sl2(rng)
    t = 1.0
    exact = fl.flow(a, t)
    gaps = [mc.frob(fl.flow_rk4(a, t, steps=n) - exact) for n in (25, 50, 100)]
    assert 10 < gaps[0] / gaps[1] < 22
    assert 10 < gaps[1] / gaps[2] < 22
    assert np.array_equal(fl.flow_rk4(a, 0.0, 10), a)


def test_norm_and_commutator_evolution():
    a = mc.from_coords((1.3, 0, 0))
    f = abs(mc.casimir(a))
    for t in (0.1, 1.0, 10.0):
        assert abs(fl.r_t_sq(a, t) - 2 * f) < 1e-12
        assert mc.frob(fl.k_t(a, t)) < 1e-12
    for t in (0.2, 1.5):
        assert abs(fl.r_t_sq(NILPOTENT, t) - 1 / (1 + t)) < 1e-14
        expected = np.diag([1 / (1 + t), -1 / (1 + t)]).astype(complex)
        assert np.allclose(fl.k_t(NILPOTENT, t), expected, atol=1e-13)
    rng = np.random.default_rng(3)
    for _ in range(200):
        a = mc.random_sl2(rng, scale=rng.uniform(0.2, 1.5))
        t = rng.uniform(0, 4)
        at = fl.flow(a, t)
        assert abs(fl.r_t_sq(a, t) - mc.norm_sq(at)) < 1e-9
        assert mc.frob(fl.k_t(a, t) - mc.commutator(at, at.conj().T)) < 1e-9


def test_casimir_invariance_along_flow():
    rng = np.random.default_rng(4)
    for _ in range(200):
        a = mc.random_sl2(rng)
        t = rng.uniform(0, 5)
        assert abs(mc.casimir(fl.flow(a, t)) - mc.casimir(a)) < 1e-10


def test_flow_equivariance():
    rng = np.random.default_rng(5)
    nodes = mc.su2_haar(2)
    for _ in range(50):
        a = mc.random_sl2(rng)
        u = nodes[int(rng.integers(len(nodes)))][0]
        t = rng.uniform(0, 3)
        lhs = fl.flow(mc.adjoint(u, a), t)
        rhs = mc.adjoint(u, fl.flow(a, t))
        assert mc.frob(lhs - rhs) < 1e-10 * (1 + mc.frob(rhs))


def test_commutator_decay_ode():
    # finite-difference derivative of K_t matches -R_t^2 K_t
    rng = np.random.default_rng(6)
    for _ in range(50):
        a = mc.random_sl2(rng)
        t0, h = rng.uniform(0.1, 2.0), 1e-4
        fd = (fl.k_t(a, t0 - 2 * h) - 8 * fl.k_t(a, t0 - h)
              + 8 * fl.k_t(a, t0 + h) - fl.k_t(a, t0 + 2 * h)) / (12 * h)
        expected = -fl.r_t_sq(a, t0) * fl.k_t(a, t0)
        assert mc.frob(fd - expected) < 1e-6 * (1 + mc.frob(expected))


def test_gram_matrix_ode():
    # S_t = A_t A_t^* solves S' = |f|^2 - S^2
    rng = np.random.default_rng(7)
    for _ in range(50):
        a = mc.random_sl2(rng)
        f = abs(mc.casimir(a))
        t0, h = rng.uniform(0.1, 2.0), 1e-4
        gram = lambda t: fl.flow(a, t) @ fl.flow(a, t).conj().T
        fd = (gram(t0 - 2 * h) - 8 * gram(t0 - h) + 8 * gram(t0 + h)
              - gram(t0 + 2 * h)) / (12 * h)
        expected = f * f * np.eye(2) - gram(t0) @ gram(t0)
        assert mc.frob(fd - expected) < 1e-6 * (1 + mc.frob(expected))


def test_flow_limit_is_retraction():
    rng = np.random.default_rng(8)
    for _ in range(30):
        a = mc.random_sl2(rng)
        if abs(mc.casimir(a)) < 0.05:
            continue
        horizon = fl.decay_time(a)
        assert mc.frob(fl.flow(a, horizon) - sk.retract(a)) < 1e-6
    big_t = 1e8
    gap = mc.frob(fl.flow(NILPOTENT, big_t) - sk.retract(NILPOTENT))
    assert gap <= 2 / np.sqrt(big_t)


def test_mu_and_theta_values():
    assert fl.mu_eval(0, 0, 3.7, 2.2) == 1.0
    assert fl.mu_eval(0.5, 2, 0.0, 2.0) == 2.0  # only the j=1 term survives at t=0
    assert fl.mu_eval(0.5, 2, 1.0, 2.0) == pytest.approx(4 + 2)
    for j in (1, 2, 3):
        assert fl.theta(j, 0.0) == 1.0
    x = 0.37
    assert fl.theta(1, x * x) == pytest.approx(np.tanh(x) / x, abs=1e-14)
    assert fl.theta(2, x * x) == pytest.approx(np.cosh(x), abs=1e-14)
    assert fl.theta(3, x * x) == pytest.approx(np.sinh(x) / x, abs=1e-14)
    # series branch agrees with the closed form across the switch
    for s in (1e-7, 1e-6, 2e-6):
        assert fl.theta(1, s) == pytest.approx(np.tanh(np.sqrt(s)) / np.sqrt(s), abs=1e-14)
    with pytest.raises(DomainError):
        fl.theta(4, 1.0)
    with pytest.raises(DomainError):
        fl.mu_eval(0.3, 1, 1.0, 1.0)


def test_theta1_derivative_bound():
    xs = np.linspace(0.0, 50.0, 2001)
    fitted = max(abs(fl.theta1_prime(x * x)) * (1 + x) ** 3 for x in xs)
    assert fitted < 3.0


def test_crucial_decay_inequality():
    rng = np.random.default_rng(9)
    ts = np.concatenate([np.linspace(0, 1, 11), np.geomspace(1, 100, 15)])
    worst = {1: 0.0, 2: 0.0, 3: 0.0}
    for _ in range(500):
        a = mc.random_sl2(rng, scale=rng.uniform(0.05, 2.0))
        r2 = mc.norm_sq(a)
        for t in ts:
            eps = fl.epsilon_t(a, float(t))
            rt2 = fl.r_t_sq(a, float(t))
            for q in (1, 2, 3):
                worst[q] = max(worst[q], eps * rt2 ** q * (1 + t * r2) ** q / r2 ** q)
    for q in (1, 2, 3):
        assert worst[q] <= 4.0


def test_flow_derivative_bound_probe():
    rng = np.random.default_rng(10)
    samples = rng.standard_normal((40, 6)) * 0.8
    times = np.array([0.0, 0.5, 2.0, 10.0])
    c0 = fl.flow_derivative_bound_probe((0, 0, 0, 0, 0, 0), samples, times)
    assert np.isfinite(c0) and c0 <= 1.0 + 1e-9  # |A_t| <= mu exactly at t=0
    c1 = fl.flow_derivative_bound_probe((1, 0, 0, 0, 0, 0), samples[:15], times)
    assert np.isfinite(c1)
    c2 = fl.flow_derivative_bound_probe((1, 1, 0, 0, 0, 0), samples[:8], times[:3])
    assert np.isfinite(c2)
    # stability under sample doubling
    c1b = fl.flow_derivative_bound_probe((1, 0, 0, 0, 0, 0), samples[:30], times)
    assert c1b <= 1.2 * max(c1, 1e-12) + 1e-9 or c1 <= 1.2 * c1b
    with pytest.raises(DomainError):
        fl.flow_derivative_bound_probe((1, 0, 0, 0, 0, 0), np.empty((0, 6)), times)
    with pytest.raises(DomainError):
        fl.flow_derivative_bound_probe((2, 1, 0, 0, 0, 0), samples, times)
