import numpy as np
import pytest

from sl2nash import matrixcore as mc
from sl2nash import skeleton as sk
from sl2nash.errors import DomainError

NILPOTENT = mc.from_coords((0, -0.5, -0.5j))


def test_membership_examples():
    assert sk.is_skeleton(mc.from_coords((1, 0, 0)), 1e-10)
    assert sk.is_skeleton(np.zeros((2, 2), dtype=complex), 1e-10)
    assert not sk.is_skeleton(NILPOTENT, 1e-10)


def test_characterizations_agree_on_samples():
    rng = np.random.default_rng(0)
    for _ in range(10_000):
        a = mc.random_sl2(rng, scale=rng.uniform(0.1, 2.0))
        res = sk.membership_residuals(a)
        commuting = res["commutator"] < 1e-8
        fiber = res["norm_vs_fiber"] < 1e-8
        gram = res["aah_vs_fiber"] < 1e-8
        assert commuting == fiber == gram


def test_retract_fixes_skeleton_and_kills_cone():
    a = mc.from_coords((1.5, 0, 0))
    assert mc.frob(sk.retract(a) - a) < 1e-12
    assert np.array_equal(sk.retract(NILPOTENT), np.zeros((2, 2)))


def test_retract_properties_random():
    rng = np.random.default_rng(1)
    for _ in range(300):
        a = mc.random_sl2(rng, scale=rng.uniform(0.2, 2.0))
        f = mc.casimir(a)
        r = sk.retract(a)
        assert abs(mc.casimir(r) - f) < 1e-12 * (1 + abs(f))
        assert abs(mc.norm_sq(r) - 2 * abs(f)) < 1e-10 * (1 + abs(f))
        assert sk.is_skeleton(r, 1e-10)
        assert mc.frob(sk.retract(r) - r) < 1e-10 * (1 + mc.frob(r))


def test_retract_equivariance():
    rng = np.random.default_rng(2)
    nodes = mc.su2_haar(2)
    for _ in range(50):
        a = mc.random_sl2(rng)
        u = nodes[int(rng.integers(len(nodes)))][0]
        lhs = sk.retract(mc.adjoint(u, a))
        rhs = mc.adjoint(u, sk.retract(a))
        assert mc.frob(lhs - rhs) < 1e-10 * (1 + mc.frob(rhs))


def test_retract_near_cone_stability():
    # tiny determinant exercises the eigenbasis branch where the raw
    # square-root formula loses digits
    rng = np.random.default_rng(3)
    for f_target in (1e-6, 1e-10, 1e-13):
        a = mc.from_coords((np.sqrt(f_target + 0j), -0.5, -0.5j))
        r = sk.retract(a)
        assert np.isfinite(r).all()
        assert abs(mc.norm_sq(r) - 2 * abs(mc.casimir(a))) < 1e-10


def test_rho_examples():
    m = sk.rho(np.array([1.0, 0, 0]), 2.0)
    assert np.allclose(m, np.diag([2j, -2j]))
    assert abs(mc.casimir(m) - 4.0) < 1e-14
    lam = 0.7 - 0.2j
    m2 = sk.rho(np.array([0, 0, 1.0]), lam)
    assert np.allclose(m2, np.array([[0, 1j * lam], [1j * lam, 0]]))
    assert abs(mc.casimir(m2) - lam * lam) < 1e-14
    assert sk.is_skeleton(m2, 1e-10)


def test_rho_antipode_and_rejection():
    rng = np.random.default_rng(4)
    w = rng.standard_normal(3)
    w /= np.linalg.norm(w)
    lam = 1.1 + 0.3j
    assert np.array_equal(sk.rho(w, lam), sk.rho(-w, -lam))
    with pytest.raises(DomainError):
        sk.rho(np.array([1.0, 1.0, 0.0]), 1.0)


def test_hopf_examples_and_consistency():
    assert np.allclose(sk.hopf(np.eye(2, dtype=complex)), [1, 0, 0])
    u = np.array([[0, 1], [-1, 0]], dtype=complex)
    assert np.allclose(sk.hopf(u), [-1, 0, 0])
    rng = np.random.default_rng(5)
    for _ in range(200):
        q = rng.standard_normal(4)
        q /= np.linalg.norm(q)
        u = np.array([[q[0] + 1j * q[1], q[2] + 1j * q[3]],
                      [-q[2] + 1j * q[3], q[0] - 1j * q[1]]])
        w = sk.hopf(u)
        assert abs(np.linalg.norm(w) - 1.0) < 1e-12
        # conjugating the diagonal generator reproduces the sphere map point
        lam = complex(rng.standard_normal(), rng.standard_normal())
        direct = u @ np.diag([1j * lam, -1j * lam]) @ u.conj().T
        assert mc.frob(direct - sk.rho(w, lam)) < 1e-12 * (1 + abs(lam))
