import numpy as np
import pytest

from sl2nash import foliation as fo
from sl2nash import nashmoser as nm
from sl2nash.errors import DomainError, FlowEscapeError, ProviderError
from sl2nash.numerics import fit_slope
from sl2nash.tensors import CONTRAVARIANT, FieldHandle, PointTensor, tuple_position


def test_derive_constants_worked_values():
    p = nm.derive_constants(nm.SlbTriple(1, 21, 167))
    assert (p.p, p.x_a, p.y_a, p.x_b, p.y_b, p.x_c, p.y_c, p.alpha) == \
        (169, 169, 28561, 2197, 371293, 338, 3712930, 1428050)
    floor = nm.derive_constants(nm.SlbTriple(0, 0, 0))
    assert (floor.p, floor.alpha) == (22, 24200)
    probe = nm.derive_constants(nm.SlbTriple(0, 5, 35))
    assert (probe.p, probe.alpha) == (36, 64800)


def test_derive_constants_monotone():
    base = nm.derive_constants(nm.SlbTriple(5, 30, 40)).p
    for bump in (nm.SlbTriple(6, 30, 40), nm.SlbTriple(5, 31, 40), nm.SlbTriple(5, 30, 41)):
        assert nm.derive_constants(bump).p >= base
    with pytest.raises(DomainError):
        nm.SlbTriple(-1, 0, 0)


def test_schedules():
    p = nm.derive_constants(nm.SlbTriple(1, 21, 167), r=1.0, big_r=2.0, t0=2.0)
    r0, t0, _ = nm.schedules(p, 0)
    assert r0 == 2.0 and t0 == 2.0
    r1, t1, _ = nm.schedules(p, 1)
    r2, t2, _ = nm.schedules(p, 2)
    assert r1 == 1.5 and abs(r2 - 4 / 3) < 1e-15
    assert abs(t1 - 2.8284271247461903) < 1e-12
    assert abs(t2 - 4.756828460010884) < 1e-12
    # exact geometric law in the log
    for i in range(1, 12):
        assert nm.schedules(p, i)[2] == pytest.approx(1.5 * nm.schedules(p, i - 1)[2],
                                                      rel=1e-15)
    assert nm.schedules(p, 80)[1] == float("inf")
    assert np.isfinite(nm.schedules(p, 80)[2])
    with pytest.raises(DomainError):
        nm.schedules(p, -1)


def test_ledger_exact_verdicts():
    p = nm.derive_constants(nm.SlbTriple(1, 21, 167))
    entries = nm.ledger_verify(p)
    assert all(e.passed for e in entries)
    by_name = {e.name: e for e in entries}
    # exact margins: alpha/2 - (13p^2+2p-1) = 714025 - 371630
    from fractions import Fraction
    assert by_name["13p^2+2p-1 < alpha/2"].margin == Fraction(714025 - 371630)
    # 264 p^2 = 7540104 vs 5 alpha = 7140250: margin (as stated) positive
    assert by_name["-132p^2 < -(5/2)alpha"].margin == \
        Fraction(132 * 169 ** 2) - Fraction(5 * 1428050, 2)
    assert by_name["x_a+p = x_c"].passed
    floor = nm.derive_constants(nm.SlbTriple(0, 0, 0))
    assert all(e.passed for e in nm.ledger_verify(floor))


def test_ledger_tampered_alpha_fails():
    p = nm.derive_constants(nm.SlbTriple(1, 21, 167))
    tampered = nm.ledger_verify(p, alpha=10 * p.p ** 2)
    failing = [e.name for e in tampered if not e.passed]
    assert "13p^2+2p-1 < alpha/2" in failing
    report = nm.ledger_report(tampered)
    assert report["passed"] is False


def test_maurer_cartan_examples():
    rng = np.random.default_rng(0)
    pts = [rng.standard_normal(6) for _ in range(10)]
    zero = FieldHandle(2, CONTRAVARIANT,
                       lambda q: PointTensor.zero(2, CONTRAVARIANT))
    assert all(nm.maurer_cartan_residual(zero, u).norm() == 0.0 for u in pts)
    for eps in (0.3, -1.7):
        scaled = FieldHandle(2, CONTRAVARIANT, lambda q, e=eps: e * fo.pi_field(1)(q),
                             jacobian=lambda q, e=eps: e * fo.pi_field(1).jacobian(q))
        assert all(nm.maurer_cartan_residual(scaled, u).norm() < 1e-10 for u in pts)

    def non_poisson(q):
        c = np.zeros(15)
        c[tuple_position(6, 2, (0, 1))] = q[2] ** 2
        c[tuple_position(6, 2, (2, 3))] = q[0]
        return PointTensor(2, CONTRAVARIANT, c)
    bad = FieldHandle(2, CONTRAVARIANT, non_poisson)
    assert max(nm.maurer_cartan_residual(bad, u).norm() for u in pts) > 0.1


def test_flow_of_field_identity_and_escape():
    zero = FieldHandle(1, CONTRAVARIANT, lambda q: PointTensor.zero(1, CONTRAVARIANT))
    pt = np.array([0.3, -0.2, 0.1, 0.4, 0.0, -0.5])
    rep = {}
    out = nm.flow_of_field(zero, pt, report=rep)
    assert np.array_equal(out, pt)
    assert rep["smallness_ok"]
    outward = FieldHandle(1, CONTRAVARIANT, lambda q: PointTensor.vector(10.0 * q))
    with pytest.raises(FlowEscapeError):
        nm.flow_of_field(outward, pt, outer_radius=1.0)


def _flat_rotation_field(eps):
    gen = np.zeros((6, 6))
    gen[0, 1], gen[1, 0] = -1.0, 1.0
    gen[3, 4], gen[4, 3] = 1.0, -1.0

    def ev(q):
        r2 = float(q @ q)
        env = np.exp(-1.0 / r2) if r2 > 1e-10 else 0.0
        return PointTensor.vector(eps * env * (gen @ q))
    return FieldHandle(1, CONTRAVARIANT, ev)


def test_displacement_scales_linearly():
    pt = np.array([0.5, -0.3, 0.4, 0.2, -0.5, 0.3])
    ratios = []
    for eps in (0.4, 0.2, 0.1):
        y = _flat_rotation_field(eps)
        disp = np.linalg.norm(nm.flow_of_field(y, pt, outer_radius=4.0) - pt)
        ratios.append(disp / np.linalg.norm(y(pt).components))
    assert max(ratios) / min(ratios) < 1.2


def test_pullback_quadratic_remainder():
    pt = np.array([0.5, -0.3, 0.4, 0.2, -0.5, 0.3])
    eps_list = (0.4, 0.2, 0.1, 0.05)
    resid = []
    for eps in eps_list:
        y = _flat_rotation_field(eps)
        flow_map = lambda q: nm.flow_of_field(y, q, outer_radius=6.0)
        pulled = nm.pullback_multivector(fo.pi_field(1), flow_map, pt)
        bracket = fo.schouten(y, fo.pi_field(1), pt)
        resid.append((pulled - fo.pi_field(1)(pt) - bracket).norm())
    slope = fit_slope(np.log(eps_list), np.log(resid))
    assert abs(slope - 2.0) <= 0.2


def test_iterate_step_zero_fixed_point():
    zero = FieldHandle(2, CONTRAVARIANT, lambda q: PointTensor.zero(2, CONTRAVARIANT))
    provider = lambda z: FieldHandle(1, CONTRAVARIANT,
                                     lambda q: PointTensor.zero(1, CONTRAVARIANT))
    state = nm.IterationState(z_field=zero)
    new = nm.iterate_step(state, provider)
    assert new.index == 1
    pt = np.array([0.4, 0.1, -0.2, 0.3, 0.2, -0.1])
    assert new.z_field(pt).norm() < 1e-9
    rec = new.history[-1]
    assert rec["sampled"] is True and rec["norm_z_0"] == 0.0


def test_cocycle_stub_no_op_and_rejection():
    rng = np.random.default_rng(1)
    samples = np.array([rng.standard_normal(6) * 0.7 for _ in range(5)])
    stub = nm.cocycle_homotopy_stub(samples)
    zc = FieldHandle(2, CONTRAVARIANT, lambda q: 0.05 * fo.pi_field(1)(q),
                     jacobian=lambda q: 0.05 * fo.pi_field(1).jacobian(q))
    state = nm.IterationState(z_field=zc)
    out = nm.iterate_step(state, stub)
    pt = samples[0]
    # the zero correction leaves the deviation untouched pointwise
    assert (out.z_field(pt) - zc(pt)).norm() < 1e-8

    def non_cocycle(q):
        c = np.zeros(15)
        c[tuple_position(6, 2, (0, 1))] = q[2] ** 2
        return PointTensor(2, CONTRAVARIANT, c)
    with pytest.raises(ProviderError):
        stub(FieldHandle(2, CONTRAVARIANT, non_cocycle))


def _toy_step(eps):
    from scipy.integrate import quad
    base = FieldHandle(2, CONTRAVARIANT,
                       lambda q: PointTensor(2, CONTRAVARIANT, np.array([1.0]), dim=2),
                       dim=2)

    def u(q):
        return eps * np.exp(-(q[0] ** 2 + q[1] ** 2))
    z = FieldHandle(2, CONTRAVARIANT,
                    lambda q: PointTensor(2, CONTRAVARIANT, np.array([u(q)]), dim=2),
                    dim=2)

    def x_eval(q):
        val, _ = quad(lambda s: u(np.array([s, q[1]])), 0.0, q[0], epsabs=1e-12, limit=200)
        return PointTensor.vector(np.array([val, 0.0]), dim=2)
    provider = lambda zf: FieldHandle(1, CONTRAVARIANT, x_eval, dim=2)
    state = nm.IterationState(z_field=z, params=nm.derive_constants(nm.SlbTriple(0, 0, 0)))
    return nm.iterate_step(state, provider, base_bivector=base).history[-1]


def test_synthetic_contraction_is_quadratic():
    records = {eps: _toy_step(eps) for eps in (0.2, 0.1)}
    for eps, rec in records.items():
        assert rec["norm_z_next_0"] <= 0.6 * rec["norm_z_0"] ** 2
    # ledger diagnostics present and labeled
    rec = records[0.2]
    assert {"i", "r_i", "log_t_i", "sampled", "norm_x_0"} <= set(rec)


def test_scaling_trick_exact_for_linear_structure():
    rng = np.random.default_rng(2)
    for _ in range(10):
        u = rng.standard_normal(6)
        for factor in (0.5, 2.0):
            assert nm.scaling_invariance_residual(fo.pi_field(1), u, factor) == 0.0


def test_sampled_norm_guardrails():
    zero = FieldHandle(1, CONTRAVARIANT, lambda q: PointTensor.zero(1, CONTRAVARIANT))
    assert nm.sampled_weighted_norm(zero, 0, 0, 1.0) == 0.0
    with pytest.raises(DomainError):
        nm.sampled_weighted_norm(zero, 2, 0, 1.0)
