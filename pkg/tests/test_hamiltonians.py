import math
import warnings

import numpy as np
import pytest

from darkpath.hamiltonians import (
    ChainSpec,
    DriveErrors,
    NoiseSpec,
    ThreeAtomSpec,
    TwoAtomSpec,
    channels_2,
    channels_3,
    channels_N,
    h_eff_2,
    h_eff_3,
    h_eff_N,
    h_full_2,
    h_full_3,
    h_full_N,
    h_rot_2,
    h_rot_3,
    product_basis,
    vdw_strength,
)
from darkpath.pulses import GateSpec, LoopShape, bright_state, dark_state_D1, make_schedule

CNOT = GateSpec(math.pi / 2, 0.0, math.pi)
CCNOT = GateSpec(math.pi / 2, 0.0, math.pi, n_controls=2)
B2 = product_basis(2)
B3 = product_basis(3)


class ZeroDrive:
    """Stand-in schedule with all drives off (for frame-consistency checks)."""

    peak = 0.0

    def drive_at(self, t):
        return (0.0, 0.0, 0.0, 0.0, 0.0, 0.0)


def spec2(delta=80.0):
    return TwoAtomSpec(delta=delta, u12=delta)


def spec3(delta=200.0, u12=0.0):
    u13 = 0.5 * (delta - u12)
    return ThreeAtomSpec(delta=delta, u12=u12, u13=u13, u23=u13)


def sched2(eta=4.0, gate=CNOT):
    return make_schedule(LoopShape(1.0, eta), gate)


def idx(basis, label):
    return basis.index(label)


def test_basis_ordering_convention():
    assert B2 == ("g0", "g1", "gr", "e0", "e1", "er")
    assert B3[:6] == ("gg0", "gg1", "ggr", "ge0", "ge1", "ger")
    assert B3[6:] == ("eg0", "eg1", "egr", "ee0", "ee1", "eer")


def test_full_2_drives_off_leaves_interaction_projector():
    h = h_full_2(spec2(), ZeroDrive())
    m = h.matrix(0.37)
    expected = np.zeros((6, 6), dtype=complex)
    expected[idx(B2, "er"), idx(B2, "er")] = 80.0
    np.testing.assert_allclose(m, expected, atol=1e-15)


def test_full_2_matrix_elements():
    sched = sched2()
    errs = DriveErrors(epsilon=0.07, alpha=-0.03)
    delta = 80.0
    h = h_full_2(spec2(delta), sched, errs)
    t = 0.21
    omega, omega0, omega1, omega2, p1, p2 = sched.drive_at(t)
    m = h.matrix(t)
    got = m[idx(B2, "e0"), idx(B2, "g0")]
    assert got == pytest.approx((1 + 0.07) * omega0 * np.exp(-1j * delta * t), rel=1e-12)
    got = m[idx(B2, "gr"), idx(B2, "g1")]
    want = (1 + 0.07) * (1 - 0.03) * omega2 * np.exp(-1j * (delta * t + p2))
    assert got == pytest.approx(want, rel=1e-12)
    got = m[idx(B2, "er"), idx(B2, "e0")]
    want = (1 + 0.07) * (1 - 0.03) * omega1 * np.exp(-1j * (delta * t + p1))
    assert got == pytest.approx(want, rel=1e-12)


def test_rot_2_matrix_elements():
    sched = sched2()
    errs = DriveErrors(epsilon=0.05, alpha=0.02)
    delta = 80.0
    h = h_rot_2(spec2(delta), sched, errs)
    t = 0.33
    omega, omega0, omega1, omega2, p1, p2 = sched.drive_at(t)
    m = h.matrix(t)
    got = m[idx(B2, "er"), idx(B2, "gr")]
    want = 1.05 * omega0 * np.exp(-1j * delta * t) * np.exp(1j * delta * t)
    assert got == pytest.approx(want, rel=1e-12)  # static when u12 = delta
    got = m[idx(B2, "gr"), idx(B2, "g0")]
    want = 1.05 * 1.02 * omega1 * np.exp(-1j * (delta * t + p1))
    assert got == pytest.approx(want, rel=1e-12)


def test_rot_2_equals_full_minus_projector_at_t0():
    sched = sched2()
    full = h_full_2(spec2(), sched).matrix(0.0)
    rot = h_rot_2(spec2(), sched).matrix(0.0)
    proj = np.zeros((6, 6))
    proj[idx(B2, "er"), idx(B2, "er")] = 80.0
    np.testing.assert_allclose(rot, full - proj, atol=1e-12)


def test_eff_2_standard_limit_and_support():
    sched0 = sched2(eta=0.0)
    h = h_eff_2(sched0)
    t = 0.2
    m = h.matrix(t)
    assert m[idx(B2, "er"), idx(B2, "gr")] == 0.0  # no control drive at eta = 0
    h4 = h_eff_2(sched2())
    g0 = np.eye(6)[idx(B2, "g0")]
    for t in (0.1, 0.3, 0.45):
        np.testing.assert_array_equal(h4.matrix(t) @ g0, np.zeros(6))


def test_eff_2_dark_bright_rotation():
    # rotating (e0, e1) into (b, D1) must leave Omega e^{i phi2} |b><er| +
    # Omega0 |gr><er| + h.c., with the dark state fully decoupled
    gate = GateSpec(1.1, 0.6, 2.0)
    sched = make_schedule(LoopShape(1.0, 3.0), gate)
    h = h_eff_2(sched)
    b, d1 = bright_state(gate), dark_state_D1(gate)
    w = np.eye(6, dtype=complex)
    w[:, 3] = 0.0
    w[:, 4] = 0.0
    w[[idx(B2, "e0"), idx(B2, "e1")], 3] = b.amplitudes
    w[[idx(B2, "e0"), idx(B2, "e1")], 4] = d1.amplitudes
    for t in (0.12, 0.31, 0.72):
        omega, omega0, *_ , p2 = sched.drive_at(t)
        m = w.conj().T @ h.matrix(t) @ w
        assert m[3, 5] == pytest.approx(omega * np.exp(1j * p2), rel=1e-12)
        assert m[2, 5] == pytest.approx(omega0, rel=1e-12)
        np.testing.assert_allclose(m[4, :], np.zeros(6), atol=1e-12)


def test_full_3_interaction_energies():
    spec = ThreeAtomSpec(200.0, 10.0, 95.0, 95.0)
    h = h_full_3(spec, ZeroDrive())
    m = h.matrix(0.0)
    assert m[idx(B3, "eer"), idx(B3, "eer")] == pytest.approx(10.0 + 95.0 + 95.0)
    assert m[idx(B3, "egr"), idx(B3, "egr")] == pytest.approx(95.0)
    assert m[idx(B3, "ger"), idx(B3, "ger")] == pytest.approx(95.0)
    assert m[idx(B3, "ee0"), idx(B3, "ee0")] == pytest.approx(10.0)
    assert m[idx(B3, "gg0"), idx(B3, "gg0")] == 0.0


def test_full_3_second_control_undriven():
    sched = make_schedule(LoopShape(1.0, 4.0), CCNOT)
    h = h_full_3(spec3(), sched)
    m = h.matrix(0.27)
    for a, b in [("gg0", "ge0"), ("ggr", "ger"), ("eg1", "ee1"), ("egr", "eer")]:
        assert m[idx(B3, a), idx(B3, b)] == 0.0
        assert m[idx(B3, b), idx(B3, a)] == 0.0


def test_rot_3_printed_phase_factors():
    delta, u12 = 200.0, 14.0
    u13 = 0.5 * (delta - u12)
    spec = ThreeAtomSpec(delta, u12, u13, u13)
    sched = make_schedule(LoopShape(1.0, 4.0), CCNOT)
    errs = DriveErrors(0.04, -0.05)
    h = h_rot_3(spec, sched, errs)
    t = 0.19
    omega, omega0, omega1, omega2, p1, p2 = sched.drive_at(t)
    m = h.matrix(t)
    usum = u12 + 2 * u13
    got = m[idx(B3, "eer"), idx(B3, "ger")]
    want = 1.04 * omega0 * np.exp(-1j * delta * t) * np.exp(1j * usum * t)
    assert got == pytest.approx(want, rel=1e-12)
    got = m[idx(B3, "ggr"), idx(B3, "gg0")]
    want = 1.04 * 0.95 * omega1 * np.exp(-1j * (delta * t + p1))
    assert got == pytest.approx(want, rel=1e-12)
    got = m[idx(B3, "ger"), idx(B3, "ge1")]
    want = 1.04 * 0.95 * omega2 * np.exp(-1j * (delta * t + p2)) * np.exp(1j * spec.u23 * t)
    assert got == pytest.approx(want, rel=1e-12)
    got = m[idx(B3, "ee0"), idx(B3, "ge0")]
    want = 1.04 * omega0 * np.exp(-1j * delta * t) * np.exp(1j * u12 * t)
    assert got == pytest.approx(want, rel=1e-12)


def test_rot_3_equals_full_minus_interaction_at_t0():
    spec = spec3(200.0, 12.0)
    sched = make_schedule(LoopShape(1.0, 2.0), CCNOT)
    full = h_full_3(spec, sched).matrix(0.0)
    rot = h_rot_3(spec, sched).matrix(0.0)
    hi = h_full_3(spec, ZeroDrive()).matrix(0.0)
    np.testing.assert_allclose(rot, full - hi, atol=1e-12)


def test_eff_3_support_and_elements():
    sched = make_schedule(LoopShape(1.0, 4.0), CCNOT)
    errs = DriveErrors(0.02, 0.0)
    h = h_eff_3(sched, errs)
    t = 0.23
    omega, omega0, *_ = sched.drive_at(t)
    m = h.matrix(t)
    assert m[idx(B3, "eer"), idx(B3, "ger")] == pytest.approx(1.02 * omega0, rel=1e-12)
    for label in ("gg0", "gg1", "ggr", "ge0", "ge1", "eg0", "eg1", "egr"):
        col = np.eye(12)[idx(B3, label)]
        np.testing.assert_array_equal(m @ col, np.zeros(12))


def test_chain_reduces_to_two_and_three_atoms():
    rng = np.random.default_rng(4)
    sched = sched2()
    v = 80.0
    h2 = h_full_2(TwoAtomSpec(80.0, v), sched)
    hn2 = h_full_N(ChainSpec(2, 80.0, v), sched)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        h3 = h_full_3(ThreeAtomSpec(200.0, 0.0, 100.0, 100.0), sched)
        hn3 = h_full_N(ChainSpec(3, 200.0, 100.0), sched)
    for t in rng.uniform(0.0, 1.0, size=10):
        np.testing.assert_allclose(hn2.matrix(t), h2.matrix(t), atol=1e-14)
        np.testing.assert_allclose(hn3.matrix(t), h3.matrix(t), atol=1e-14)


def test_chain_interaction_counts_excited_controls():
    h = h_full_N(ChainSpec(4, 300.0, 100.0), ZeroDrive())
    basis = product_basis(4)
    m = h.matrix(0.0)
    assert m[basis.index("eeer"), basis.index("eeer")] == pytest.approx(300.0)
    assert m[basis.index("eger"), basis.index("eger")] == pytest.approx(200.0)
    assert m[basis.index("gge0"), basis.index("gge0")] == 0.0
    with pytest.raises(ValueError):
        h_full_N(ChainSpec(7, 600.0, 100.0), ZeroDrive())


def test_eff_N_matches_eff_3_on_relabeled_support():
    sched = make_schedule(LoopShape(1.0, 4.0), CCNOT)
    hn = h_eff_N(sched, n_atoms=3)
    h3 = h_eff_3(sched)
    for t in (0.11, 0.41):
        np.testing.assert_allclose(hn.matrix(t), h3.matrix(t), atol=1e-15)


def test_hermiticity_at_random_times():
    rng = np.random.default_rng(17)
    sched = sched2()
    sched3 = make_schedule(LoopShape(1.0, 4.0), CCNOT)
    builders = [
        h_full_2(spec2(), sched, DriveErrors(0.1, -0.1)),
        h_rot_2(spec2(), sched, DriveErrors(-0.2, 0.2)),
        h_eff_2(sched),
        h_full_3(spec3(), sched3),
        h_rot_3(spec3(), sched3),
        h_eff_3(sched3),
        h_full_N(ChainSpec(4, 300.0, 100.0), sched3),
        h_eff_N(sched3, n_atoms=4),
    ]
    for h in builders:
        for t in rng.uniform(0.0, 1.0, size=100):
            m = h.matrix(float(t))
            assert np.abs(m - m.conj().T).max() <= 1e-12


def test_validity_regime_warnings():
    with pytest.warns(UserWarning):
        TwoAtomSpec(delta=100.0, u12=80.0)
    with pytest.warns(UserWarning):
        ThreeAtomSpec(delta=200.0, u12=0.0, u13=80.0, u23=80.0)
    with pytest.warns(UserWarning):
        ChainSpec(n_atoms=3, delta=200.0, v=80.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        TwoAtomSpec(delta=100.0, u12=100.0)
        ThreeAtomSpec(delta=200.0, u12=10.0, u13=95.0, u23=95.0)
        ChainSpec(n_atoms=3, delta=200.0, v=100.0)


def test_channels_2_printed_prefactor_table():
    noise = NoiseSpec(kappa=0.3, kappa_z=0.7)
    chans = channels_2(noise)
    assert len(chans) == 5
    assert [c.rate_prefactor for c in chans] == pytest.approx([0.15, 0.35, 0.075, 0.075, 0.35])
    lower = np.zeros((6, 6))
    for a, b in (("g0", "e0"), ("g1", "e1"), ("gr", "er")):
        lower[idx(B2, a), idx(B2, b)] = 1.0
    np.testing.assert_array_equal(chans[0].jump.entries, lower)
    zc = np.diag([1.0, 1.0, 1.0, -1.0, -1.0, -1.0])
    np.testing.assert_array_equal(chans[1].jump.entries, zc)
    to0 = np.zeros((6, 6))
    to0[idx(B2, "g0"), idx(B2, "gr")] = 1.0
    to0[idx(B2, "e0"), idx(B2, "er")] = 1.0
    np.testing.assert_array_equal(chans[2].jump.entries, to0)
    zt = np.diag([1.0, 1.0, -1.0, 1.0, 1.0, -1.0])
    np.testing.assert_array_equal(chans[4].jump.entries, zt)


def test_channels_2_default_target_split():
    chans = channels_2(NoiseSpec(kappa=1.0, kappa_z=0.0))
    # kappa0 = kappa1 = kappa/2 gives kappa/4 prefactors on the branch decays
    assert chans[2].rate_prefactor == pytest.approx(0.25)
    assert chans[3].rate_prefactor == pytest.approx(0.25)


def test_channels_3_structure():
    noise = NoiseSpec(kappa=1.0, kappa_z=0.4)
    chans = channels_3(noise)
    assert len(chans) == 7
    assert [c.rate_prefactor for c in chans] == pytest.approx(
        [0.5, 0.2, 0.5, 0.2, 0.25, 0.25, 0.2]
    )
    # second-control decay flips only the middle letter
    m = chans[2].jump.entries
    assert m[idx(B3, "gg0"), idx(B3, "ge0")] == 1.0
    assert m[idx(B3, "eg1"), idx(B3, "ee1")] == 1.0
    assert m.sum() == 6.0


def test_channels_N_reduces_to_2_and_3():
    noise = NoiseSpec(kappa=0.8, kappa_z=0.3)
    for builder, n in ((channels_2, 2), (channels_3, 3)):
        direct = builder(noise)
        chained = channels_N(noise, n)
        assert len(direct) == len(chained)
        for a, b in zip(direct, chained):
            assert a.rate_prefactor == b.rate_prefactor
            np.testing.assert_array_equal(a.jump.entries, b.jump.entries)


def test_zero_rates_give_trivial_dissipator():
    chans = channels_2(NoiseSpec(kappa=0.0, kappa_z=0.0))
    assert len(chans) == 5
    assert all(c.rate_prefactor == 0.0 for c in chans)


def test_vdw_strength():
    assert vdw_strength(64.0, 2.0) == pytest.approx(1.0)
    assert vdw_strength(1.0e5, 1.0) == pytest.approx(1.0e5)
    # doubling the distance divides the coupling by 64
    assert vdw_strength(1.0e5, 2.0) == pytest.approx(1.0e5 / 64.0)
    # a 10 MHz coupling with C6/2pi = 1e5 GHz um^6 needs d = 10^(7/6) um
    d = 10.0 ** (7.0 / 6.0)
    assert vdw_strength(1.0e8, d) == pytest.approx(10.0, rel=1e-12)  # MHz units
    with pytest.raises(ValueError):
        vdw_strength(1.0, 0.0)
