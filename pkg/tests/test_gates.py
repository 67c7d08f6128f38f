import math

import numpy as np
import pytest

from darkpath.gates import (
    average_fidelity,
    benchmark_states,
    dark_path_state,
    gate_pair_labels,
    holonomy_check,
    ideal_controlled_gate,
    ideal_rotation,
)
from darkpath.hamiltonians import product_basis
from darkpath.linalg import DensityMatrix, Ket
from darkpath.pulses import GateSpec, LoopShape, bright_state, dark_state_D1, make_schedule

CNOT = GateSpec(math.pi / 2, 0.0, math.pi)
CZ = GateSpec(0.0, 0.0, math.pi)
CCNOT = GateSpec(math.pi / 2, 0.0, math.pi, n_controls=2)
B2 = product_basis(2)
B3 = product_basis(3)


def test_ideal_rotation_cnot_is_not_block():
    np.testing.assert_allclose(ideal_rotation(CNOT).entries, [[0, 1], [1, 0]], atol=1e-15)


def test_ideal_rotation_cz_is_z_block():
    np.testing.assert_allclose(ideal_rotation(CZ).entries, np.diag([1.0, -1.0]), atol=1e-15)


def test_ideal_rotation_trivial_angle():
    np.testing.assert_allclose(ideal_rotation(GateSpec(0.7, 0.2, 0.0)).entries, np.eye(2), atol=1e-15)


def test_ideal_rotation_equals_projector_form():
    # U = |D1><D1| + e^{i gamma} |b><b| on the computational pair
    rng = np.random.default_rng(21)
    for _ in range(20):
        gate = GateSpec(
            rng.uniform(0, math.pi), rng.uniform(-math.pi, math.pi), rng.uniform(-math.pi, math.pi)
        )
        d1 = dark_state_D1(gate).amplitudes
        b = bright_state(gate).amplitudes
        want = np.outer(d1, d1.conj()) + np.exp(1j * gate.gamma) * np.outer(b, b.conj())
        np.testing.assert_allclose(ideal_rotation(gate).entries, want, atol=1e-12)


def test_ideal_controlled_gate_mappings():
    u = ideal_controlled_gate(CNOT, 2)
    assert u.element("g0", "g0") == 1.0
    assert u.element("e1", "e0") == pytest.approx(1.0, abs=1e-15)
    assert u.element("e0", "e0") == pytest.approx(0.0, abs=1e-15)
    assert u.is_unitary(1e-12)
    u3 = ideal_controlled_gate(CCNOT, 3)
    assert u3.element("ge0", "ge0") == 1.0
    assert u3.element("ee0", "ee1") == pytest.approx(1.0, abs=1e-15)
    np.testing.assert_allclose(
        ideal_controlled_gate(GateSpec(0.3, 0.1, 0.0), 2).entries, np.eye(6), atol=1e-15
    )


def test_ideal_controlled_gate_block_structure():
    u = ideal_controlled_gate(CNOT, 2).entries
    pair = [B2.index(x) for x in gate_pair_labels(2)]
    proj = np.zeros((6, 6))
    for i in pair:
        proj[i, i] = 1.0
    np.testing.assert_array_equal(u @ proj, proj @ u)
    others = [i for i in range(6) if i not in pair]
    np.testing.assert_array_equal(u[np.ix_(others, others)], np.eye(4))
    # no amplitude into or out of the target Rydberg levels
    for lab in ("gr", "er"):
        k = B2.index(lab)
        col = np.zeros(6)
        col[k] = 1.0
        np.testing.assert_array_equal(u @ col, col)


def test_benchmark_states_two_atoms():
    bench = benchmark_states(2)
    assert len(bench.states) == 36
    np.testing.assert_array_equal(bench.states[0].amplitudes, np.eye(6)[B2.index("g0")])
    for s in bench.states:
        assert s.is_normalized(1e-12)
        assert abs(s.amplitudes[B2.index("gr")]) == 0.0
        assert abs(s.amplitudes[B2.index("er")]) == 0.0


def test_benchmark_states_three_atoms():
    bench = benchmark_states(3)
    assert len(bench.states) == 64
    want = np.zeros(12, dtype=complex)
    want[B3.index("ge1")] = 1.0 / math.sqrt(2.0)
    want[B3.index("ee1")] = -1.0 / math.sqrt(2.0)
    assert any(np.allclose(s.amplitudes, want, atol=1e-15) for s in bench.states)
    for s in bench.states:
        assert s.is_normalized(1e-12)


def test_benchmark_states_deterministic():
    a, b = benchmark_states(2), benchmark_states(2)
    for x, y in zip(a.states, b.states):
        np.testing.assert_array_equal(x.amplitudes, y.amplitudes)


def test_benchmark_states_larger_chain():
    bench = benchmark_states(4)
    assert len(bench.states) == 256  # four states per atom, four atoms


def test_average_fidelity_perfect_gate():
    bench = benchmark_states(2)
    u = ideal_controlled_gate(CNOT, 2)
    finals = [
        DensityMatrix.from_ket(Ket(u.entries @ s.amplitudes, B2)) for s in bench.states
    ]
    rep = average_fidelity(finals, u, bench)
    assert rep.average == pytest.approx(1.0, abs=1e-12)
    assert rep.minimum == pytest.approx(1.0, abs=1e-12)


def test_average_fidelity_maximally_mixed():
    bench = benchmark_states(2)
    u = ideal_controlled_gate(CNOT, 2)
    mixed = DensityMatrix(np.eye(6) / 6.0, B2)
    rep = average_fidelity([mixed] * 36, u, bench)
    assert rep.average == pytest.approx(1.0 / 6.0, abs=1e-12)
    assert all(f == pytest.approx(1.0 / 6.0, abs=1e-12) for f in rep.per_state)


def test_average_fidelity_count_mismatch():
    bench = benchmark_states(2)
    u = ideal_controlled_gate(CNOT, 2)
    with pytest.raises(ValueError):
        average_fidelity([DensityMatrix(np.eye(6) / 6.0, B2)], u, bench)


def test_average_fidelity_imaginary_residue_guard():
    bench = benchmark_states(2)
    u = ideal_controlled_gate(GateSpec(0.3, 0.0, 0.0), 2)  # identity gate
    m = np.eye(6, dtype=complex) / 6.0
    # asymmetric perturbation just inside the density-matrix Hermiticity
    # tolerance, large enough to push the quadratic form off the real axis
    for i in range(6):
        for j in range(i + 1, 6):
            m[i, j] += 0.9e-10j
    rho = DensityMatrix(m, B2)
    with pytest.raises(ValueError, match="residue"):
        average_fidelity([rho] * 36, u, bench)


def test_holonomy_check_cnot_and_trivial():
    sched = make_schedule(LoopShape(1.0, 4.0), CNOT)
    block, dev = holonomy_check(sched)
    assert dev <= 1e-4
    np.testing.assert_allclose(block.entries, [[0, 1], [1, 0]], atol=1e-4)
    sched0 = make_schedule(LoopShape(1.0, 2.0), GateSpec(0.9, -0.4, 0.0))
    _, dev0 = holonomy_check(sched0)
    assert dev0 <= 1e-4


def test_holonomy_check_three_atoms():
    sched = make_schedule(LoopShape(1.0, 4.0), CCNOT)
    _, dev = holonomy_check(sched, n_atoms=3)
    assert dev <= 1e-4


def test_holonomy_random_draws():
    rng = np.random.default_rng(14)
    worst = 0.0
    for _ in range(8):
        gate = GateSpec(
            rng.uniform(0, math.pi), rng.uniform(-math.pi, math.pi), rng.uniform(-math.pi, math.pi)
        )
        eta = float(rng.choice([0.0, 2.0, 4.0, 6.0]))
        _, dev = holonomy_check(make_schedule(LoopShape(1.0, eta), gate))
        worst = max(worst, dev)
    assert worst <= 1e-4


def test_dark_path_state_embedding():
    sched = make_schedule(LoopShape(1.0, 4.0), CNOT)
    psi = dark_path_state(sched, 0.5)
    assert psi.amplitudes[B2.index("er")] == pytest.approx(-1.0j, abs=1e-12)
    psi3 = dark_path_state(make_schedule(LoopShape(1.0, 4.0), CCNOT), 0.5, n_atoms=3)
    assert psi3.amplitudes[B3.index("eer")] == pytest.approx(-1.0j, abs=1e-12)
