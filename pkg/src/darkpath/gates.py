"""Ideal controlled gates, benchmark states and average-fidelity evaluation.

The target holonomy on the fully-triggered pair (all controls in the
Rydberg level, target in the qubit pair) is

    U(theta, phi, gamma) = e^{i gamma/2} (cos(gamma/2) I - i sin(gamma/2) A),
    A = [[cos(theta),               sin(theta) e^{+i phi}],
         [sin(theta) e^{-i phi},   -cos(theta)          ]]

in the ordered (|..0>, |..1>) basis.  A is exactly the projector
difference |D1><D1| - |b><b| of the dark/bright pair, so the composed
two-segment loop |D1><D1| + e^{i gamma} |b><b| reproduces this matrix;
``holonomy_check`` asserts that numerically rather than assuming it.
CNOT is (pi/2, 0, pi) and CZ is (0, 0, pi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from . import hamiltonians as ham
from .dynamics import StepPolicy, propagator
from .linalg import DensityMatrix, Ket, Operator, embed
from .pulses import GateSpec, PulseSchedule, bright_state, dark_path_D2, dark_state_D1

__all__ = [
    "BenchmarkSet",
    "FidelityReport",
    "ideal_rotation",
    "ideal_controlled_gate",
    "benchmark_states",
    "average_fidelity",
    "holonomy_check",
    "dark_path_state",
    "gate_pair_labels",
]

FIDELITY_SLACK = 1e-9
IMAG_RESIDUE_LIMIT = 1e-10

# Single-atom benchmark amplitudes, in the printed order.  Two-qubit sweeps
# use all six per atom; three-qubit (and larger) sweeps the first four.
_R2 = 1.0 / math.sqrt(2.0)
_CONTROL_STATES = (
    ("g", (1.0, 0.0)),
    ("e", (0.0, 1.0)),
    ("g+e", (_R2, _R2)),
    ("g-e", (_R2, -_R2)),
    ("g+ie", (_R2, 1j * _R2)),
    ("g-ie", (_R2, -1j * _R2)),
)
_TARGET_STATES = (
    ("0", (1.0, 0.0, 0.0)),
    ("1", (0.0, 1.0, 0.0)),
    ("0+1", (_R2, _R2, 0.0)),
    ("0-1", (_R2, -_R2, 0.0)),
    ("0+i1", (_R2, 1j * _R2, 0.0)),
    ("0-i1", (_R2, -1j * _R2, 0.0)),
)


@dataclass(frozen=True)
class BenchmarkSet:
    """Deterministic product-state set used by the average-fidelity protocol."""

    states: tuple[Ket, ...]
    description: str


@dataclass(frozen=True)
class FidelityReport:
    """Per-benchmark-state and averaged fidelities with run metadata."""

    per_state: tuple[float, ...]
    average: float
    gate: Optional[GateSpec] = None
    model_kind: Optional[str] = None
    errors: Optional[ham.DriveErrors] = None
    noise: Optional[ham.NoiseSpec] = None
    calibration: Optional[tuple[float, float, Optional[float]]] = None

    def __post_init__(self):
        for f in self.per_state:
            if not -FIDELITY_SLACK <= f <= 1.0 + FIDELITY_SLACK:
                raise ValueError(f"fidelity {f} outside [0, 1]")
        mean = sum(self.per_state) / len(self.per_state)
        if abs(mean - self.average) > 1e-12:
            raise ValueError("average does not match the per-state mean")

    @property
    def minimum(self) -> float:
        return min(self.per_state)


def ideal_rotation(gate: GateSpec) -> Operator:
    """2x2 holonomy block on the ordered (|..0>, |..1>) pair."""
    half = 0.5 * gate.gamma
    st, ct = math.sin(gate.theta), math.cos(gate.theta)
    axis = np.array(
        [
            [ct, st * np.exp(1j * gate.phi)],
            [st * np.exp(-1j * gate.phi), -ct],
        ]
    )
    u = np.exp(1j * half) * (math.cos(half) * np.eye(2) - 1j * math.sin(half) * axis)
    return Operator(u, ("0", "1"))


def gate_pair_labels(n_atoms: int) -> tuple[str, str]:
    """Labels of the fully-triggered pair, e.g. ('e0', 'e1') or ('ee0', 'ee1')."""
    controls = "e" * (n_atoms - 1)
    return controls + "0", controls + "1"


def ideal_controlled_gate(
    gate: GateSpec, n_atoms: int, full_basis: Optional[Iterable[str]] = None
) -> Operator:
    """Rotation on the fully-triggered pair, identity on every other level.

    The gate never transfers amplitude into or out of the target Rydberg
    level; it commutes with the projector onto the triggered pair.
    """
    basis = tuple(full_basis) if full_basis is not None else ham.product_basis(n_atoms)
    return embed(ideal_rotation(gate), gate_pair_labels(n_atoms), basis)


def benchmark_states(n_atoms: int) -> BenchmarkSet:
    """Cartesian product of the per-atom state lists, lexicographic order.

    Two atoms: six states per atom, 36 products.  Three atoms: four per
    atom, 64 products.  Larger chains reuse the four-state lists, giving
    4**N products.
    """
    basis = ham.product_basis(n_atoms)
    if n_atoms == 2:
        controls, targets = _CONTROL_STATES, _TARGET_STATES
    else:
        controls, targets = _CONTROL_STATES[:4], _TARGET_STATES[:4]

    states = []
    names = []
    from itertools import product as iproduct

    for parts in iproduct(controls, repeat=n_atoms - 1):
        for tname, tvec in targets:
            amps = np.array([1.0 + 0j])
            for _, cvec in parts:
                amps = np.kron(amps, np.array(cvec, dtype=complex))
            amps = np.kron(amps, np.array(tvec, dtype=complex))
            states.append(Ket(amps, basis))
            names.append(",".join([p[0] for p in parts] + [tname]))
    return BenchmarkSet(
        states=tuple(states),
        description=f"{len(states)} product states over {n_atoms} atoms "
        f"({len(controls)} per control, {len(targets)} per target)",
    )


def average_fidelity(
    final_states: Sequence[DensityMatrix],
    ideal: Operator,
    bench: BenchmarkSet,
    **metadata,
) -> FidelityReport:
    """Mean of <psi_n| U+ rho_n U |psi_n> over the benchmark set.

    One final density matrix per benchmark state, in the same basis as
    the ideal gate; the imaginary residue of each quadratic form must
    stay below 1e-10.
    """
    if len(final_states) != len(bench.states):
        raise ValueError(
            f"{len(final_states)} final states for {len(bench.states)} benchmarks"
        )
    per = []
    for rho, psi in zip(final_states, bench.states):
        if rho.basis != ideal.basis:
            raise ValueError("final state basis does not match the ideal gate")
        target = ideal.entries @ psi.amplitudes
        val = complex(np.vdot(target, rho.entries @ target))
        if abs(val.imag) > IMAG_RESIDUE_LIMIT:
            raise ValueError(f"imaginary residue {val.imag:.3e} exceeds 1e-10")
        per.append(min(max(val.real, -FIDELITY_SLACK), 1.0 + FIDELITY_SLACK))
    return FidelityReport(
        per_state=tuple(per),
        average=sum(per) / len(per),
        **metadata,
    )


def dark_path_state(schedule: PulseSchedule, t: float, n_atoms: int = 2) -> Ket:
    """Moving dark path expanded in the full simulation basis."""
    basis = ham.product_basis(n_atoms)
    pair0, pair1 = gate_pair_labels(n_atoms)
    excited = "e" * (n_atoms - 1) + "r"
    aux = "g" + "e" * (n_atoms - 2) + "r"
    abstract = dark_path_D2(schedule.loop, schedule.plan, t)
    b = bright_state(schedule.gate)
    amps = np.zeros(len(basis), dtype=complex)
    idx = {lab: i for i, lab in enumerate(basis)}
    amps[idx[pair0]] = abstract.amplitudes[0] * b.amplitudes[0]
    amps[idx[pair1]] = abstract.amplitudes[0] * b.amplitudes[1]
    amps[idx[excited]] = abstract.amplitudes[1]
    amps[idx[aux]] = abstract.amplitudes[2]
    return Ket(amps, basis)


def dark_state_full(gate: GateSpec, n_atoms: int = 2) -> Ket:
    """Stationary dark state expanded in the full simulation basis."""
    basis = ham.product_basis(n_atoms)
    pair0, pair1 = gate_pair_labels(n_atoms)
    d1 = dark_state_D1(gate)
    amps = np.zeros(len(basis), dtype=complex)
    idx = {lab: i for i, lab in enumerate(basis)}
    amps[idx[pair0]] = d1.amplitudes[0]
    amps[idx[pair1]] = d1.amplitudes[1]
    return Ket(amps, basis)


def holonomy_check(
    schedule: PulseSchedule,
    n_atoms: int = 2,
    policy: Optional[StepPolicy] = None,
) -> tuple[Operator, float]:
    """Compose the two segment propagators of the noise-free effective model
    and compare the triggered-pair block against the ideal rotation.

    Returns the composed block and its max-abs deviation.  This is the
    central correctness oracle for the pulse synthesis, the phase plan
    and the Hamiltonian conventions together.
    """
    if policy is None:
        policy = StepPolicy(points_per_period=600)
    if n_atoms == 2:
        h = ham.h_eff_2(schedule)
    elif n_atoms == 3:
        h = ham.h_eff_3(schedule)
    else:
        h = ham.h_eff_N(schedule, n_atoms=n_atoms)
    tau = schedule.tau
    u1 = propagator(h, 0.0, 0.5 * tau, policy)
    u2 = propagator(h, 0.5 * tau, tau, policy)
    composed = u2 @ u1
    block = composed.restrict(gate_pair_labels(n_atoms))
    deviation = float(
        np.abs(block.entries - ideal_rotation(schedule.gate).entries).max()
    )
    return block, deviation
