"""Drive and interaction Hamiltonians for blockaded Rydberg atom chains.

Geometry and basis convention: control atoms left to right (c1, c2, ...),
target atom last.  Per-atom level order is (g, e) for controls and
(0, 1, r) for the target, so the two-atom basis reads
(g0, g1, gr, e0, e1, er) and the three-atom one starts gg0, gg1, ggr, ...
Every builder returns a ``HamiltonianFn`` whose ``matrix(t)`` is the
dense matrix in that fixed basis, which keeps all tests bit-reproducible.

Three model tiers are provided per system size:

* full -- lab interaction picture: drives carry e^{-i Delta t} factors and
  the Rydberg-mediated couplings enter as diagonal projectors.
* rotating -- frame of the interaction projectors; drive terms carry the
  explicit e^{+i U t} phase factors written out term by term below.
* effective -- far-off-detuning four-level reduction, supported on the
  doubly-excited / control-ground-excited / triggered-pair states and
  zero-padded to the full system dimension so propagators, channels and
  fidelity code apply unchanged (use Operator.restrict for the 4x4 view).

Systematic drive errors scale only the drive Hamiltonians, never the
interaction terms: H = (1+eps) [H_c + (1+alpha) H_t] + H_int.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from itertools import product
from typing import Callable

import numpy as np

from .linalg import Operator
from .pulses import PulseSchedule, peak_envelope

__all__ = [
    "TwoAtomSpec",
    "ThreeAtomSpec",
    "ChainSpec",
    "DriveErrors",
    "NoiseSpec",
    "LindbladChannel",
    "HamiltonianFn",
    "product_basis",
    "h_full_2",
    "h_rot_2",
    "h_eff_2",
    "h_full_3",
    "h_rot_3",
    "h_eff_3",
    "h_full_N",
    "h_eff_N",
    "channels_2",
    "channels_3",
    "channels_N",
    "vdw_strength",
]

CONTROL_LEVELS = ("g", "e")
TARGET_LEVELS = ("0", "1", "r")
MAX_ATOMS = 6


def product_basis(n_atoms: int) -> tuple[str, ...]:
    """Labels for (N-1) controls plus one target, e.g. 'ge1' or 'eer'."""
    if n_atoms < 2:
        raise ValueError("need at least one control and the target")
    return tuple(
        "".join(cs) + t
        for cs in product(CONTROL_LEVELS, repeat=n_atoms - 1)
        for t in TARGET_LEVELS
    )


@dataclass(frozen=True)
class TwoAtomSpec:
    """Detuning Delta and control-target coupling U12, in units of kappa_z."""

    delta: float
    u12: float

    def __post_init__(self):
        if not math.isclose(self.u12, self.delta, rel_tol=1e-9, abs_tol=1e-12):
            warnings.warn(
                "outside the validity regime U12 = Delta; the four-level "
                "reduction degrades away from it",
                stacklevel=2,
            )


@dataclass(frozen=True)
class ThreeAtomSpec:
    """Detuning and pairwise couplings; validity regime u13 = u23 = (Delta - u12)/2."""

    delta: float
    u12: float
    u13: float
    u23: float

    def __post_init__(self):
        want = 0.5 * (self.delta - self.u12)
        ok = math.isclose(self.u13, self.u23, rel_tol=1e-9, abs_tol=1e-12) and math.isclose(
            self.u13, want, rel_tol=1e-9, abs_tol=1e-12
        )
        if not ok:
            warnings.warn(
                "outside the validity regime u13 = u23 = (Delta - u12)/2",
                stacklevel=2,
            )


@dataclass(frozen=True)
class ChainSpec:
    """Homogeneous chain: every control couples to the target with strength v."""

    n_atoms: int
    delta: float
    v: float

    def __post_init__(self):
        if self.n_atoms < 2:
            raise ValueError("n_atoms must be >= 2")
        want = self.delta / (self.n_atoms - 1)
        if not math.isclose(self.v, want, rel_tol=1e-9, abs_tol=1e-12):
            warnings.warn(
                "outside the validity regime v = Delta / (N - 1)", stacklevel=2
            )


@dataclass(frozen=True)
class DriveErrors:
    """Global (epsilon) and target-local (alpha) Rabi-frequency errors."""

    epsilon: float = 0.0
    alpha: float = 0.0


@dataclass(frozen=True)
class NoiseSpec:
    """Decay and dephasing rates; defaults split the target decay evenly."""

    kappa: float = 0.0
    kappa_z: float = 0.0
    kappa0: float | None = None
    kappa1: float | None = None

    def __post_init__(self):
        if self.kappa0 is None:
            object.__setattr__(self, "kappa0", 0.5 * self.kappa)
        if self.kappa1 is None:
            object.__setattr__(self, "kappa1", 0.5 * self.kappa)
        for name in ("kappa", "kappa_z", "kappa0", "kappa1"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def any_active(self) -> bool:
        return any(r > 0.0 for r in (self.kappa, self.kappa_z, self.kappa0, self.kappa1))


@dataclass(frozen=True)
class LindbladChannel:
    """Jump operator o with its prefactor c in c * (2 o rho o+ - o+o rho - rho o+o)."""

    jump: Operator
    rate_prefactor: float


@dataclass(frozen=True)
class HamiltonianFn:
    """Time-dependent Hamiltonian: dense matrix factory plus step-control data.

    ``max_frequency`` is the largest oscillation rate present (detuning,
    interaction sums, or pulse peak), used to pick integrator steps.
    Evaluation is pure and reentrant.
    """

    basis: tuple[str, ...]
    matrix: Callable[[float], np.ndarray]
    max_frequency: float

    @property
    def dim(self) -> int:
        return len(self.basis)

    def at(self, t: float) -> Operator:
        return Operator(self.matrix(t), self.basis)


# --- drive index machinery -------------------------------------------------
#
# Each Hamiltonian is a sum of directed drive groups.  A group holds the
# (row, col) index pairs of its |upper><lower| terms plus a per-pair
# interaction shift array; at time t the group contributes
#     coeff(t) * exp(1j * shift * t)
# to those entries, and the Hermitian conjugate is added once at the end.


class _Group:
    __slots__ = ("rows", "cols", "shifts", "kind")

    def __init__(self, pairs: list[tuple[int, int, float]], kind: str):
        self.rows = np.array([p[0] for p in pairs], dtype=np.intp)
        self.cols = np.array([p[1] for p in pairs], dtype=np.intp)
        self.shifts = np.array([p[2] for p in pairs], dtype=float)
        self.kind = kind


def _assemble(
    basis: tuple[str, ...],
    groups: list[_Group],
    schedule: PulseSchedule,
    errors: DriveErrors,
    delta: float,
    diagonal: np.ndarray | None,
    max_frequency: float,
) -> HamiltonianFn:
    dim = len(basis)
    f_ctrl = 1.0 + errors.epsilon
    f_tgt = (1.0 + errors.epsilon) * (1.0 + errors.alpha)
    static_shifts = all(np.all(g.shifts == 0.0) for g in groups)

    def matrix(t: float) -> np.ndarray:
        omega, omega0, omega1, omega2, phi1, phi2 = schedule.drive_at(t)
        m = np.zeros((dim, dim), dtype=complex)
        base = {
            "omega0": f_ctrl * omega0 * np.exp(-1j * delta * t),
            "omega1": f_tgt * omega1 * np.exp(-1j * (delta * t + phi1)),
            "omega2": f_tgt * omega2 * np.exp(-1j * (delta * t + phi2)),
        }
        for g in groups:
            c = base[g.kind]
            if static_shifts:
                m[g.rows, g.cols] = c
            else:
                m[g.rows, g.cols] = c * np.exp(1j * g.shifts * t)
        m += m.conj().T
        if diagonal is not None:
            m[np.diag_indices(dim)] += diagonal
        return m

    return HamiltonianFn(basis=basis, matrix=matrix, max_frequency=max_frequency)


def _pairs_control_flip(basis: tuple[str, ...], which: int) -> list[tuple[int, int]]:
    """(row, col) pairs flipping control atom ``which`` from g to e."""
    index = {lab: i for i, lab in enumerate(basis)}
    out = []
    for lab in basis:
        if lab[which] == "g":
            upper = lab[:which] + "e" + lab[which + 1 :]
            out.append((index[upper], index[lab]))
    return out


def _pairs_target_flip(basis: tuple[str, ...], frm: str) -> list[tuple[int, int]]:
    """(row, col) pairs flipping the target from ``frm`` to r."""
    index = {lab: i for i, lab in enumerate(basis)}
    out = []
    for lab in basis:
        if lab[-1] == frm:
            out.append((index[lab[:-1] + "r"], index[lab]))
    return out


def _interaction_energy_2(label: str, spec: TwoAtomSpec) -> float:
    return spec.u12 if label == "er" else 0.0


def _interaction_energy_3(label: str, spec: ThreeAtomSpec) -> float:
    c1, c2, t = label[0], label[1], label[2]
    e = 0.0
    if c1 == "e" and t == "r":
        e += spec.u13
    if c2 == "e" and t == "r":
        e += spec.u23
    if c1 == "e" and c2 == "e":
        e += spec.u12
    return e


# --- two atoms ---------------------------------------------------------------


def h_full_2(spec: TwoAtomSpec, schedule: PulseSchedule, errors: DriveErrors = DriveErrors()) -> HamiltonianFn:
    """Lab-frame two-atom Hamiltonian with the diagonal blockade projector."""
    basis = product_basis(2)
    groups = [
        _Group([(r, c, 0.0) for r, c in _pairs_control_flip(basis, 0)], "omega0"),
        _Group([(r, c, 0.0) for r, c in _pairs_target_flip(basis, "0")], "omega1"),
        _Group([(r, c, 0.0) for r, c in _pairs_target_flip(basis, "1")], "omega2"),
    ]
    diag = np.array([_interaction_energy_2(lab, spec) for lab in basis])
    fmax = max(abs(spec.delta), abs(spec.u12), schedule.peak)
    return _assemble(basis, groups, schedule, errors, spec.delta, diag, fmax)


def h_rot_2(spec: TwoAtomSpec, schedule: PulseSchedule, errors: DriveErrors = DriveErrors()) -> HamiltonianFn:
    """Frame of exp(-i U12 t |er><er|): eight drive terms, er-side ones
    carrying e^{+i U12 t}; the blockade projector is absorbed."""
    basis = product_basis(2)
    index = {lab: i for i, lab in enumerate(basis)}
    u = spec.u12
    g0 = [
        (index["e0"], index["g0"], 0.0),
        (index["e1"], index["g1"], 0.0),
        (index["er"], index["gr"], u),
    ]
    g1 = [(index["gr"], index["g0"], 0.0), (index["er"], index["e0"], u)]
    g2 = [(index["gr"], index["g1"], 0.0), (index["er"], index["e1"], u)]
    groups = [_Group(g0, "omega0"), _Group(g1, "omega1"), _Group(g2, "omega2")]
    fmax = max(abs(spec.delta), abs(spec.u12), schedule.peak)
    return _assemble(basis, groups, schedule, errors, spec.delta, None, fmax)


def h_eff_2(schedule: PulseSchedule, errors: DriveErrors = DriveErrors()) -> HamiltonianFn:
    """Four-level reduction on (er, gr, e0, e1), zero-padded to six levels."""
    return _h_eff(product_basis(2), "er", "gr", "e0", "e1", schedule, errors)


# --- three atoms -------------------------------------------------------------


def h_full_3(spec: ThreeAtomSpec, schedule: PulseSchedule, errors: DriveErrors = DriveErrors()) -> HamiltonianFn:
    """Lab-frame three-atom Hamiltonian; the second control is undriven."""
    basis = product_basis(3)
    groups = [
        _Group([(r, c, 0.0) for r, c in _pairs_control_flip(basis, 0)], "omega0"),
        _Group([(r, c, 0.0) for r, c in _pairs_target_flip(basis, "0")], "omega1"),
        _Group([(r, c, 0.0) for r, c in _pairs_target_flip(basis, "1")], "omega2"),
    ]
    diag = np.array([_interaction_energy_3(lab, spec) for lab in basis])
    fmax = max(abs(spec.delta), abs(spec.u12) + abs(spec.u13) + abs(spec.u23), schedule.peak)
    return _assemble(basis, groups, schedule, errors, spec.delta, diag, fmax)


def h_rot_3(spec: ThreeAtomSpec, schedule: PulseSchedule, errors: DriveErrors = DriveErrors()) -> HamiltonianFn:
    """Interaction frame of the three-atom couplings with the phase factors
    written out per transition:

        control drive:  |eg0><gg0|, |eg1><gg1|,
                        e^{i u13 t} |egr><ggr|,
                        e^{i u12 t} |ee0><ge0|, e^{i u12 t} |ee1><ge1|,
                        e^{i (u12+u13+u23) t} |eer><ger|
        target drives:  |ggr><gg0|, e^{i u23 t} |ger><ge0|,
                        e^{i u13 t} |egr><eg0|,
                        e^{i (u12+u13+u23) t} |eer><ee0|   (and the same for 1)

    Under u13 = u23 = (Delta - u12)/2 the eer-side terms are static.
    """
    basis = product_basis(3)
    index = {lab: i for i, lab in enumerate(basis)}
    usum = spec.u12 + spec.u13 + spec.u23
    g0 = [
        (index["eg0"], index["gg0"], 0.0),
        (index["eg1"], index["gg1"], 0.0),
        (index["egr"], index["ggr"], spec.u13),
        (index["ee0"], index["ge0"], spec.u12),
        (index["ee1"], index["ge1"], spec.u12),
        (index["eer"], index["ger"], usum),
    ]

    def target(frm: str) -> list[tuple[int, int, float]]:
        return [
            (index["gg" + "r"], index["gg" + frm], 0.0),
            (index["ger"], index["ge" + frm], spec.u23),
            (index["egr"], index["eg" + frm], spec.u13),
            (index["eer"], index["ee" + frm], usum),
        ]

    groups = [
        _Group(g0, "omega0"),
        _Group(target("0"), "omega1"),
        _Group(target("1"), "omega2"),
    ]
    fmax = max(abs(spec.delta), abs(usum), schedule.peak)
    return _assemble(basis, groups, schedule, errors, spec.delta, None, fmax)


def h_eff_3(schedule: PulseSchedule, errors: DriveErrors = DriveErrors()) -> HamiltonianFn:
    """Four-level reduction on (eer, ger, ee0, ee1) in the 12-level space."""
    return _h_eff(product_basis(3), "eer", "ger", "ee0", "ee1", schedule, errors)


# --- N-atom chain ------------------------------------------------------------


def h_full_N(spec: ChainSpec, schedule: PulseSchedule, errors: DriveErrors = DriveErrors()) -> HamiltonianFn:
    """Chain of N-1 controls around the target, homogeneous coupling v;
    only the first control and the target are driven."""
    if spec.n_atoms > MAX_ATOMS:
        raise ValueError(f"n_atoms = {spec.n_atoms} exceeds the cap of {MAX_ATOMS}")
    basis = product_basis(spec.n_atoms)
    groups = [
        _Group([(r, c, 0.0) for r, c in _pairs_control_flip(basis, 0)], "omega0"),
        _Group([(r, c, 0.0) for r, c in _pairs_target_flip(basis, "0")], "omega1"),
        _Group([(r, c, 0.0) for r, c in _pairs_target_flip(basis, "1")], "omega2"),
    ]
    diag = np.array(
        [
            spec.v * lab[:-1].count("e") if lab[-1] == "r" else 0.0
            for lab in basis
        ]
    )
    fmax = max(abs(spec.delta), abs(spec.v) * (spec.n_atoms - 1), schedule.peak)
    return _assemble(basis, groups, schedule, errors, spec.delta, diag, fmax)


def h_eff_N(schedule: PulseSchedule, errors: DriveErrors = DriveErrors(), n_atoms: int = 2) -> HamiltonianFn:
    """Four-level reduction for the N-atom chain."""
    if n_atoms > MAX_ATOMS:
        raise ValueError(f"n_atoms = {n_atoms} exceeds the cap of {MAX_ATOMS}")
    basis = product_basis(n_atoms)
    all_e = "e" * (n_atoms - 1)
    ge = "g" + "e" * (n_atoms - 2)
    return _h_eff(basis, all_e + "r", ge + "r", all_e + "0", all_e + "1", schedule, errors)


def _h_eff(
    basis: tuple[str, ...],
    excited: str,
    aux: str,
    comp0: str,
    comp1: str,
    schedule: PulseSchedule,
    errors: DriveErrors,
) -> HamiltonianFn:
    index = {lab: i for i, lab in enumerate(basis)}
    groups = [
        _Group([(index[excited], index[aux], 0.0)], "omega0"),
        _Group([(index[excited], index[comp0], 0.0)], "omega1"),
        _Group([(index[excited], index[comp1], 0.0)], "omega2"),
    ]
    # delta = 0: in the effective frame the surviving terms are static and
    # the drive phases enter only through e^{-i phi_k}.
    return _assemble(basis, groups, schedule, errors, 0.0, None, schedule.peak)


# --- dissipation channels ----------------------------------------------------


def _site_operator(basis: tuple[str, ...], site: int, table: dict[str, dict[str, float]]) -> np.ndarray:
    """Single-site operator tensored into the product space.

    ``table[frm][to] = amplitude`` in the single-atom basis; ``site`` counts
    controls from zero, -1 addresses the target.
    """
    dim = len(basis)
    index = {lab: i for i, lab in enumerate(basis)}
    m = np.zeros((dim, dim), dtype=complex)
    for lab in basis:
        frm = lab[site] if site >= 0 else lab[-1]
        for to, amp in table.get(frm, {}).items():
            if site >= 0:
                other = lab[:site] + to + lab[site + 1 :]
            else:
                other = lab[:-1] + to
            m[index[other], index[lab]] += amp
    return m


def _control_channels(basis: tuple[str, ...], site: int, noise: NoiseSpec) -> list[LindbladChannel]:
    lower = _site_operator(basis, site, {"e": {"g": 1.0}})
    zc = _site_operator(basis, site, {"g": {"g": 1.0}, "e": {"e": -1.0}})
    return [
        LindbladChannel(Operator(lower, basis), 0.5 * noise.kappa),
        LindbladChannel(Operator(zc, basis), 0.5 * noise.kappa_z),
    ]


def _target_channels(basis: tuple[str, ...], noise: NoiseSpec) -> list[LindbladChannel]:
    to0 = _site_operator(basis, -1, {"r": {"0": 1.0}})
    to1 = _site_operator(basis, -1, {"r": {"1": 1.0}})
    zt = _site_operator(basis, -1, {"0": {"0": 1.0}, "1": {"1": 1.0}, "r": {"r": -1.0}})
    return [
        LindbladChannel(Operator(to0, basis), 0.5 * noise.kappa0),
        LindbladChannel(Operator(to1, basis), 0.5 * noise.kappa1),
        LindbladChannel(Operator(zt, basis), 0.5 * noise.kappa_z),
    ]


def channels_2(noise: NoiseSpec) -> list[LindbladChannel]:
    """Five channels: control decay and dephasing, the two target branch
    decays (kappa0/2, kappa1/2 prefactors) and target dephasing."""
    basis = product_basis(2)
    return _control_channels(basis, 0, noise) + _target_channels(basis, noise)


def channels_3(noise: NoiseSpec) -> list[LindbladChannel]:
    """Seven channels: decay and dephasing for each control plus the three
    target channels; with the default kappa0 = kappa1 = kappa/2 split the
    target decay prefactors are kappa/4."""
    basis = product_basis(3)
    return (
        _control_channels(basis, 0, noise)
        + _control_channels(basis, 1, noise)
        + _target_channels(basis, noise)
    )


def channels_N(noise: NoiseSpec, n_atoms: int) -> list[LindbladChannel]:
    """2(N-1) control channels plus 3 target channels, extending the
    two- and three-atom channel sets to the chain."""
    basis = product_basis(n_atoms)
    out: list[LindbladChannel] = []
    for site in range(n_atoms - 1):
        out += _control_channels(basis, site, noise)
    return out + _target_channels(basis, noise)


def vdw_strength(c6: float, d: float) -> float:
    """Van der Waals coupling C6 / d^6 for atoms a distance d apart."""
    if not d > 0.0:
        raise ValueError("distance must be positive")
    return c6 / d**6
