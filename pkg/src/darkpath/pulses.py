"""Dark-path drive synthesis for holonomic controlled gates.

The loop coordinates are

    u(t) = (pi/2) sin^2(pi t / tau),      v(t) = eta * (1 - cos u(t)),

which vanish at t = 0, tau/2, tau so the evolution is cyclic.  Requiring
the time-dependent state

    |D2(t)> = cos u cos v e^{i phi2} |b> - i sin u |excited> - cos u sin v |aux>

to solve the Schroedinger equation of the effective four-level model with
zero energy expectation fixes the drive amplitudes

    Omega(t)  = vdot cot(u) sin(v) + udot cos(v)
    Omega0(t) = vdot cot(u) cos(v) - udot sin(v).

Because vdot = eta sin(u) udot, the cot(u) singularity is removable:

    Omega  = udot (eta cos u sin v + cos v)
    Omega0 = udot (eta cos u cos v - sin v)

and this closed form is used everywhere (exactness beats regularizing
near u = 0).  eta = 0 gives Omega0 = 0: the plain single-loop holonomic
scheme.  The target-atom drive splits as Omega1 = Omega sin(theta/2),
Omega2 = -Omega cos(theta/2), and the loop runs in two equal segments
whose laser phases (phi1, phi2) switch at tau/2: (phi, 0) then
(phi + gamma, gamma).  The composed loop then acts as identity on the
dark state and multiplies the bright state by e^{i gamma}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .linalg import Ket

__all__ = [
    "LoopShape",
    "GateSpec",
    "PhasePlan",
    "PulseSample",
    "PulseSchedule",
    "uv_at",
    "udot_at",
    "rabi_at",
    "drive_components",
    "phase_plan",
    "make_schedule",
    "dark_state_D1",
    "bright_state",
    "dark_path_D2",
    "peak_envelope",
    "tau_for_peak",
]

DARK_PATH_BASIS = ("bright", "excited", "aux")
PAIR_BASIS = ("0", "1")


@dataclass(frozen=True)
class LoopShape:
    """Loop duration tau (units of 1/kappa_z by default) and dressing eta."""

    tau: float
    eta: float = 0.0

    def __post_init__(self):
        if not self.tau > 0.0:
            raise ValueError("tau must be positive")
        if self.eta < 0.0:
            raise ValueError("eta must be non-negative")


@dataclass(frozen=True)
class GateSpec:
    """Target holonomy: rotate the triggered pair about
    n = (sin(theta)cos(phi), sin(theta)sin(phi), cos(theta)) by gamma."""

    theta: float
    phi: float
    gamma: float
    n_controls: int = 1

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError("theta must lie in [0, pi]")
        for name in ("phi", "gamma"):
            val = getattr(self, name)
            if not -math.pi < val <= math.pi + 1e-15:
                raise ValueError(f"{name} must lie in (-pi, pi]")
        if self.n_controls < 1:
            raise ValueError("n_controls must be >= 1")


@dataclass(frozen=True)
class PhasePlan:
    """Per-segment laser phases (phi1, phi2); the switch happens at tau/2.

    phi1 - phi2 is the same in both segments (both segments share one
    bright state); segment 1 has phi2 = 0 and segment 2 has phi2 = gamma.
    """

    segment1: tuple[float, float]
    segment2: tuple[float, float]
    switch_fraction: float = 0.5

    def __post_init__(self):
        d1 = self.segment1[0] - self.segment1[1]
        d2 = self.segment2[0] - self.segment2[1]
        if abs(d1 - d2) > 1e-12:
            raise ValueError("phi1 - phi2 must agree between segments")

    def phases(self, segment: int) -> tuple[float, float]:
        if segment == 1:
            return self.segment1
        if segment == 2:
            return self.segment2
        raise ValueError("segment must be 1 or 2")


@dataclass(frozen=True)
class PulseSample:
    """Instantaneous drive amplitudes and active phases."""

    omega: float
    omega0: float
    omega1: float
    omega2: float
    phases: tuple[float, float]


@dataclass(frozen=True)
class PulseSchedule:
    """Complete drive program for one gate loop."""

    loop: LoopShape
    gate: GateSpec
    plan: PhasePlan

    @property
    def tau(self) -> float:
        return self.loop.tau

    @cached_property
    def peak(self) -> float:
        """max_t sqrt(Omega^2 + Omega0^2), used for integrator step control."""
        return peak_envelope(self.loop)

    def segment_at(self, t: float) -> int:
        return 1 if t < self.plan.switch_fraction * self.loop.tau else 2

    def drive_at(self, t: float) -> tuple[float, float, float, float, float, float]:
        """(omega, omega0, omega1, omega2, phi1, phi2) at time t; fast path."""
        omega, omega0 = rabi_at(self.loop, t)
        half = 0.5 * self.gate.theta
        phi1, phi2 = self.plan.phases(self.segment_at(t))
        return (
            omega,
            omega0,
            omega * math.sin(half),
            -omega * math.cos(half),
            phi1,
            phi2,
        )

    def sample(self, t: float) -> PulseSample:
        omega, omega0, omega1, omega2, phi1, phi2 = self.drive_at(t)
        return PulseSample(omega, omega0, omega1, omega2, (phi1, phi2))


def _check_time(loop: LoopShape, t: float) -> float:
    slack = 1e-9 * loop.tau
    if t < -slack or t > loop.tau + slack:
        raise ValueError(f"t = {t} outside the loop interval [0, {loop.tau}]")
    return min(max(t, 0.0), loop.tau)


def uv_at(loop: LoopShape, t: float) -> tuple[float, float]:
    """Loop coordinates (u, v) at time t, boundary values u = v = 0."""
    t = _check_time(loop, t)
    u = 0.5 * math.pi * math.sin(math.pi * t / loop.tau) ** 2
    v = loop.eta * (1.0 - math.cos(u))
    return u, v


def udot_at(loop: LoopShape, t: float) -> float:
    t = _check_time(loop, t)
    return 0.5 * math.pi**2 / loop.tau * math.sin(2.0 * math.pi * t / loop.tau)


def rabi_at(loop: LoopShape, t: float) -> tuple[float, float]:
    """Drive amplitudes (Omega, Omega0) at time t, singularity-free form."""
    u, v = uv_at(loop, t)
    udot = udot_at(loop, t)
    ecu = loop.eta * math.cos(u)
    sv, cv = math.sin(v), math.cos(v)
    return udot * (ecu * sv + cv), udot * (ecu * cv - sv)


def drive_components(
    sample: tuple[float, float], gate: GateSpec, plan: PhasePlan, segment: int
) -> PulseSample:
    """Split (Omega, Omega0) into the two target-atom drives and attach phases."""
    omega, omega0 = sample
    half = 0.5 * gate.theta
    return PulseSample(
        omega,
        omega0,
        omega * math.sin(half),
        -omega * math.cos(half),
        plan.phases(segment),
    )


def phase_plan(gate: GateSpec) -> PhasePlan:
    """Two-segment phase program realizing the holonomy angle gamma.

    Segment 1 runs at (phi1, phi2) = (phi, 0), segment 2 at
    (phi + gamma, gamma): the difference phi is held fixed so both
    segments share the same bright state, and the composed loop equals
    |D1><D1| + e^{i gamma} |b><b| on the triggered pair (validated
    numerically by the holonomy check, not assumed).
    """
    return PhasePlan(
        segment1=(gate.phi, 0.0),
        segment2=(gate.phi + gate.gamma, gate.gamma),
    )


def make_schedule(loop: LoopShape, gate: GateSpec) -> PulseSchedule:
    return PulseSchedule(loop=loop, gate=gate, plan=phase_plan(gate))


def dark_state_D1(gate: GateSpec) -> Ket:
    """Stationary dark state on the computational pair:
    cos(theta/2)|0> + sin(theta/2) e^{-i phi} |1>."""
    half = 0.5 * gate.theta
    return Ket(
        np.array([math.cos(half), math.sin(half) * np.exp(-1j * gate.phi)]),
        PAIR_BASIS,
    )


def bright_state(gate: GateSpec) -> Ket:
    """Orthogonal partner coupled to the excited level:
    sin(theta/2) e^{i phi} |0> - cos(theta/2)|1>."""
    half = 0.5 * gate.theta
    return Ket(
        np.array([math.sin(half) * np.exp(1j * gate.phi), -math.cos(half)]),
        PAIR_BASIS,
    )


def dark_path_D2(loop: LoopShape, plan: PhasePlan, t: float) -> Ket:
    """Moving dark path over the abstract basis (bright, excited, aux).

    ``excited`` is the doubly-excited state and ``aux`` the
    control-ground/excited-target state of the system at hand (er/gr for
    two atoms, eer/ger for three, ee..er/ge..er in general).  The phase
    factor e^{i phi2} uses the segment containing t.
    """
    u, v = uv_at(loop, t)
    segment = 1 if t < plan.switch_fraction * loop.tau else 2
    phi2 = plan.phases(segment)[1]
    return Ket(
        np.array(
            [
                math.cos(u) * math.cos(v) * np.exp(1j * phi2),
                -1j * math.sin(u),
                -math.cos(u) * math.sin(v),
            ]
        ),
        DARK_PATH_BASIS,
    )


def _envelope(loop: LoopShape, t: float) -> float:
    # sqrt(Omega^2 + Omega0^2) = |udot| sqrt(1 + eta^2 cos^2 u)
    u, _ = uv_at(loop, t)
    return abs(udot_at(loop, t)) * math.sqrt(1.0 + (loop.eta * math.cos(u)) ** 2)


def peak_envelope(loop: LoopShape, scan_points: int = 10_000) -> float:
    """Peak of sqrt(Omega^2 + Omega0^2) over the loop.

    Dense scan followed by golden-section refinement around the best
    bracket; the scan itself is the oracle the refinement must beat.
    """
    ts = np.linspace(0.0, loop.tau, scan_points + 1)
    vals = [_envelope(loop, float(t)) for t in ts]
    i = int(np.argmax(vals))
    lo = ts[max(i - 1, 0)]
    hi = ts[min(i + 1, scan_points)]

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = float(lo), float(hi)
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = _envelope(loop, c), _envelope(loop, d)
    while b - a > 1e-13 * loop.tau:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = _envelope(loop, c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = _envelope(loop, d)
    return max(vals[i], fc, fd)


def tau_for_peak(omega_max: float, eta: float) -> float:
    """Loop duration whose peak drive envelope equals omega_max.

    The envelope scales as 1/tau at fixed eta, so a single reference
    evaluation at tau = 1 inverts exactly.
    """
    if not omega_max > 0.0:
        raise ValueError("omega_max must be positive")
    return peak_envelope(LoopShape(tau=1.0, eta=eta)) / omega_max
