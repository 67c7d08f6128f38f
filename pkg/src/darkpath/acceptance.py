"""Acceptance suite: the quantitative exit criteria of the toolkit.

Each criterion is a callable returning a ``CriterionResult`` with the
measured values in its detail lines, so failures are diagnosable from the
printed report alone.  ``run_all`` prints one pass/fail line per
criterion; the CLI ``validate`` subcommand and the pytest acceptance
module both call into here, so there is exactly one implementation of
every threshold.

Expensive sweeps are cached per process and shared between criteria
(the cross-gate comparison reuses the CNOT and CCNOT sweeps, the
physicality audit reuses the dissipative ones).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .dynamics import StepPolicy, evolve_density_stack, lindblad_evolve, propagate_ket
from .gates import benchmark_states, dark_path_state, holonomy_check, ideal_controlled_gate
from .hamiltonians import (
    DriveErrors,
    HamiltonianFn,
    NoiseSpec,
    channels_2,
    h_eff_2,
    product_basis,
)
from .linalg import DensityMatrix, Ket, basis_state, expectation
from .pulses import GateSpec, LoopShape, make_schedule, tau_for_peak
from .scenarios import (
    EFFECTIVE_POINTS_PER_PERIOD,
    Scenario,
    builtin_scenarios,
    evaluate_point,
    run_scenario,
)

__all__ = ["CriterionResult", "run_all", "CRITERIA"]

CNOT = GateSpec(math.pi / 2, 0.0, math.pi)
CCNOT = GateSpec(math.pi / 2, 0.0, math.pi, n_controls=2)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    runtime_s: float
    budget_s: float
    details: list[str]

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.number:2d}. {self.name}  ({self.runtime_s:.1f} s / budget {self.budget_s:.0f} s)"

    def report(self) -> str:
        return "\n".join([self.line()] + [f"      - {d}" for d in self.details])


def _check(details: list[str], ok: bool, text: str) -> bool:
    details.append(("ok   " if ok else "FAIL ") + text)
    return ok


# --- shared sweeps -----------------------------------------------------------


@lru_cache(maxsize=None)
def _error_sweep(gate_label: str):
    """Dissipation-free global-error sweep at step 0.01, eta in {0, 4(, 2, 6)}."""
    builtin = builtin_scenarios()[{"cnot": "fig3a", "cz": "fig3b", "ccnot": "fig7a"}[gate_label]]
    eps = tuple(round(-0.2 + 0.01 * k, 10) for k in range(41))
    return run_scenario(replace(builtin, sweep_epsilon=eps))


@lru_cache(maxsize=None)
def _dissipative_sweep():
    """CNOT at eps = 0 under decay sweep, default omega_max calibration."""
    scn = Scenario(
        name="dissipative-ordering",
        gate_label="cnot",
        gate=CNOT,
        n_atoms=2,
        delta_over_kz=1.0e6,
        dephasing_on=True,
        sweep_eta=(0.0, 4.0),
        sweep_kappa_over_kz=(0.0, 0.5, 1.0, 2.0),
        omega_max_over_kz=1.0e3,
    )
    return run_scenario(scn)


@lru_cache(maxsize=None)
def _fig9_sweep():
    return run_scenario(builtin_scenarios()["fig9"])


@lru_cache(maxsize=None)
def _fig10_sweep():
    return run_scenario(builtin_scenarios()["fig10"])


# --- criteria ----------------------------------------------------------------


def criterion_1() -> CriterionResult:
    """Holonomy reconstruction over seeded random gate draws."""
    t0 = time.perf_counter()
    details: list[str] = []
    rng = np.random.default_rng(20230817)
    ok = True
    worst = 0.0
    for _ in range(20):
        gate = GateSpec(
            theta=float(rng.uniform(0.0, math.pi)),
            phi=float(rng.uniform(-math.pi, math.pi)),
            gamma=float(rng.uniform(-math.pi, math.pi)),
        )
        for eta in (0.0, 2.0, 4.0, 6.0):
            _, dev = holonomy_check(make_schedule(LoopShape(1.0, eta), gate))
            worst = max(worst, dev)
    ok &= _check(details, worst <= 1e-4, f"max deviation over 20 draws x 4 eta = {worst:.3e} <= 1e-4")
    return CriterionResult(1, "holonomy reconstruction (random gates)", ok, time.perf_counter() - t0, 10.0, details)


def _dark_path_invariants(gate: GateSpec, eta: float, details: list[str]) -> bool:
    tau = 1.0
    schedule = make_schedule(LoopShape(tau, eta), gate)
    h = h_eff_2(schedule)
    basis = product_basis(2)
    d1 = np.zeros(6, dtype=complex)
    d1[basis.index("e0")] = math.cos(0.5 * gate.theta)
    d1[basis.index("e1")] = math.sin(0.5 * gate.theta) * np.exp(-1j * gate.phi)

    n_pts = 1000
    worst_orth = worst_expect = worst_resid = 0.0
    hstep = 1e-6 * tau
    for segment in (0, 1):
        lo, hi = segment * 0.5 * tau, (segment + 1) * 0.5 * tau
        ts = np.linspace(lo + hstep, hi - hstep, n_pts)
        for t in ts:
            t = float(t)
            d2 = dark_path_state(schedule, t).amplitudes
            hm = h.matrix(t)
            worst_orth = max(worst_orth, abs(np.vdot(d1, d2)))
            worst_expect = max(worst_expect, abs(np.vdot(d2, hm @ d2)))
            plus = dark_path_state(schedule, t + hstep).amplitudes
            minus = dark_path_state(schedule, t - hstep).amplitudes
            resid = 1j * (plus - minus) / (2.0 * hstep) - hm @ d2
            worst_resid = max(worst_resid, float(np.linalg.norm(resid)))
    hnorm = max(
        float(np.linalg.norm(h.matrix(float(t)), ord=2)) for t in np.linspace(0.01, tau - 0.01, 64)
    )
    ok = True
    ok &= _check(details, worst_orth <= 1e-12, f"max |<D1|D2>| = {worst_orth:.2e} <= 1e-12 (eta={eta})")
    ok &= _check(details, worst_expect <= 1e-10, f"max |<D2|H|D2>| = {worst_expect:.2e} <= 1e-10 (eta={eta})")
    ok &= _check(
        details,
        worst_resid <= 1e-6 * hnorm,
        f"max Schroedinger residual = {worst_resid:.2e} <= 1e-6 * |H| = {1e-6 * hnorm:.2e} (eta={eta})",
    )
    return ok


def criterion_2() -> CriterionResult:
    """Dark-path invariants on a dense grid per segment."""
    t0 = time.perf_counter()
    details: list[str] = []
    ok = _dark_path_invariants(CNOT, 4.0, details)
    ok &= _dark_path_invariants(GateSpec(1.1, 0.7, -2.0), 2.0, details)
    return CriterionResult(2, "dark-path invariants", ok, time.perf_counter() - t0, 5.0, details)


def criterion_3(sweep=None) -> CriterionResult:
    """CNOT global-error sweep without dissipation."""
    t0 = time.perf_counter()
    details: list[str] = []
    sweep = sweep if sweep is not None else _error_sweep("cnot")
    f4_neg = sweep.lookup(eta=4.0, epsilon=-0.2).fidelity
    f0_neg = sweep.lookup(eta=0.0, epsilon=-0.2).fidelity
    ok = True
    ok &= _check(details, f4_neg >= 0.97, f"F(eta=4, eps=-0.2) = {f4_neg:.4f} >= 0.97")
    ok &= _check(details, abs(f0_neg - 0.91) <= 0.02, f"F(eta=0, eps=-0.2) = {f0_neg:.4f} within 0.91 +/- 0.02")
    pos = [r.fidelity for r in sweep.rows if r.point["eta"] == 4.0 and r.point["epsilon"] >= -1e-12]
    ok &= _check(details, min(pos) >= 0.995, f"min F(eta=4, eps in [0, 0.2]) = {min(pos):.4f} >= 0.995")
    return CriterionResult(3, "CNOT error sweep, dissipation-free", ok, time.perf_counter() - t0, 30.0, details)


def criterion_4() -> CriterionResult:
    """CZ global-error sweep without dissipation."""
    t0 = time.perf_counter()
    details: list[str] = []
    sweep = _error_sweep("cz")
    ok = True
    # equality at eps = 0 sits at the integrator noise floor, so the
    # pointwise comparison allows the 1e-7 fidelity reproducibility scale
    worst_gap = 0.0
    for r4 in (r for r in sweep.rows if r.point["eta"] == 4.0):
        r0 = sweep.lookup(eta=0.0, epsilon=r4.point["epsilon"])
        worst_gap = max(worst_gap, r0.fidelity - r4.fidelity)
    ok &= _check(details, worst_gap <= 1e-7, f"max F(eta=0) - F(eta=4) over grid = {worst_gap:.2e} <= 1e-7")
    pos = [r.fidelity for r in sweep.rows if r.point["eta"] == 4.0 and r.point["epsilon"] >= -1e-12]
    ok &= _check(details, min(pos) >= 0.995, f"min F(eta=4, eps in [0, 0.2]) = {min(pos):.4f} >= 0.995")
    return CriterionResult(4, "CZ error sweep, dissipation-free", ok, time.perf_counter() - t0, 30.0, details)


def criterion_5() -> CriterionResult:
    """CCNOT global-error sweep without dissipation."""
    t0 = time.perf_counter()
    details: list[str] = []
    sweep = _error_sweep("ccnot")
    f = {eta: sweep.lookup(eta=eta, epsilon=-0.2).fidelity for eta in (0.0, 2.0, 4.0, 6.0)}
    ok = True
    ok &= _check(details, abs(f[2.0] - 0.97) <= 0.015, f"F(eta=2, eps=-0.2) = {f[2.0]:.4f} within 0.97 +/- 0.015")
    ok &= _check(details, abs(f[4.0] - 0.99) <= 0.01, f"F(eta=4, eps=-0.2) = {f[4.0]:.4f} within 0.99 +/- 0.01")
    ok &= _check(details, f[6.0] >= 0.99, f"F(eta=6, eps=-0.2) = {f[6.0]:.4f} >= 0.99")
    ok &= _check(details, f[0.0] < 0.96, f"F(eta=0, eps=-0.2) = {f[0.0]:.4f} < 0.96")
    return CriterionResult(5, "CCNOT error sweep, dissipation-free", ok, time.perf_counter() - t0, 120.0, details)


def criterion_6() -> CriterionResult:
    """Three-qubit gate beats the two-qubit gate under global error."""
    t0 = time.perf_counter()
    details: list[str] = []
    f_cnot = _error_sweep("cnot").lookup(eta=4.0, epsilon=-0.2).fidelity
    f_ccnot = _error_sweep("ccnot").lookup(eta=4.0, epsilon=-0.2).fidelity
    gap = f_ccnot - f_cnot
    ok = _check(
        details,
        0.003 <= gap <= 0.02,
        f"F_CCNOT - F_CNOT at eps=-0.2, eta=4 = {gap:.4f} in [0.003, 0.02]",
    )
    return CriterionResult(6, "cross-gate ordering (CCNOT vs CNOT)", ok, time.perf_counter() - t0, 10.0, details)


def criterion_7() -> CriterionResult:
    """Dissipative behaviour at eps = 0 under the default calibration.

    The eta ordering clause is calibration-sensitive: with the loop time
    fixed through the peak drive (tau = tau_for_peak(omega_max, eta)) the
    eta = 4 loop is ~3.4x longer than the eta = 0 one and carries extra
    dephasing-exposed coherences through the control-ground/excited-target
    state, so its eps = 0 fidelity comes out *below* the eta = 0 value.
    The check is asserted as specified and reports the measured numbers;
    see the quoted comparison values it is probing for.
    """
    t0 = time.perf_counter()
    details: list[str] = []
    sweep = _dissipative_sweep()
    f4 = sweep.lookup(eta=4.0, kappa_over_kz=1.0).fidelity
    f0 = sweep.lookup(eta=0.0, kappa_over_kz=1.0).fidelity
    ok = True
    ok &= _check(details, f4 > f0, f"F(eta=4) = {f4:.4f} > F(eta=0) = {f0:.4f} at eps=0, kappa=kappa_z")
    ok &= _check(details, 0.97 <= f4 < 1.0 and 0.97 <= f0 < 1.0, f"both fidelities in [0.97, 1.0): {f4:.4f}, {f0:.4f}")
    for eta in (0.0, 4.0):
        fs = [sweep.lookup(eta=eta, kappa_over_kz=k).fidelity for k in (0.0, 0.5, 1.0, 2.0)]
        mono = all(fs[i] > fs[i + 1] for i in range(3))
        ok &= _check(details, mono, f"F decreases with kappa at eta={eta}: {[round(f, 5) for f in fs]}")
    details.append(
        "info reference values 0.99 (eta=4) vs 0.98 (eta=0) are calibration-"
        "sensitive: they assume a loop-time choice not derivable from the "
        "stated equal-peak calibration (see decisions ledger)"
    )
    return CriterionResult(7, "dissipative ordering at eps=0 (calibration-dependent)", ok, time.perf_counter() - t0, 120.0, details)


def criterion_8() -> CriterionResult:
    """Full-model validation of the four-level reduction."""
    t0 = time.perf_counter()
    details: list[str] = []
    ok = True
    fig9 = _fig9_sweep()
    worst = 0.0
    for eta in (2.0, 4.0):
        for alpha in (-0.1, 0.0, 0.1):
            f_full = fig9.lookup(model_kind="full", eta=eta, alpha=alpha).fidelity
            f_eff = fig9.lookup(model_kind="effective", eta=eta, alpha=alpha).fidelity
            worst = max(worst, abs(f_full - f_eff))
    ok &= _check(details, worst <= 0.01, f"CNOT max |F_full - F_eff| over eta x alpha grid = {worst:.4f} <= 0.01")

    fig10 = _fig10_sweep()
    u12_values = sorted(set(fig10.scenario.sweep_u12_over_kz))
    worst10 = 0.0
    worst_eff = 0.0
    for alpha in (-0.1, 0.0, 0.1):
        f0 = fig10.lookup(model_kind="rotating", u12_over_kz=u12_values[0], alpha=alpha).fidelity
        fw = fig10.lookup(model_kind="rotating", u12_over_kz=u12_values[1], alpha=alpha).fidelity
        fe = fig10.lookup(model_kind="effective", u12_over_kz=u12_values[0], alpha=alpha).fidelity
        worst10 = max(worst10, abs(fw - f0))
        worst_eff = max(worst_eff, abs(f0 - fe))
    ok &= _check(details, worst10 <= 0.01, f"CCNOT max |F(u12=u13/5) - F(u12=0)| = {worst10:.4f} <= 0.01")
    details.append(
        f"info CCNOT interaction-frame model vs effective: max |dF| = {worst_eff:.4f}"
    )
    return CriterionResult(8, "full-vs-effective validation", ok, time.perf_counter() - t0, 1200.0, details)


def criterion_9() -> CriterionResult:
    """Physicality monitors and step-halving stability of reported fidelities."""
    t0 = time.perf_counter()
    details: list[str] = []
    ok = True
    rows = list(_dissipative_sweep().rows) + list(_fig9_sweep().rows) + list(_fig10_sweep().rows)
    tr = max(r.trace_drift for r in rows)
    he = max(r.herm_drift for r in rows)
    ev = min(r.min_eigenvalue for r in rows)
    ok &= _check(details, tr <= 1e-8, f"max trace drift over {len(rows)} dissipative rows = {tr:.2e} <= 1e-8")
    ok &= _check(details, he <= 1e-10, f"max Hermiticity drift = {he:.2e} <= 1e-10")
    ok &= _check(details, ev >= -1e-7, f"min density-matrix eigenvalue = {ev:.2e} >= -1e-7")

    scn = replace(
        builtin_scenarios()["fig3a"], sweep_epsilon=(-0.1,), sweep_eta=(4.0,), name="halving"
    )
    point = scn.grid()[0]
    f_course = evaluate_point(scn, point).fidelity
    fine = _with_points_per_period(scn, point, 2 * EFFECTIVE_POINTS_PER_PERIOD)
    ok &= _check(
        details,
        abs(f_course - fine) <= 1e-7,
        f"step halving changes the fidelity by {abs(f_course - fine):.2e} <= 1e-7",
    )
    return CriterionResult(9, "physicality suite", ok, time.perf_counter() - t0, 120.0, details)


def _with_points_per_period(scn: Scenario, point: dict, ppp: int) -> float:
    """Re-evaluate one unitary grid point at a finer fixed step."""
    from .dynamics import propagator

    schedule = make_schedule(LoopShape(scn.tau, point["eta"]), scn.gate)
    errors = DriveErrors(epsilon=point["epsilon"], alpha=point["alpha"])
    h = h_eff_2(schedule, errors)
    policy = StepPolicy(points_per_period=ppp)
    u1 = propagator(h, 0.0, 0.5 * scn.tau, policy)
    u2 = propagator(h, 0.5 * scn.tau, scn.tau, policy)
    u = u2.entries @ u1.entries
    bench = benchmark_states(2)
    ideal = ideal_controlled_gate(scn.gate, 2)
    m = ideal.entries.conj().T @ u
    return float(
        np.mean([abs(np.vdot(s.amplitudes, m @ s.amplitudes)) ** 2 for s in bench.states])
    )


def criterion_10() -> CriterionResult:
    """Closed-form oracles: Rabi flip, exponential decay, dephasing, dark path."""
    t0 = time.perf_counter()
    details: list[str] = []
    ok = True
    basis = ("g", "e")
    omega = 1.0
    flip = np.array([[0.0, omega], [omega, 0.0]], dtype=complex)
    h = HamiltonianFn(basis=basis, matrix=lambda t: flip, max_frequency=omega)
    rep = propagate_ket(h, basis_state("g", basis), 0.0, math.pi / (2 * omega), StepPolicy(points_per_period=2000))
    err = float(np.abs(rep.final_state.amplitudes - np.array([0.0, -1.0j])).max())
    ok &= _check(details, err <= 1e-8, f"Rabi half-flip |g> -> -i|e| error = {err:.2e} <= 1e-8")

    basis6 = product_basis(2)
    zero6 = np.zeros((6, 6), dtype=complex)
    h0 = HamiltonianFn(basis=basis6, matrix=lambda t: zero6, max_frequency=0.0)
    kappa = 1.0
    chans = channels_2(NoiseSpec(kappa=kappa, kappa_z=0.0, kappa0=0.0, kappa1=0.0))
    rho0 = DensityMatrix.from_ket(basis_state("e0", basis6))
    span = 0.7
    rep = lindblad_evolve(h0, chans, rho0, 0.0, span, StepPolicy(dt_max=span / 2000))
    got = rep.final_state.entries[basis6.index("e0"), basis6.index("e0")].real
    err = abs(got - math.exp(-kappa * span))
    ok &= _check(details, err <= 1e-6, f"control decay pop(e0) vs e^-kt error = {err:.2e} <= 1e-6")

    kz = 1.0
    chans = channels_2(NoiseSpec(kappa=0.0, kappa_z=kz))
    plus = Ket(np.array([1.0, 0.0, 0.0, 1.0, 0.0, 0.0]) / math.sqrt(2.0), basis6)
    rep = lindblad_evolve(h0, chans, DensityMatrix.from_ket(plus), 0.0, span, StepPolicy(dt_max=span / 2000))
    coh = rep.final_state.entries[basis6.index("g0"), basis6.index("e0")]
    err = abs(coh - 0.5 * math.exp(-2.0 * kz * span))
    ok &= _check(details, err <= 1e-6, f"dephasing coherence vs e^-2kzt/2 error = {err:.2e} <= 1e-6")

    schedule = make_schedule(LoopShape(1.0, 4.0), CNOT)
    h = h_eff_2(schedule)
    psi0 = dark_path_state(schedule, 0.0)
    policy = StepPolicy(points_per_period=600)
    mid = propagate_ket(h, psi0, 0.0, 0.5, policy).final_state
    end = propagate_ket(h, mid, 0.5, 1.0, policy).final_state
    want = dark_path_state(schedule, 1.0).amplitudes
    got = end.amplitudes
    phase = np.vdot(want, got)
    phase /= abs(phase)
    err = float(np.abs(got - phase * want).max())
    ok &= _check(details, err <= 1e-6, f"dark-path self-propagation error (up to phase) = {err:.2e} <= 1e-6")
    return CriterionResult(10, "oracle suite", ok, time.perf_counter() - t0, 5.0, details)


CRITERIA = (
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
)


def run_all(echo=print) -> list[CriterionResult]:
    """Run every criterion, print one line per result, return the list."""
    results = []
    for crit in CRITERIA:
        res = crit()
        res.passed = res.passed and res.runtime_s <= res.budget_s
        results.append(res)
        echo(res.report())
    n_pass = sum(r.passed for r in results)
    echo(f"{n_pass}/{len(results)} criteria passed")
    return results
