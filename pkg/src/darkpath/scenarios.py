"""Named experiment scenarios: parameter sweeps over gates, errors and noise.

A ``Scenario`` fixes the gate, the system size, the model tier and a
rectangular sweep grid over any of (model_kind, eta, u12, kappa/kappa_z,
epsilon, alpha).  ``run_scenario`` evaluates the average-fidelity
protocol at every grid point, optionally on a process pool; rows always
come back in lexicographic grid order, so the emitted CSV is
byte-identical run to run regardless of worker count.

Rates are expressed in units of the dephasing rate kappa_z (2 pi x 1 kHz
for the quoted hardware numbers) and times in 1/kappa_z.  Because the
loop duration is otherwise free, dissipative sweeps fix it through the
peak drive amplitude: tau = tau_for_peak(omega_max, eta).  Every CSV row
records the tau actually used.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import product as iproduct
from typing import Optional

import numpy as np

from . import __version__
from .dynamics import IntegrationError, StepPolicy, evolve_density_stack, propagator
from .gates import FidelityReport, average_fidelity, benchmark_states, ideal_controlled_gate
from .hamiltonians import (
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
)
from .linalg import DensityMatrix
from .pulses import GateSpec, LoopShape, make_schedule, tau_for_peak

__all__ = [
    "Scenario",
    "SweepResult",
    "SweepRow",
    "run_scenario",
    "emit_csv",
    "emit_config",
    "parse_config",
    "builtin_scenarios",
    "CSV_COLUMNS",
]

AXIS_ORDER = ("model_kind", "eta", "u12_over_kz", "kappa_over_kz", "epsilon", "alpha")
MODEL_KINDS = ("effective", "full", "rotating")
CSV_COLUMNS = (
    "scenario",
    "gate",
    "model_kind",
    "epsilon",
    "alpha",
    "kappa_over_kz",
    "eta",
    "u12_over_kz",
    "tau",
    "fidelity",
    "min_state_fidelity",
    "trace_drift",
)

# Integration density per model tier.  The effective models oscillate at
# the pulse peak only, so they can afford dense stepping (fidelities are
# step-halving stable to ~1e-10 at 300 points per period); the full and
# rotating tiers resolve the detuning-scale factors at the default rate.
EFFECTIVE_POINTS_PER_PERIOD = 300
DETUNED_POINTS_PER_PERIOD = 40

GATE_PRESETS = {
    "cnot": GateSpec(math.pi / 2, 0.0, math.pi),
    "cz": GateSpec(0.0, 0.0, math.pi),
}


def _float_tuple(values) -> tuple[float, ...]:
    return tuple(sorted(float(v) for v in values))


@dataclass(frozen=True)
class Scenario:
    """One named sweep: gate + system + grid + calibration."""

    name: str
    gate_label: str
    gate: GateSpec
    n_atoms: int
    delta_over_kz: float
    dephasing_on: bool
    sweep_model_kind: tuple[str, ...] = ("effective",)
    sweep_eta: tuple[float, ...] = (0.0,)
    sweep_u12_over_kz: tuple[float, ...] = ()  # empty -> validity-regime default
    sweep_kappa_over_kz: tuple[float, ...] = (0.0,)
    sweep_epsilon: tuple[float, ...] = (0.0,)
    sweep_alpha: tuple[float, ...] = (0.0,)
    omega_max_over_kz: Optional[float] = None
    tau: Optional[float] = None
    output_csv: str = ""
    output_svg: str = ""

    def __post_init__(self):
        if (self.omega_max_over_kz is None) == (self.tau is None):
            raise ValueError("exactly one of omega_max_over_kz and tau must be set")
        for kind in self.sweep_model_kind:
            if kind not in MODEL_KINDS:
                raise ValueError(f"unknown model kind {kind!r}")
        if self.n_atoms != self.gate.n_controls + 1:
            raise ValueError("n_atoms must equal gate.n_controls + 1")
        for axis in ("eta", "kappa_over_kz", "epsilon", "alpha"):
            vals = getattr(self, "sweep_" + axis)
            if len(vals) == 0:
                raise ValueError(f"sweep axis {axis} is empty")
        rates_on = self.dephasing_on or any(k > 0 for k in self.sweep_kappa_over_kz)
        if rates_on and self.omega_max_over_kz is None:
            raise ValueError("dissipative scenarios need an omega_max calibration")
        object.__setattr__(self, "sweep_model_kind", tuple(sorted(self.sweep_model_kind)))
        object.__setattr__(self, "sweep_eta", _float_tuple(self.sweep_eta))
        object.__setattr__(self, "sweep_u12_over_kz", _float_tuple(self.sweep_u12_over_kz))
        object.__setattr__(self, "sweep_kappa_over_kz", _float_tuple(self.sweep_kappa_over_kz))
        object.__setattr__(self, "sweep_epsilon", _float_tuple(self.sweep_epsilon))
        object.__setattr__(self, "sweep_alpha", _float_tuple(self.sweep_alpha))

    def grid(self) -> list[dict]:
        axes = [
            ("model_kind", self.sweep_model_kind),
            ("eta", self.sweep_eta),
            ("u12_over_kz", self.sweep_u12_over_kz or (None,)),
            ("kappa_over_kz", self.sweep_kappa_over_kz),
            ("epsilon", self.sweep_epsilon),
            ("alpha", self.sweep_alpha),
        ]
        names = [a for a, _ in axes]
        return [dict(zip(names, combo)) for combo in iproduct(*[v for _, v in axes])]


@dataclass(frozen=True)
class SweepRow:
    point: dict
    tau: float
    report: Optional[FidelityReport]
    trace_drift: float
    herm_drift: float = 0.0
    min_eigenvalue: float = 0.0
    error: str = ""

    @property
    def fidelity(self) -> float:
        return self.report.average if self.report is not None else float("nan")

    @property
    def min_state_fidelity(self) -> float:
        return self.report.minimum if self.report is not None else float("nan")


@dataclass(frozen=True)
class SweepResult:
    scenario: Scenario
    rows: tuple[SweepRow, ...]
    metadata: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        if name == "fidelity":
            return np.array([r.fidelity for r in self.rows])
        if name == "tau":
            return np.array([r.tau for r in self.rows])
        return np.array([r.point[name] for r in self.rows])

    def lookup(self, **point) -> SweepRow:
        def match(a, b) -> bool:
            if isinstance(b, (str, type(None))) or a is None:
                return a == b
            return math.isclose(a, b, rel_tol=0.0, abs_tol=1e-12)

        matches = [
            r for r in self.rows if all(match(r.point[k], v) for k, v in point.items())
        ]
        if len(matches) != 1:
            raise KeyError(f"{len(matches)} rows match {point}")
        return matches[0]


def _loop_tau(scn: Scenario, eta: float) -> float:
    if scn.tau is not None:
        return scn.tau
    return tau_for_peak(scn.omega_max_over_kz, eta)


def _resolve_u12(scn: Scenario, u12) -> float:
    if u12 is None:
        # validity-regime default: u12 = Delta (two atoms), 0 (three atoms or chain)
        return scn.delta_over_kz if scn.n_atoms == 2 else 0.0
    return float(u12)


def _build_hamiltonian(scn: Scenario, kind: str, u12: float, schedule, errors: DriveErrors):
    delta = scn.delta_over_kz
    if scn.n_atoms == 2:
        if kind == "effective":
            return h_eff_2(schedule, errors)
        spec = TwoAtomSpec(delta, u12)
        return h_full_2(spec, schedule, errors) if kind == "full" else h_rot_2(spec, schedule, errors)
    if scn.n_atoms == 3:
        if kind == "effective":
            return h_eff_3(schedule, errors)
        u13 = 0.5 * (delta - u12)
        spec = ThreeAtomSpec(delta, u12, u13, u13)
        return h_full_3(spec, schedule, errors) if kind == "full" else h_rot_3(spec, schedule, errors)
    if kind == "effective":
        return h_eff_N(schedule, errors, n_atoms=scn.n_atoms)
    if kind == "full":
        return h_full_N(ChainSpec(scn.n_atoms, delta, delta / (scn.n_atoms - 1)), schedule, errors)
    raise ValueError(f"model kind {kind!r} is not available for {scn.n_atoms} atoms")


def _channels(scn: Scenario, noise: NoiseSpec):
    if scn.n_atoms == 2:
        return channels_2(noise)
    if scn.n_atoms == 3:
        return channels_3(noise)
    return channels_N(noise, scn.n_atoms)


def _policy(kind: str) -> StepPolicy:
    ppp = EFFECTIVE_POINTS_PER_PERIOD if kind == "effective" else DETUNED_POINTS_PER_PERIOD
    return StepPolicy(points_per_period=ppp)


def evaluate_point(scn: Scenario, point: dict) -> SweepRow:
    """Fidelity protocol at one grid point; failures mark the row, not the sweep."""
    kind = point["model_kind"]
    eta = point["eta"]
    u12 = _resolve_u12(scn, point["u12_over_kz"])
    tau = _loop_tau(scn, eta)
    try:
        loop = LoopShape(tau=tau, eta=eta)
        schedule = make_schedule(loop, scn.gate)
        errors = DriveErrors(epsilon=point["epsilon"], alpha=point["alpha"])
        noise = NoiseSpec(
            kappa=point["kappa_over_kz"],
            kappa_z=1.0 if scn.dephasing_on else 0.0,
        )
        h = _build_hamiltonian(scn, kind, u12, schedule, errors)
        bench = benchmark_states(scn.n_atoms)
        ideal = ideal_controlled_gate(scn.gate, scn.n_atoms)
        policy = _policy(kind)
        meta = dict(
            gate=scn.gate,
            model_kind=kind,
            errors=errors,
            noise=noise,
            calibration=(tau, eta, scn.omega_max_over_kz),
        )

        if noise.any_active:
            stack = np.array(
                [np.outer(s.amplitudes, s.amplitudes.conj()) for s in bench.states]
            )
            mid, m1 = evolve_density_stack(h, _channels(scn, noise), stack, 0.0, 0.5 * tau, policy)
            out, m2 = evolve_density_stack(h, _channels(scn, noise), mid, 0.5 * tau, tau, policy)
            drift = max(m1["max_trace_drift"], m2["max_trace_drift"])
            herm = max(m1["max_hermiticity_drift"], m2["max_hermiticity_drift"])
            mineig = min(m1["min_eigenvalue_seen"], m2["min_eigenvalue_seen"])
            finals = [DensityMatrix(out[i], h.basis) for i in range(out.shape[0])]
        else:
            u1 = propagator(h, 0.0, 0.5 * tau, policy)
            u2 = propagator(h, 0.5 * tau, tau, policy)
            u = u2.entries @ u1.entries
            drift = float(np.abs(u.conj().T @ u - np.eye(h.dim)).max())
            herm = 0.0
            finals = []
            for s in bench.states:
                amps = u @ s.amplitudes
                amps = amps / np.linalg.norm(amps)
                finals.append(DensityMatrix(np.outer(amps, amps.conj()), h.basis))
            mineig = float(
                min(np.linalg.eigvalsh(np.array([f.entries for f in finals])).min(), 0.0)
            )
        report = average_fidelity(finals, ideal, bench, **meta)
        return SweepRow(
            point=point,
            tau=tau,
            report=report,
            trace_drift=drift,
            herm_drift=herm,
            min_eigenvalue=mineig,
        )
    except (IntegrationError, ValueError) as exc:
        return SweepRow(point=point, tau=tau, report=None, trace_drift=float("nan"), error=str(exc))


def _evaluate_star(args) -> SweepRow:
    return evaluate_point(*args)


def run_scenario(scn: Scenario, workers: int = 1) -> SweepResult:
    """Evaluate every grid point; rows in deterministic lexicographic order."""
    points = scn.grid()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_evaluate_star, [(scn, p) for p in points], chunksize=1))
    else:
        rows = [evaluate_point(scn, p) for p in points]
    metadata = {
        "scenario": emit_config(scn),
        "version": __version__,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
        "workers": workers,
    }
    return SweepResult(scenario=scn, rows=tuple(rows), metadata=metadata)


def _fmt(x: float) -> str:
    if isinstance(x, str):
        return x
    if math.isnan(x):
        return "nan"
    return f"{x:.12g}"


def emit_csv(result: SweepResult, path: str) -> None:
    """Write the sweep as UTF-8 CSV with LF endings, 12 significant digits."""
    lines = [",".join(CSV_COLUMNS)]
    scn = result.scenario
    for row in result.rows:
        p = row.point
        lines.append(
            ",".join(
                [
                    scn.name,
                    scn.gate_label,
                    p["model_kind"],
                    _fmt(p["epsilon"]),
                    _fmt(p["alpha"]),
                    _fmt(p["kappa_over_kz"]),
                    _fmt(p["eta"]),
                    _fmt(_resolve_u12(scn, p["u12_over_kz"])),
                    _fmt(row.tau),
                    _fmt(row.fidelity),
                    _fmt(row.min_state_fidelity),
                    _fmt(row.trace_drift),
                ]
            )
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


# --- flat key-value scenario configs ----------------------------------------


def _fmt_value(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, bool):
        return "on" if v else "off"
    if isinstance(v, tuple):
        return ",".join(_fmt_value(x) for x in v)
    return repr(float(v))


def emit_config(scn: Scenario) -> str:
    """Flat ``key = value`` text form; ``parse_config`` inverts it exactly."""
    lines = [
        f"name = {scn.name}",
        f"gate = {scn.gate_label}",
        f"gate.theta = {scn.gate.theta!r}",
        f"gate.phi = {scn.gate.phi!r}",
        f"gate.gamma = {scn.gate.gamma!r}",
        f"system.n_atoms = {scn.n_atoms}",
        f"system.delta_over_kz = {scn.delta_over_kz!r}",
        f"noise.dephasing = {_fmt_value(scn.dephasing_on)}",
        f"sweep.model = {_fmt_value(scn.sweep_model_kind)}",
        f"sweep.eta = {_fmt_value(scn.sweep_eta)}",
        f"sweep.kappa_over_kz = {_fmt_value(scn.sweep_kappa_over_kz)}",
        f"sweep.epsilon = {_fmt_value(scn.sweep_epsilon)}",
        f"sweep.alpha = {_fmt_value(scn.sweep_alpha)}",
    ]
    if scn.sweep_u12_over_kz:
        lines.append(f"sweep.u12_over_kz = {_fmt_value(scn.sweep_u12_over_kz)}")
    if scn.omega_max_over_kz is not None:
        lines.append(f"calibration.omega_max_over_kz = {scn.omega_max_over_kz!r}")
    if scn.tau is not None:
        lines.append(f"calibration.tau = {scn.tau!r}")
    if scn.output_csv:
        lines.append(f"output.csv = {scn.output_csv}")
    if scn.output_svg:
        lines.append(f"output.svg = {scn.output_svg}")
    return "\n".join(lines) + "\n"


def _parse_values(text: str) -> tuple[float, ...]:
    text = text.strip()
    if ":" in text and "," not in text:
        start, stop, step = (float(x) for x in text.split(":"))
        n = int(round((stop - start) / step))
        vals = [start + k * step for k in range(n + 1)]
        # snap near-zero artifacts of the grid arithmetic
        return tuple(0.0 if abs(v) < 1e-15 else round(v, 12) for v in vals)
    return tuple(float(x) for x in text.split(","))


def parse_config(text: str) -> Scenario:
    kv: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"cannot parse config line: {raw!r}")
        key, val = (part.strip() for part in line.split("=", 1))
        kv[key] = val

    label = kv.get("gate", "custom")
    if "gate.theta" in kv:
        gate = GateSpec(
            float(kv["gate.theta"]),
            float(kv["gate.phi"]),
            float(kv["gate.gamma"]),
            n_controls=int(kv["system.n_atoms"]) - 1,
        )
    elif label in GATE_PRESETS:
        gate = replace(GATE_PRESETS[label], n_controls=int(kv["system.n_atoms"]) - 1)
    else:
        raise ValueError(f"config needs gate.theta/.phi/.gamma or a preset, got {label!r}")

    def values(key: str, default: str) -> tuple[float, ...]:
        return _parse_values(kv.get(key, default))

    return Scenario(
        name=kv["name"],
        gate_label=label,
        gate=gate,
        n_atoms=int(kv["system.n_atoms"]),
        delta_over_kz=float(kv["system.delta_over_kz"]),
        dephasing_on=kv.get("noise.dephasing", "off") == "on",
        sweep_model_kind=tuple(kv.get("sweep.model", "effective").split(",")),
        sweep_eta=values("sweep.eta", "0"),
        sweep_u12_over_kz=_parse_values(kv["sweep.u12_over_kz"])
        if "sweep.u12_over_kz" in kv
        else (),
        sweep_kappa_over_kz=values("sweep.kappa_over_kz", "0"),
        sweep_epsilon=values("sweep.epsilon", "0"),
        sweep_alpha=values("sweep.alpha", "0"),
        omega_max_over_kz=float(kv["calibration.omega_max_over_kz"])
        if "calibration.omega_max_over_kz" in kv
        else None,
        tau=float(kv["calibration.tau"]) if "calibration.tau" in kv else None,
        output_csv=kv.get("output.csv", ""),
        output_svg=kv.get("output.svg", ""),
    )


# --- builtin scenarios -------------------------------------------------------


def _eps_grid() -> tuple[float, ...]:
    return _parse_values("-0.2:0.2:0.02")


def _alpha_grid() -> tuple[float, ...]:
    return _parse_values("-0.1:0.1:0.01")


def _kappa_grid() -> tuple[float, ...]:
    return _parse_values("0:2:0.25")


def builtin_scenarios() -> dict[str, Scenario]:
    """The named sweeps behind each reported figure-style result."""
    cnot, cz = GATE_PRESETS["cnot"], GATE_PRESETS["cz"]
    ccnot = replace(cnot, n_controls=2)
    common2 = dict(n_atoms=2, delta_over_kz=1.0e6)
    out = {
        # CNOT / CZ global-error sweeps, no dissipation
        "fig3a": Scenario(
            name="fig3a", gate_label="cnot", gate=cnot, dephasing_on=False,
            sweep_eta=(0.0, 4.0), sweep_epsilon=_eps_grid(), tau=1.0, **common2,
        ),
        "fig3b": Scenario(
            name="fig3b", gate_label="cz", gate=cz, dephasing_on=False,
            sweep_eta=(0.0, 4.0), sweep_epsilon=_eps_grid(), tau=1.0, **common2,
        ),
        # same sweeps with decay and dephasing on
        "fig3c": Scenario(
            name="fig3c", gate_label="cnot", gate=cnot, dephasing_on=True,
            sweep_eta=(0.0, 4.0), sweep_epsilon=_eps_grid(),
            sweep_kappa_over_kz=(1.0,), omega_max_over_kz=1.0e3, **common2,
        ),
        "fig3d": Scenario(
            name="fig3d", gate_label="cz", gate=cz, dephasing_on=True,
            sweep_eta=(0.0, 4.0), sweep_epsilon=_eps_grid(),
            sweep_kappa_over_kz=(1.0,), omega_max_over_kz=1.0e3, **common2,
        ),
        # CNOT landscape over local error and decay rate
        "fig4": Scenario(
            name="fig4", gate_label="cnot", gate=cnot, dephasing_on=True,
            sweep_eta=(0.0, 4.0), sweep_alpha=_alpha_grid(),
            sweep_kappa_over_kz=_kappa_grid(), omega_max_over_kz=1.0e3, **common2,
        ),
        # CCNOT global-error sweeps
        "fig7a": Scenario(
            name="fig7a", gate_label="ccnot", gate=ccnot, n_atoms=3,
            delta_over_kz=1.0e6, dephasing_on=False,
            sweep_eta=(0.0, 2.0, 4.0, 6.0), sweep_epsilon=_eps_grid(), tau=1.0,
        ),
        "fig7b": Scenario(
            name="fig7b", gate_label="ccnot", gate=ccnot, n_atoms=3,
            delta_over_kz=1.0e6, dephasing_on=True,
            sweep_eta=(0.0, 2.0, 4.0, 6.0), sweep_epsilon=_eps_grid(),
            sweep_kappa_over_kz=(1.0,), omega_max_over_kz=1.0e3,
        ),
        # CCNOT landscape
        "fig8": Scenario(
            name="fig8", gate_label="ccnot", gate=ccnot, n_atoms=3,
            delta_over_kz=1.0e6, dephasing_on=True,
            sweep_eta=(0.0, 4.0), sweep_alpha=_alpha_grid(),
            sweep_kappa_over_kz=_kappa_grid(), omega_max_over_kz=1.0e3,
        ),
        # full-vs-effective validation, two atoms (Delta / Omega_max = 100)
        "fig9": Scenario(
            name="fig9", gate_label="cnot", gate=cnot, n_atoms=2,
            delta_over_kz=1.0e5, dephasing_on=True,
            sweep_model_kind=("full", "effective"), sweep_eta=(2.0, 4.0),
            sweep_alpha=(-0.1, 0.0, 0.1), sweep_kappa_over_kz=(1.0,),
            omega_max_over_kz=1.0e3,
        ),
        # weak control-control coupling insensitivity, three atoms
        "fig10": Scenario(
            name="fig10", gate_label="ccnot", gate=ccnot, n_atoms=3,
            delta_over_kz=1.0e5, dephasing_on=True,
            sweep_model_kind=("rotating", "effective"), sweep_eta=(4.0,),
            sweep_u12_over_kz=(0.0, 1.0e5 / 11.0),
            sweep_alpha=(-0.1, 0.0, 0.1), sweep_kappa_over_kz=(1.0,),
            omega_max_over_kz=1.0e3,
        ),
    }
    return out
