"""Command line interface.

Subcommands:

* ``synth``    dump a synthesized drive program as CSV
* ``gate``     print the ideal holonomy block and its reconstruction error
* ``run``      evaluate a builtin or config-file scenario, emit CSV (and SVG)
* ``list``     show the builtin scenarios
* ``validate`` run the acceptance suite; nonzero exit on failure
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .acceptance import run_all
from .gates import holonomy_check, ideal_rotation
from .pulses import GateSpec, LoopShape, make_schedule, tau_for_peak
from .scenarios import (
    GATE_PRESETS,
    builtin_scenarios,
    emit_csv,
    parse_config,
    run_scenario,
)
from .svgplot import emit_svg

GATE_HELP = "named gate (cnot, cz, ccnot) or use --theta/--phi/--gamma"


def _gate_from_args(args) -> GateSpec:
    if args.gate is not None:
        name = args.gate.lower()
        if name == "ccnot":
            return replace(GATE_PRESETS["cnot"], n_controls=2)
        if name in GATE_PRESETS:
            return GATE_PRESETS[name]
        raise SystemExit(f"unknown gate preset {args.gate!r}")
    if args.theta is None or args.gamma is None:
        raise SystemExit("need --gate or --theta/--phi/--gamma")
    return GateSpec(args.theta, args.phi, args.gamma)


def _cmd_synth(args) -> int:
    gate = _gate_from_args(args)
    tau = args.tau if args.tau is not None else tau_for_peak(args.omega_max, args.eta)
    schedule = make_schedule(LoopShape(tau, args.eta), gate)
    lines = ["t,omega,omega0,omega1,omega2,phi1,phi2,segment"]
    for k in range(args.points + 1):
        t = tau * k / args.points
        s = schedule.sample(t)
        seg = schedule.segment_at(t)
        lines.append(
            f"{t:.12g},{s.omega:.12g},{s.omega0:.12g},{s.omega1:.12g},"
            f"{s.omega2:.12g},{s.phases[0]:.12g},{s.phases[1]:.12g},{seg}"
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        path = os.path.join(args.out, "schedule.csv")
        os.makedirs(args.out, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        print(f"wrote {path}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_gate(args) -> int:
    gate = _gate_from_args(args)
    block = ideal_rotation(gate)
    print(f"ideal holonomy block for theta={gate.theta:.6g}, phi={gate.phi:.6g}, gamma={gate.gamma:.6g}:")
    with np.printoptions(precision=6, suppress=True):
        print(block.entries)
    schedule = make_schedule(LoopShape(1.0, args.eta), gate)
    _, dev = holonomy_check(schedule)
    print(f"holonomy reconstruction deviation at eta={args.eta:g}: {dev:.3e}")
    return 0


def _cmd_run(args) -> int:
    builtins = builtin_scenarios()
    if args.scenario in builtins:
        scn = builtins[args.scenario]
    elif os.path.exists(args.scenario):
        with open(args.scenario, encoding="utf-8") as fh:
            scn = parse_config(fh.read())
    else:
        raise SystemExit(
            f"{args.scenario!r} is neither a builtin scenario nor a config file; "
            f"builtins: {', '.join(sorted(builtins))}"
        )
    if args.model:
        scn = replace(scn, sweep_model_kind=(args.model,))
    if args.omega_max is not None:
        scn = replace(scn, omega_max_over_kz=args.omega_max, tau=None)
    result = run_scenario(scn, workers=args.workers)
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, f"{scn.name}.csv")
    emit_csv(result, csv_path)
    print(f"wrote {csv_path} ({len(result.rows)} rows)")
    failures = [r for r in result.rows if r.error]
    for r in failures:
        print(f"  row {r.point} failed: {r.error}")
    if args.svg:
        kind = "heatmap" if len(set(scn.sweep_alpha)) > 1 and len(set(scn.sweep_kappa_over_kz)) > 1 else "lines"
        svg_path = os.path.join(args.out, f"{scn.name}.svg")
        emit_svg(result, kind, svg_path)
        print(f"wrote {svg_path}")
    return 1 if failures else 0


def _cmd_list(_args) -> int:
    for name, scn in sorted(builtin_scenarios().items()):
        print(f"{name:8s} {scn.gate_label:6s} {scn.n_atoms} atoms, models {'/'.join(scn.sweep_model_kind)}, "
              f"{len(scn.grid())} grid points")
    return 0


def _cmd_validate(_args) -> int:
    results = run_all()
    return 0 if all(r.passed for r in results) else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="darkpath",
        description="Dark-path holonomic Rydberg gate simulation toolkit",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_gate_options(p):
        p.add_argument("--gate", help=GATE_HELP)
        p.add_argument("--theta", type=float, help="rotation axis polar angle (rad)")
        p.add_argument("--phi", type=float, default=0.0, help="rotation axis azimuth (rad)")
        p.add_argument("--gamma", type=float, help="rotation angle (rad)")
        p.add_argument("--eta", type=float, default=4.0, help="dressing parameter")

    p = sub.add_parser("synth", help="dump a drive program as CSV")
    add_gate_options(p)
    p.add_argument("--tau", type=float, help="loop duration (units 1/kappa_z)")
    p.add_argument("--omega-max", type=float, default=1.0e3, help="peak drive envelope (units kappa_z)")
    p.add_argument("--points", type=int, default=1000, help="sample count")
    p.add_argument("--out", help="output directory (default: stdout)")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("gate", help="print the ideal gate block and holonomy deviation")
    add_gate_options(p)
    p.set_defaults(func=_cmd_gate)

    p = sub.add_parser("run", help="run a scenario sweep")
    p.add_argument("scenario", help="builtin name or config file path")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--workers", type=int, default=1, help="process pool size")
    p.add_argument("--model", choices=("full", "rotating", "effective"), help="override model tier")
    p.add_argument("--omega-max", type=float, help="override the peak-drive calibration")
    p.add_argument("--svg", action="store_true", help="also render an SVG plot")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("list", help="list builtin scenarios")
    p.set_defaults(func=_cmd_list)

    p = sub.add_parser("validate", help="run the acceptance suite")
    p.set_defaults(func=_cmd_validate)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
