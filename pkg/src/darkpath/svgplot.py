"""Self-contained SVG renderers for sweep results: line plots and banded heatmaps.

No plotting dependency: the files are assembled as plain SVG text, which
keeps output byte-deterministic.  Heatmaps are banded at the fidelity
thresholds 0.96 and 0.99 rather than continuously colored.
"""

from __future__ import annotations

import math
from typing import Iterable

from .scenarios import SweepResult

__all__ = ["emit_svg", "render_lines", "render_heatmap"]

BAND_COLORS = (
    (0.99, "#ffd92f", "F >= 0.99"),
    (0.96, "#a6dba0", "0.96 <= F < 0.99"),
    (-math.inf, "#1b7837", "F < 0.96"),
)
SERIES_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
SWEEPABLE = ("epsilon", "alpha", "kappa_over_kz", "eta", "u12_over_kz", "model_kind")

WIDTH, HEIGHT = 640, 420
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 160, 40, 55


def _axis_values(result: SweepResult, axis: str) -> list:
    seen = []
    for row in result.rows:
        v = row.point[axis]
        if v not in seen:
            seen.append(v)
    return seen


def _varying_axes(result: SweepResult) -> list[str]:
    return [a for a in SWEEPABLE if len(_axis_values(result, a)) > 1]


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / (n - 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if mag * mult >= raw:
            step = mag * mult
            break
    start = math.ceil(lo / step) * step
    out = []
    x = start
    while x <= hi + 1e-12 * step:
        out.append(round(x, 12))
        x += step
    return out


def _fmt_tick(x: float) -> str:
    return f"{x:.6g}"


def _svg_header(width: int, height: int, title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="Helvetica, Arial, sans-serif">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="22" font-size="15" text-anchor="middle">{title}</text>',
    ]


def render_lines(result: SweepResult) -> str:
    """Fidelity vs the single swept numeric axis, one polyline per series."""
    numeric = [a for a in _varying_axes(result) if a not in ("eta", "model_kind")]
    if len(numeric) != 1:
        raise ValueError(
            f"line plot needs exactly one swept numeric axis, found {numeric or 'none'}"
        )
    xaxis = numeric[0]
    series_axes = [a for a in _varying_axes(result) if a != xaxis]

    groups: dict[tuple, list[tuple[float, float]]] = {}
    for row in result.rows:
        key = tuple((a, row.point[a]) for a in series_axes)
        groups.setdefault(key, []).append((float(row.point[xaxis]), row.fidelity))

    xs_all = [x for pts in groups.values() for x, _ in pts]
    ys_all = [y for pts in groups.values() for _, y in pts if not math.isnan(y)]
    x_lo, x_hi = min(xs_all), max(xs_all)
    y_lo, y_hi = min(ys_all), max(ys_all)
    pad = max(1e-4, 0.05 * (y_hi - y_lo))
    y_lo, y_hi = y_lo - pad, min(1.0 + 1e-6, y_hi + pad)

    def sx(x: float) -> float:
        return MARGIN_L + (x - x_lo) / (x_hi - x_lo) * (WIDTH - MARGIN_L - MARGIN_R)

    def sy(y: float) -> float:
        return HEIGHT - MARGIN_B - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - MARGIN_T - MARGIN_B)

    out = _svg_header(WIDTH, HEIGHT, f"{result.scenario.name}: average fidelity")
    ax_b, ax_l = HEIGHT - MARGIN_B, MARGIN_L
    out.append(
        f'<line x1="{ax_l}" y1="{ax_b}" x2="{WIDTH - MARGIN_R}" y2="{ax_b}" stroke="black"/>'
    )
    out.append(f'<line x1="{ax_l}" y1="{MARGIN_T}" x2="{ax_l}" y2="{ax_b}" stroke="black"/>')
    for x in _ticks(x_lo, x_hi):
        out.append(f'<line x1="{sx(x):.1f}" y1="{ax_b}" x2="{sx(x):.1f}" y2="{ax_b + 5}" stroke="black"/>')
        out.append(
            f'<text x="{sx(x):.1f}" y="{ax_b + 18}" font-size="11" text-anchor="middle">{_fmt_tick(x)}</text>'
        )
    for y in _ticks(y_lo, y_hi):
        out.append(f'<line x1="{ax_l - 5}" y1="{sy(y):.1f}" x2="{ax_l}" y2="{sy(y):.1f}" stroke="black"/>')
        out.append(
            f'<text x="{ax_l - 8}" y="{sy(y) + 4:.1f}" font-size="11" text-anchor="end">{_fmt_tick(y)}</text>'
        )
    out.append(
        f'<text x="{(ax_l + WIDTH - MARGIN_R) / 2:.1f}" y="{HEIGHT - 12}" font-size="13" '
        f'text-anchor="middle">{xaxis}</text>'
    )
    out.append(
        f'<text x="18" y="{(MARGIN_T + ax_b) / 2:.1f}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 18 {(MARGIN_T + ax_b) / 2:.1f})">average fidelity</text>'
    )

    for i, (key, pts) in enumerate(groups.items()):
        pts = sorted(p for p in pts if not math.isnan(p[1]))
        color = SERIES_COLORS[i % len(SERIES_COLORS)]
        path = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        out.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.8"/>')
        label = ", ".join(f"{a}={v}" for a, v in key) or "fidelity"
        ly = MARGIN_T + 16 * i + 10
        out.append(
            f'<line x1="{WIDTH - MARGIN_R + 10}" y1="{ly}" x2="{WIDTH - MARGIN_R + 34}" y2="{ly}" '
            f'stroke="{color}" stroke-width="1.8"/>'
        )
        out.append(
            f'<text x="{WIDTH - MARGIN_R + 40}" y="{ly + 4}" font-size="11">{label}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _band_color(f: float) -> str:
    for threshold, color, _ in BAND_COLORS:
        if f >= threshold:
            return color
    return BAND_COLORS[-1][1]


def render_heatmap(result: SweepResult) -> str:
    """Banded (alpha, kappa) fidelity landscape, one panel per remaining axis combo."""
    varying = _varying_axes(result)
    heat_axes = [a for a in ("alpha", "kappa_over_kz") if a in varying]
    if len(heat_axes) != 2:
        raise ValueError("heatmap needs a 2-D sweep over alpha and kappa_over_kz")
    panel_axes = [a for a in varying if a not in heat_axes]

    xs = sorted(float(v) for v in _axis_values(result, "alpha"))
    ys = sorted(float(v) for v in _axis_values(result, "kappa_over_kz"))

    panels: dict[tuple, dict[tuple[float, float], float]] = {}
    for row in result.rows:
        key = tuple((a, row.point[a]) for a in panel_axes)
        panels.setdefault(key, {})[
            (float(row.point["alpha"]), float(row.point["kappa_over_kz"]))
        ] = row.fidelity
    for key, cells in panels.items():
        if len(cells) != len(xs) * len(ys):
            raise ValueError(f"wrong grid shape: panel {key} is not a full rectangle")

    pw = 360
    ph = 320
    width = MARGIN_L + len(panels) * (pw + 30) + 170
    height = MARGIN_T + ph + MARGIN_B
    out = _svg_header(width, height, f"{result.scenario.name}: fidelity landscape")

    cw = pw / len(xs)
    chh = ph / len(ys)
    for p_i, (key, cells) in enumerate(panels.items()):
        x0 = MARGIN_L + p_i * (pw + 30)
        y0 = MARGIN_T
        label = ", ".join(f"{a}={v}" for a, v in key) or result.scenario.gate_label
        out.append(
            f'<text x="{x0 + pw / 2:.1f}" y="{y0 - 6}" font-size="12" text-anchor="middle">{label}</text>'
        )
        for iy, yv in enumerate(ys):
            for ix, xv in enumerate(xs):
                f = cells[(xv, yv)]
                color = "#cccccc" if math.isnan(f) else _band_color(f)
                # y axis grows upward: highest kappa at the top row
                cy = y0 + ph - (iy + 1) * chh
                out.append(
                    f'<rect x="{x0 + ix * cw:.2f}" y="{cy:.2f}" width="{cw:.2f}" '
                    f'height="{chh:.2f}" fill="{color}"/>'
                )
        out.append(f'<rect x="{x0}" y="{y0}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
        for ix in range(0, len(xs), max(1, len(xs) // 5)):
            px = x0 + (ix + 0.5) * cw
            out.append(
                f'<text x="{px:.1f}" y="{y0 + ph + 16}" font-size="10" text-anchor="middle">{_fmt_tick(xs[ix])}</text>'
            )
        out.append(
            f'<text x="{x0 + pw / 2:.1f}" y="{y0 + ph + 34}" font-size="12" text-anchor="middle">alpha</text>'
        )
        if p_i == 0:
            for iy in range(0, len(ys), max(1, len(ys) // 4)):
                py = y0 + ph - (iy + 0.5) * chh
                out.append(
                    f'<text x="{x0 - 6:.1f}" y="{py + 3:.1f}" font-size="10" text-anchor="end">{_fmt_tick(ys[iy])}</text>'
                )
            out.append(
                f'<text x="{x0 - 44}" y="{y0 + ph / 2:.1f}" font-size="12" text-anchor="middle" '
                f'transform="rotate(-90 {x0 - 44} {y0 + ph / 2:.1f})">kappa / kappa_z</text>'
            )

    lx = MARGIN_L + len(panels) * (pw + 30) + 10
    for i, (_, color, label) in enumerate(BAND_COLORS):
        ly = MARGIN_T + 22 * i
        out.append(f'<rect x="{lx}" y="{ly}" width="16" height="16" fill="{color}" stroke="black"/>')
        out.append(f'<text x="{lx + 22}" y="{ly + 12}" font-size="11">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg(result: SweepResult, kind: str, path: str) -> None:
    """Render ``lines`` or ``heatmap`` and write the SVG file."""
    if kind == "lines":
        text = render_lines(result)
    elif kind == "heatmap":
        text = render_heatmap(result)
    else:
        raise ValueError(f"unknown plot kind {kind!r}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
