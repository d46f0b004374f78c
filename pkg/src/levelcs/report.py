"""CSV and SVG output for sweeps."""
from __future__ import annotations

import math
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .experiments import PhaseGrid, SweepResult, TrialOutcome

__all__ = [
    "SUMMARY_HEADER",
    "TRIALS_HEADER",
    "format_csv",
    "emit_csv",
    "format_trials_csv",
    "emit_trials_csv",
    "read_trials_csv",
    "emit_svg_heatmap",
    "render_svg_heatmap",
    "gray",
]

SUMMARY_HEADER = "m,s_total,trials,successes,success_rate,mean_rel_err"
TRIALS_HEADER = "m,s_total,trial_index,rel_err,success,iterations,stop_reason"
CELL = 20


def _sci(v: float) -> str:
    return "inf" if math.isinf(v) else f"{v:.5e}"


def _header(result: SweepResult) -> list[str]:
    return [f"# seed={result.seed}", f"# config={result.config}"]


def format_csv(result: SweepResult) -> str:
    if not result.rows:
        raise ValueError("empty table")
    lines = _header(result) + [SUMMARY_HEADER]
    for r in result.rows:
        lines.append(f"{r.m},{r.s_total},{r.trials},{r.successes},"
                     f"{r.success_rate:.4f},{_sci(r.mean_rel_err)}")
    return "\n".join(lines) + "\n"


def _write(path, text: str):
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(text)


def emit_csv(result: SweepResult, path) -> None:
    _write(path, format_csv(result))


def format_trials_csv(result: SweepResult) -> str:
    """Per-trial dump; ``rel_err`` uses ``repr`` so it reads back exactly."""
    lines = _header(result) + [TRIALS_HEADER]
    for o in result.outcomes:
        lines.append(f"{o.m},{o.s_total},{o.trial_index},{o.rel_err!r},"
                     f"{int(o.success)},{o.iterations},{o.stop_reason}")
    return "\n".join(lines) + "\n"


def emit_trials_csv(result: SweepResult, path) -> None:
    _write(path, format_trials_csv(result))


def read_trials_csv(path) -> list[TrialOutcome]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line == TRIALS_HEADER:
                continue
            m, s, t, err, ok, it, reason = line.split(",")
            out.append(TrialOutcome(int(m), int(t), float(err), bool(int(ok)),
                                    int(it), reason, int(s)))
    return out


def gray(rate: float) -> str:
    """Linear grayscale: 0 is black, 1 is white."""
    level = int(math.floor(255 * min(max(rate, 0.0), 1.0) + 0.5))
    return f"#{level:02x}{level:02x}{level:02x}"


def render_svg_heatmap(rates, s_values: Sequence[int], m_values: Sequence[int],
                       skipped=None, title: str = "") -> str:
    """Success-rate heat map: m along x, s along y (largest s at the top)."""
    rates = np.asarray(rates, dtype=float)
    if rates.size == 0:
        raise ValueError("empty grid")
    rows, cols = rates.shape
    if skipped is None:
        skipped = np.isnan(rates)
    left, top, bottom = 48, 28 if title else 12, 44
    width = left + cols * CELL + 12
    height = top + rows * CELL + bottom
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="9">',
        '<defs><pattern id="hatch" width="6" height="6" patternUnits="userSpaceOnUse" '
        'patternTransform="rotate(45)"><rect width="6" height="6" fill="#ffffff"/>'
        '<line x1="0" y1="0" x2="0" y2="6" stroke="#c00000" stroke-width="2"/>'
        '</pattern></defs>',
    ]
    if title:
        out.append(f'<text x="{left}" y="16" font-size="11">{escape(title)}</text>')
    for i in range(rows):
        y = top + (rows - 1 - i) * CELL
        for j in range(cols):
            x = left + j * CELL
            if skipped[i, j]:
                out.append(f'<rect class="cell skipped" x="{x}" y="{y}" width="{CELL}" '
                           f'height="{CELL}" fill="url(#hatch)"/>')
            else:
                out.append(f'<rect class="cell" x="{x}" y="{y}" width="{CELL}" '
                           f'height="{CELL}" fill="{gray(rates[i, j])}"/>')
        out.append(f'<text x="{left - 4}" y="{y + CELL / 2 + 3}" '
                   f'text-anchor="end">{s_values[i]}</text>')
    base = top + rows * CELL
    for j, m in enumerate(m_values):
        out.append(f'<text x="{left + j * CELL + CELL / 2}" y="{base + 12}" '
                   f'text-anchor="middle">{m}</text>')
    out.append(f'<text x="{left + cols * CELL / 2}" y="{base + 30}" '
               f'text-anchor="middle" font-size="11">m</text>')
    out.append(f'<text x="12" y="{top + rows * CELL / 2}" text-anchor="middle" '
               f'font-size="11">s</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg_heatmap(grid: PhaseGrid, path, title: str = "") -> None:
    _write(path, render_svg_heatmap(grid.rates, grid.s_values, grid.m_values,
                                    grid.skipped, title))

