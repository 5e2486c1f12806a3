"""Plot emission: a gnuplot script over the CSV and, optionally, PNG figures.

Figures go through ``matplotlib.figure.Figure`` with the Agg canvas, so no
pyplot state is shared between experiments running in parallel threads.
"""

from __future__ import annotations

import math
import os
from typing import Sequence

RC = {
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.2,
    "lines.markersize": 4,
    "savefig.dpi": 120,
}


def _col(header: Sequence[str], name: str) -> int:
    return list(header).index(name) + 1


def _groups(header, rows, group):
    if group is None:
        return [None]
    j = list(header).index(group)
    seen = []
    for r in rows:
        if r[j] not in seen:
            seen.append(r[j])
    return seen


def gnuplot_script(outcome, csv_name: str = "results.csv") -> str:
    """Plain-text gnuplot script with one PNG terminal output per panel."""
    lines = ["# generated by laplace-calc; run with: gnuplot plot.gp",
             "set datafile separator ','",
             "set key autotitle columnhead",
             "set terminal pngcairo size 800,560"]
    h = outcome.header
    for spec in outcome.plots:
        lines.append("")
        lines.append(f"set output '{spec.name}.gp.png'")
        lines.append(f"set title '{spec.title or spec.name}'")
        lines.append(f"set xlabel '{spec.x}'")
        lines.append("set logscale y" if spec.logy else "unset logscale y")
        xc = _col(h, spec.x)
        parts = []
        for g in _groups(h, outcome.rows, spec.group):
            for y in spec.y:
                yc = _col(h, y)
                if g is None:
                    parts.append(f"'{csv_name}' using {xc}:{yc} with {spec.style} title '{y}'")
                else:
                    gc = _col(h, spec.group)
                    parts.append(f"'{csv_name}' using {xc}:(strcol({gc}) eq '{_fmt_key(g)}' ? ${yc} : NaN) "
                                 f"with {spec.style} title '{y} {spec.group}={_fmt_key(g)}'")
        lines.append("plot " + ", \\\n     ".join(parts))
    lines.append("")
    return "\n".join(lines)


def _fmt_key(v) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _numeric(v):
    try:
        x = float(v)
    except (TypeError, ValueError):
        return math.nan
    return x


def render_figures(outcome, out_dir: str) -> list:
    """Render each plot panel to ``<name>.png`` in ``out_dir``; returns the file names."""
    from matplotlib import rc_context
    from matplotlib.backends.backend_agg import FigureCanvasAgg
    from matplotlib.figure import Figure

    names = []
    h = list(outcome.header)
    markers = ["o", "x", "s", "^", "v", "d"]
    with rc_context(RC):
        for spec in outcome.plots:
            fig = Figure(figsize=(6.4, 4.5))
            FigureCanvasAgg(fig)
            ax = fig.add_subplot(1, 1, 1)
            xj = h.index(spec.x)
            for g in _groups(h, outcome.rows, spec.group):
                rows = outcome.rows if g is None else [r for r in outcome.rows
                                                       if r[h.index(spec.group)] == g]
                xs = [_numeric(r[xj]) for r in rows]
                for k, y in enumerate(spec.y):
                    ys = [_numeric(r[h.index(y)]) for r in rows]
                    if spec.logy:
                        ys = [abs(v) if v != 0 else math.nan for v in ys]
                    label = y if g is None else f"{y} ({spec.group}={_fmt_key(g)})"
                    m = "" if spec.style == "lines" else markers[k % len(markers)]
                    ls = "" if spec.style == "points" else "-"
                    ax.plot(xs, ys, marker=m, linestyle=ls, label=label,
                            fillstyle="full" if k == 0 else "none")
            if spec.logy:
                ax.set_yscale("log")
            ax.set_xlabel(spec.x)
            ax.set_title(spec.title or spec.name)
            if ax.get_legend_handles_labels()[0]:
                ax.legend(fontsize=8)
            fig.tight_layout()
            fname = f"{spec.name}.png"
            fig.savefig(os.path.join(out_dir, fname))
            names.append(fname)
    return names
