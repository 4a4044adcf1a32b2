"""End-to-end reproductions of the nine published plots.

Each figure runs its own canonical simulation (no pruning) and writes an
SVG plot plus the CSV data behind it.

====  =========================  ======  ====================================
fig   coupling factor            steps   content
====  =========================  ======  ====================================
1     1/16                       50      first wave, Ex(t,0,0,0)
2     sqrt(alpha)                40      first wave, Ex(t,0,0,0)
3     1/8                        40      first wave, Ex(t,0,0,0)
4     1/16                       160     long term, Ex(t,0,0,0)
5     sqrt(alpha)                160     long term, Ex(t,0,0,0)
6     1/8                        160     long term, Ex(t,0,0,0)
7     sqrt(alpha)                160     Ex(t,0,0,0) with Bz(t,0,1,0)
8     sqrt(alpha)                160     Bz(t,0,1,0) vs Ex(t,0,0,0)
9     sqrt(alpha)                150     Ex(150,x,0,0) vs x
====  =========================  ======  ====================================
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from .analysis import Series, probe_series, slice_along_x
from .fileio import export_series_csv
from .maxwell import ORIGIN, SQRT_ALPHA, run_maxwell
from .plotting import render_line_plot


@dataclass(frozen=True)
class FigureSpec:
    number: int
    p: float
    steps: int
    kind: str
    label: str


FIGURES = {
    1: FigureSpec(1, 1 / 16, 50, "probe", "first wave, p = 1/16"),
    2: FigureSpec(2, SQRT_ALPHA, 40, "probe", "first wave, p = sqrt(alpha)"),
    3: FigureSpec(3, 1 / 8, 40, "probe", "first wave, p = 1/8"),
    4: FigureSpec(4, 1 / 16, 160, "probe", "long term, p = 1/16"),
    5: FigureSpec(5, SQRT_ALPHA, 160, "probe", "long term, p = sqrt(alpha)"),
    6: FigureSpec(6, 1 / 8, 160, "probe", "long term, p = 1/8"),
    7: FigureSpec(7, SQRT_ALPHA, 160, "pair", "Ex and Bz, p = sqrt(alpha)"),
    8: FigureSpec(8, SQRT_ALPHA, 160, "xy", "Ex against Bz, p = sqrt(alpha)"),
    9: FigureSpec(9, SQRT_ALPHA, 150, "slice", "Ex after 150 iterations, p = sqrt(alpha)"),
}

BZ_PROBE = ("Bz", (0, 1, 0))


def figure_data(n: int) -> list[Series]:
    """Run the simulation behind figure ``n`` and return its plotted series."""
    spec = FIGURES[n]
    if spec.kind == "probe":
        rec = run_maxwell(spec.p, spec.steps)
        return [probe_series(rec, "Ex", ORIGIN)]
    if spec.kind in ("pair", "xy"):
        rec = run_maxwell(spec.p, spec.steps, [("Ex", ORIGIN), BZ_PROBE])
        ex, bz = probe_series(rec, "Ex", ORIGIN), probe_series(rec, *BZ_PROBE)
        return [ex, bz] if spec.kind == "pair" else [bz, ex]
    rec = run_maxwell(spec.p, spec.steps, [])
    return [slice_along_x(rec.final_state["Ex"], half_width=spec.steps)]


def reproduce_figure(n: int, out_dir: str | os.PathLike) -> dict[str, Path]:
    """Write ``figN.svg`` and ``figN.csv`` into ``out_dir``."""
    if n not in FIGURES:
        raise ValueError(f"figure number must be 1..9, got {n}")
    spec = FIGURES[n]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    series = figure_data(n)
    svg, csv = out / f"fig{n}.svg", out / f"fig{n}.csv"
    if spec.kind == "xy":
        export_series_csv(series, csv)
        render_line_plot(series, svg, "Bz(t,0,1,0)", "Ex(t,0,0,0)", title=spec.label, mode="xy")
    elif spec.kind == "slice":
        export_series_csv(series, csv, index_label="x")
        render_line_plot(series, svg, "x", "Ex(150,x,0,0)", title=spec.label)
    else:
        export_series_csv(series, csv)
        ylabel = "Ex(t,0,0,0)" if spec.kind == "probe" else "Ex(t,0,0,0), Bz(t,0,1,0)"
        render_line_plot(series, svg, "t", ylabel, title=spec.label)
    return {"svg": svg, "csv": csv}
