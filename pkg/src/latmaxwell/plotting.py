"""Static SVG plots of series.

Output is byte-for-byte reproducible: no timestamp metadata and a fixed
hash salt for SVG element ids.
"""

from __future__ import annotations

import os
from collections.abc import Sequence

import matplotlib

matplotlib.use("Agg")
from matplotlib.figure import Figure  # noqa: E402

from .analysis import Series  # noqa: E402

_RC = {"svg.hashsalt": "latmaxwell", "svg.fonttype": "path"}


def render_line_plot(
    series: Sequence[Series],
    path: str | os.PathLike,
    xlabel: str = "t",
    ylabel: str = "",
    *,
    title: str | None = None,
    mode: str = "line",
    markers: bool = False,
) -> None:
    """Draw series against their abscissae, or one against another.

    In ``mode="xy"`` exactly two series are required; the first gives the
    horizontal coordinate and the second the vertical one, paired on ``t``.
    """
    if not series:
        raise ValueError("nothing to plot")
    with matplotlib.rc_context(_RC):
        fig = Figure(figsize=(8, 3) if mode == "line" else (5, 5))
        ax = fig.add_subplot()
        style = dict(lw=1.0, marker="." if markers else None, ms=3)
        if mode == "line":
            for s in series:
                ax.plot(s.t, s.values, label=s.name or None, **style)
            if len(series) > 1:
                ax.legend(loc="best", fontsize="small")
        elif mode == "xy":
            if len(series) != 2:
                raise ValueError("xy mode takes exactly two series")
            a, b = series
            if a.t.shape != b.t.shape or (a.t != b.t).any():
                raise ValueError("xy series must share their t values")
            ax.plot(a.values, b.values, **style)
        else:
            raise ValueError(f"unknown plot mode {mode!r}")
        ax.axhline(0, color="0.7", lw=0.5)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title, fontsize="medium")
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
