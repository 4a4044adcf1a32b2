"""
The first wave at the origin
============================

Start from a single unit of Ex at the origin, step the discretized vacuum
equations and watch the field come back to the origin.
"""

# %%
# A coupling factor around 0.0854 (the square root of the fine structure
# constant) brings the first returning wave almost exactly back to height 1.
from pathlib import Path

from latmaxwell import SQRT_ALPHA, ORIGIN, detect_maxima, probe_series, run_maxwell
from latmaxwell.plotting import render_line_plot

out = Path("notebook_output")
out.mkdir(exist_ok=True)
record = run_maxwell(SQRT_ALPHA, 60, probes=[("Ex", ORIGIN), ("Bz", (0, 1, 0))])
ex = probe_series(record, "Ex", ORIGIN)
bz = probe_series(record, "Bz", (0, 1, 0))

# %%
# Ex stays at 1 for the first step, drops while the wave leaves, then returns.
for t in (0, 1, 2, 10, 28, 40):
    print(f"Ex(t={t:2d}) = {ex.at(t):+.15f}")

# %%
# Maxima: the start of the run counts as the first one.
for t, h in detect_maxima(ex).maxima:
    print(f"maximum at t={t}: {h:.12f}")

# %%
# The neighbouring Bz site lives on the odd sublattice and oscillates against Ex.
render_line_plot([ex, bz], out / "first_wave.svg", "t", "field")
render_line_plot([bz, ex], out / "bz_vs_ex.svg", "Bz(0,1,0)", "Ex(0,0,0)", mode="xy")
print("plots in", out)
