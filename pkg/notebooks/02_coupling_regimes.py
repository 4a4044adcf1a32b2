"""
Three regimes of the coupling factor
====================================

The height of the second maximum depends on p. Below about 0.085 it falls
short of 1, above it overshoots, and beyond 1/8 the maxima grow right away.
"""

# %%
import numpy as np

from latmaxwell import ORIGIN, SQRT_ALPHA, detect_maxima, probe_series, run_maxwell

for p in (1 / 16, SQRT_ALPHA, 0.08672495, 1 / 8, 0.2):
    s = probe_series(run_maxwell(p, 60), "Ex", ORIGIN)
    rep = detect_maxima(s)
    t2, h2 = rep.maxima[1]
    print(f"p={p:.8f}  second maximum t={t2:2d}  height={h2:.10f}  all: {np.round(rep.heights, 3)}")

# %%
# Bisection on p for a second maximum of exactly 1. Each evaluation is a
# 40-step run, so this takes a few seconds.
lo, hi = 1 / 16, 1 / 8
for _ in range(30):
    mid = (lo + hi) / 2
    h = detect_maxima(probe_series(run_maxwell(mid, 40), "Ex", ORIGIN)).maxima[1][1]
    lo, hi = (mid, hi) if h < 1 else (lo, mid)
print(f"second maximum reaches 1 at p ~ {lo:.10f}")
