"""
Pruning small values
====================

The number of stored sites grows with the cube of the run length. Keeping
only the largest values per lattice bounds memory and barely touches the
field at the origin.
"""

# %%
import time

from latmaxwell import ORIGIN, SQRT_ALPHA, PrunePolicy, run_maxwell, significant_digit_agreement

steps = 100
t0 = time.perf_counter()
full = run_maxwell(SQRT_ALPHA, steps)
print(f"unpruned: {full.final_state}  ({time.perf_counter() - t0:.1f} s)")

# %%
for budget in (100_000, 20_000, 5_000):
    t0 = time.perf_counter()
    pruned = run_maxwell(SQRT_ALPHA, steps, policy=PrunePolicy.budget(budget))
    a = full.series("Ex", ORIGIN)[-1].real
    b = pruned.series("Ex", ORIGIN)[-1].real
    dropped = sum(r.dropped_abs_sum for r in pruned.prune_reports)
    print(f"budget {budget:>7}: {significant_digit_agreement(a, b):2d} digits agree, "
          f"dropped |.| total {dropped:.2e}, {time.perf_counter() - t0:.1f} s")
