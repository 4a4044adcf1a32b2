"""
A coupling table of your own
============================

The engine is not tied to electromagnetism. Any list of (source,
destination, offset, factor) entries defines a linear lattice update.
Here a single lattice diffuses on a line.
"""

# %%
import numpy as np

from latmaxwell import CouplingEntry, EngineState, SparseLattice, run, slice_along_x

D = 0.25
table = [
    CouplingEntry("u", "u", (0, 0, 0), 1 - 2 * D),
    CouplingEntry("u", "u", (1, 0, 0), D),
    CouplingEntry("u", "u", (-1, 0, 0), D),
]
state = EngineState([SparseLattice.from_dict("u", {(0, 0, 0): 1.0})])
record = run(state, table, 40, probes=[("u", (0, 0, 0))])

# %%
# Mass is conserved and the profile spreads like a binomial distribution.
u = record.final_state["u"]
profile = slice_along_x(u, half_width=40)
print("total", u.values().real.sum())
print("variance", float(np.sum(profile.t**2 * profile.values)), "expected", 2 * D * 40)

# %%
# Complex factors rotate the phase; here a pure translation with a quarter turn.
table = [CouplingEntry("u", "u", (1, 0, 0), 1j)]
print(run(state, table, 4).final_state["u"].to_dict())
