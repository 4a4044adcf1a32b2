"""
Saving state and reproducing figures
====================================

Lattices round-trip through a plain text format bit for bit, so a long run
can be stopped and resumed. Figures are written as deterministic SVG with
the data alongside as CSV.
"""

# %%
from pathlib import Path

from latmaxwell import SQRT_ALPHA, ORIGIN, FieldState, run_maxwell
from latmaxwell.fileio import load_lattice, save_lattice
from latmaxwell.figures import FIGURES, reproduce_figure

out = Path("notebook_output")
out.mkdir(exist_ok=True)

first = run_maxwell(SQRT_ALPHA, 20, probes=[])
for name, lat in first.final_state.lattices.items():
    save_lattice(lat, out / f"{name}.lat")

resumed = FieldState([load_lattice(out / f"{f}.lat") for f in first.final_state.names])
tail = run_maxwell(SQRT_ALPHA, 10, state=resumed)
whole = run_maxwell(SQRT_ALPHA, 30)
print("resumed equals straight run:", tail.series("Ex", ORIGIN)[-1] == whole.series("Ex", ORIGIN)[-1])

# %%
for n, spec in FIGURES.items():
    if spec.steps <= 50:
        paths = reproduce_figure(n, out)
        print(n, spec.label, "->", paths["svg"].name)
