"""Discretized vacuum Maxwell equations on the integer lattice.

With ``B~ = c B`` the vacuum curl equations read ``dE/dt = c curl B~`` and
``dB~/dt = -c curl E``. Measuring time in units of the minimal time
difference ``dt`` and location in units of half the minimal location
difference ``ds/2`` puts every field on integer coordinates, and replacing
each derivative by the minimal symmetric difference gives the explicit
update (all right-hand sides read time ``t``; E and B advance together,
not leapfrogged)::

    Ex(t+1) = Ex + p [Bz(y+1) - Bz(y-1)] - p [By(z+1) - By(z-1)]
    Ey(t+1) = Ey + p [Bx(z+1) - Bx(z-1)] - p [Bz(x+1) - Bz(x-1)]
    Ez(t+1) = Ez + p [By(x+1) - By(x-1)] - p [Bx(y+1) - Bx(y-1)]
    Bx(t+1) = Bx - p [Ez(y+1) - Ez(y-1)] + p [Ey(z+1) - Ey(z-1)]
    By(t+1) = By - p [Ex(z+1) - Ex(z-1)] + p [Ez(x+1) - Ez(x-1)]
    Bz(t+1) = Bz - p [Ey(x+1) - Ey(x-1)] + p [Ex(y+1) - Ex(y-1)]

where ``p = c dt / ds`` is the dimensionless coupling factor.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from .engine import (
    NO_PRUNING,
    CouplingEntry,
    EngineState,
    PrunePolicy,
    RunRecord,
    ValidationError,
    run,
)
from .lattice import DenseLattice, Lattice, Site, SparseLattice, as_quantity, scaled_add

E_FIELDS = ("Ex", "Ey", "Ez")
B_FIELDS = ("Bx", "By", "Bz")
FIELDS = E_FIELDS + B_FIELDS

ORIGIN: Site = (0, 0, 0)

# printed 12-digit value; squaring it gives 1/137.03599976 to ~1e-11
SQRT_ALPHA = 0.085424542921
ALPHA = 1 / 137.03599976

# Per destination, in accumulation order: (sign, source, axis, neighbour step).
# A term sign * p * F(v + d) reads the neighbour at +d along axis v.
_AXIS = {"x": 0, "y": 1, "z": 2}
_STENCIL: dict[str, tuple[tuple[int, str, int, int], ...]] = {}
for _dst, _terms in {
    "Ex": "+Bz y, -By z",
    "Ey": "+Bx z, -Bz x",
    "Ez": "+By x, -Bx y",
    "Bx": "-Ez y, +Ey z",
    "By": "-Ex z, +Ez x",
    "Bz": "-Ey x, +Ex y",
}.items():
    _arms = []
    for _t in _terms.split(", "):
        _sign = 1 if _t[0] == "+" else -1
        _src, _ax = _t[1:].split()
        _arms += [(_sign, _src, _AXIS[_ax], +1), (-_sign, _src, _AXIS[_ax], -1)]
    _STENCIL[_dst] = tuple(_arms)


@dataclass(frozen=True)
class PhysicalScale:
    """Speed of light and the minimal time and location differences (SI)."""

    c: float
    dt: float
    ds: float

    def __post_init__(self):
        for k in ("c", "dt", "ds"):
            v = getattr(self, k)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{k} must be finite and > 0, got {v!r}")


@dataclass(frozen=True)
class CouplingFactor:
    value: float

    def __post_init__(self):
        if not (math.isfinite(self.value) and self.value > 0):
            raise ValueError(f"coupling factor must be finite and > 0, got {self.value!r}")

    @property
    def grows_from_start(self) -> bool:
        """Above 1/8 the wave maxima at the origin grow from the first wave on."""
        return self.value > 1 / 8

    def __float__(self) -> float:
        return float(self.value)


def _p(p: CouplingFactor | float) -> float:
    return float(p) if isinstance(p, CouplingFactor) else float(CouplingFactor(float(p)))


def hat_coordinates(scale: PhysicalScale, t: float, x: float, y: float, z: float):
    """``(t/dt, 2x/ds, 2y/ds, 2z/ds)``; the caller rounds to lattice sites."""
    return t / scale.dt, 2 * x / scale.ds, 2 * y / scale.ds, 2 * z / scale.ds


def coupling_factor(scale: PhysicalScale) -> CouplingFactor:
    return CouplingFactor(scale.c * scale.dt / scale.ds)


def sqrt_alpha() -> float:
    return SQRT_ALPHA


class FieldState(EngineState):
    """The six hat-field lattices Ex..Bz at a shared iteration."""

    def __init__(self, lattices):
        super().__init__(lattices)
        missing = [f for f in FIELDS if f not in self.lattices]
        if missing:
            raise ValidationError(f"field state lacks lattices {missing}")


def canonical_initial_state(backend: str = "sparse", radius: int = 0) -> FieldState:
    """All fields zero except ``Ex(0,0,0) = 1`` at iteration 0.

    With ``backend="dense"`` every lattice covers the cube of half-width
    ``radius`` around the origin.
    """
    if backend == "sparse":
        lats = [SparseLattice(name) for name in FIELDS]
    elif backend == "dense":
        lats = [DenseLattice.centered(name, radius) for name in FIELDS]
    else:
        raise ValueError(f"unknown backend {backend!r}")
    lats[0].add_assign(ORIGIN, 1.0)
    return FieldState(lats)


def build_maxwell_table(p: CouplingFactor | float) -> list[CouplingEntry]:
    """The 30 coupling entries of one Maxwell iteration.

    Per field: the identity entry, then its four neighbour terms. Entry
    offsets shift the *source* site onto the destination, so a term reading
    ``F(v + 1)`` becomes an offset of -1 along ``v``.
    """
    p = _p(p)
    table = []
    for dst in FIELDS:
        table.append(CouplingEntry(dst, dst, ORIGIN, 1.0))
        for sign, src, axis, d in _STENCIL[dst]:
            off = [0, 0, 0]
            off[axis] = -d
            table.append(CouplingEntry(src, dst, tuple(off), sign * p))
    return table


def _common_box(state: FieldState):
    los, his = [], []
    for name in FIELDS:
        lat = state[name]
        if isinstance(lat, DenseLattice):
            los.append(lat.lo)
            his.append(lat.hi)
        else:
            ext = lat.linf_extent()
            if ext is not None:
                los.append(np.array(ext[0]))
                his.append(np.array(ext[1]))
    if not los:
        return np.zeros(3, np.int64), np.zeros(3, np.int64)
    return np.min(los, axis=0), np.max(his, axis=0)


def step_maxwell_direct(state: FieldState, p: CouplingFactor | float) -> FieldState:
    """One fused stencil iteration on dense arrays.

    Same per-site accumulation order as stepping :func:`build_maxwell_table`
    through the engine, hence bit-identical results. Dense input comes back
    dense with the box grown by one site per side; sparse input comes back
    sparse.
    """
    p = _p(p)
    lo, hi = _common_box(state)
    arrays = {}
    for name in FIELDS:
        lat = state[name]
        if isinstance(lat, DenseLattice) and np.array_equal(lat.lo, lo) and np.array_equal(lat.hi, hi):
            arrays[name] = lat.data
        else:
            arrays[name] = lat.to_dense(tuple(lo), tuple(hi)).data
    shape = arrays["Ex"].shape
    inner = tuple(slice(1, n + 1) for n in shape)
    n_next = state.iteration + 1

    new = []
    one = as_quantity(1.0)
    for dst in FIELDS:
        out = np.zeros(tuple(n + 2 for n in shape), dtype=np.complex128)
        scaled_add(out[inner], arrays[dst], one)
        for sign, src, axis, d in _STENCIL[dst]:
            # reading F(v + d) at site s means F's site s + d lands on s
            view = list(inner)
            view[axis] = slice(1 - d, 1 - d + shape[axis])
            scaled_add(out[tuple(view)], arrays[src], as_quantity(sign * p))
        lat = DenseLattice(dst, tuple(lo - 1), tuple(hi + 1), iteration=n_next, data=out)
        if not isinstance(state[dst], DenseLattice):
            lat = lat.to_sparse()
        new.append(lat)
    for name, lat in state.lattices.items():
        if name not in FIELDS:
            raise ValidationError(f"direct stepping cannot advance extra lattice {name!r}")
    return FieldState(new)


def run_maxwell(
    p: CouplingFactor | float,
    steps: int,
    probes: Iterable[tuple[str, Site]] = (("Ex", ORIGIN),),
    policy: PrunePolicy = NO_PRUNING,
    *,
    backend: str = "table",
    state: FieldState | None = None,
    on_step=None,
) -> RunRecord:
    """Run the Maxwell iteration from ``state`` (canonical by default).

    ``backend="table"`` steps the coupling table through the sparse engine;
    ``backend="direct"`` uses the fused dense stencil.
    """
    p = _p(p)
    if backend == "table":
        state = canonical_initial_state() if state is None else state
        return run(state, build_maxwell_table(p), steps, probes, policy, on_step=on_step)
    if backend == "direct":
        state = canonical_initial_state("dense") if state is None else state
        return run(
            state, None, steps, probes, policy,
            stepper=lambda s: step_maxwell_direct(s, p), on_step=on_step,
        )
    raise ValueError(f"unknown backend {backend!r}")


def parity_violations(lat: Lattice, even: bool) -> int:
    """Number of nonzero sites whose coordinate sum has the wrong parity."""
    s = lat.sites()
    if s.shape[0] == 0:
        return 0
    odd = (s.sum(axis=1) % 2).astype(bool)
    return int(np.count_nonzero(odd if even else ~odd))
