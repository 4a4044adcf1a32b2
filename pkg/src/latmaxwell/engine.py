"""Table-driven iteration over a set of named lattices.

One iteration starts every lattice from an empty frame and applies each
:class:`CouplingEntry` of the table, in order, as a shifted scaled addition
from the previous frame. Nothing is carried forward implicitly; a lattice
keeps its value only through an explicit identity entry
(source == destination, zero offset, factor 1).
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .lattice import (
    DenseLattice,
    Lattice,
    PruneReport,
    Site,
    SparseLattice,
    as_quantity,
    as_site,
    ensure_shift_fits,
)

log = logging.getLogger(__name__)


class ValidationError(ValueError):
    """A coupling table or run configuration is inconsistent."""


class NonFiniteError(FloatingPointError):
    """A step produced Inf or NaN."""


@dataclass(frozen=True)
class CouplingEntry:
    """``destination[s + offset] += factor * source[s]`` for every source site."""

    source: str
    destination: str
    offset: Site
    factor: complex

    def __post_init__(self):
        object.__setattr__(self, "offset", as_site(self.offset))
        object.__setattr__(self, "factor", complex(self.factor))


CouplingTable = Sequence[CouplingEntry]


@dataclass(frozen=True)
class PrunePolicy:
    enabled: bool = False
    per_lattice_budget: int | None = None

    def __post_init__(self):
        if self.enabled and (self.per_lattice_budget is None or self.per_lattice_budget < 1):
            raise ValidationError("an enabled prune policy needs a budget >= 1")

    @classmethod
    def budget(cls, sites: int) -> PrunePolicy:
        return cls(True, int(sites))


NO_PRUNING = PrunePolicy()


class EngineState:
    """Named lattices that all sit at the same iteration number."""

    def __init__(self, lattices: Iterable[Lattice] | dict[str, Lattice]):
        if isinstance(lattices, dict):
            lattices = lattices.values()
        self.lattices: dict[str, Lattice] = {}
        for lat in lattices:
            if lat.name in self.lattices:
                raise ValidationError(f"duplicate lattice name {lat.name!r}")
            self.lattices[lat.name] = lat
        iters = {lat.iteration for lat in self.lattices.values()}
        if len(iters) > 1:
            raise ValidationError(f"lattices are at different iterations: {sorted(iters)}")
        self._iteration = iters.pop() if iters else 0

    @property
    def iteration(self) -> int:
        return self._iteration

    @property
    def names(self) -> list[str]:
        return list(self.lattices)

    def __getitem__(self, name: str) -> Lattice:
        return self.lattices[name]

    def __contains__(self, name: str) -> bool:
        return name in self.lattices

    def get(self, name: str, site) -> complex:
        return self.lattices[name].get(site)

    def nonzero_count(self) -> int:
        return sum(lat.nonzero_count() for lat in self.lattices.values())

    def copy(self):
        return self._like([lat.copy() for lat in self.lattices.values()])

    def _like(self, lattices):
        # subclasses with extra constructor checks inherit this
        return type(self)(lattices)

    def __repr__(self) -> str:
        body = ", ".join(f"{n}={lat.nonzero_count()}" for n, lat in self.lattices.items())
        return f"{type(self).__name__}(iteration={self.iteration}, {body})"


@dataclass
class RunRecord:
    """Probe series and pruning history of one run.

    ``values[n, k]`` is the quantity of probe ``k`` at iteration
    ``start + n``.
    """

    probes: list[tuple[str, Site]]
    values: np.ndarray
    start: int
    prune_reports: list[PruneReport] = field(default_factory=list)
    final_state: EngineState | None = None

    @property
    def iterations(self) -> np.ndarray:
        return np.arange(self.start, self.start + self.values.shape[0])

    def index(self, lattice: str, site) -> int:
        key = (lattice, as_site(site))
        try:
            return self.probes.index(key)
        except ValueError:
            raise KeyError(f"no probe registered for {lattice} at {key[1]}") from None

    def series(self, lattice: str, site) -> np.ndarray:
        return self.values[:, self.index(lattice, site)]


def validate_table(table: CouplingTable, state: EngineState) -> list[str]:
    """List every problem with ``table`` against ``state``; empty means valid."""
    problems = []
    for i, e in enumerate(table):
        for role, name in (("source", e.source), ("destination", e.destination)):
            if name not in state:
                problems.append(f"entry {i}: {role} lattice {name!r} not in state")
        if not (math.isfinite(e.factor.real) and math.isfinite(e.factor.imag)):
            problems.append(f"entry {i}: factor {e.factor!r} is not finite")
    return problems


def step(state: EngineState, table: CouplingTable):
    """Advance ``state`` by one iteration of ``table``.

    All reads come from the current frames; each destination's new frame
    receives its entries' contributions in table order.

    Raises:
        ValidationError: the table references unknown lattices or has a
            non-finite factor.
        NonFiniteError: a new quantity overflowed to Inf or NaN.
    """
    problems = validate_table(table, state)
    if problems:
        raise ValidationError("; ".join(problems))

    n_next = state.iteration + 1
    by_dst: dict[str, list[CouplingEntry]] = {name: [] for name in state.names}
    for e in table:
        by_dst[e.destination].append(e)

    packed = None
    new = []
    for name, lat in state.lattices.items():
        entries = by_dst[name]
        if isinstance(lat, DenseLattice):
            frame = DenseLattice(name, lat.lo, lat.hi, iteration=n_next)
            for e in entries:
                frame.add_shifted_scaled(state[e.source], e.offset, as_quantity(e.factor))
        else:
            if packed is None:
                packed = _pack_sources(state)
            frame = _sparse_frame(name, n_next, entries, packed)
        new.append(frame)
        _check_finite(frame)
    return state._like(new)


def _pack_sources(state: EngineState):
    """Concatenate every lattice as sorted keys/values for the gather kernel."""
    keys, vals, spans, bounds = [], [], {}, {}
    pos = 0
    for name, lat in state.lattices.items():
        if isinstance(lat, SparseLattice):
            k, v, b = lat.keys, lat.values(), lat.bound
        else:
            coords = lat.sites()
            k, v = _kernels.encode(coords), lat.values()
            b = int(np.abs(coords).max()) if coords.size else 0
        keys.append(k)
        vals.append(v)
        spans[name] = (pos, pos + k.size)
        bounds[name] = b
        pos += k.size
    all_keys = np.concatenate(keys) if keys else np.empty(0, np.int64)
    all_vals = np.concatenate(vals) if vals else np.empty(0, np.complex128)
    return all_keys, all_vals, spans, bounds


def _sparse_frame(name: str, iteration: int, entries: list[CouplingEntry], packed) -> SparseLattice:
    all_keys, all_vals, spans, bounds = packed
    if not entries:
        return SparseLattice(name, iteration)
    m = len(entries)
    starts = np.empty(m, np.int64)
    stops = np.empty(m, np.int64)
    shifts = np.empty(m, np.int64)
    fre = np.empty(m)
    fim = np.empty(m)
    bound = 0
    for j, e in enumerate(entries):
        a, b = spans[e.source]
        starts[j], stops[j] = a, b
        src_bound = ensure_shift_fits(all_keys[a:b], bounds[e.source], e.offset)
        bound = max(bound, src_bound + max(abs(c) for c in e.offset))
        shifts[j] = _kernels.shift_of(e.offset)
        f = as_quantity(e.factor)
        fre[j], fim[j] = f.real, f.imag
    keys, vals = _kernels.gather(all_keys, all_vals, starts, stops, shifts, fre, fim)
    return SparseLattice._wrap(name, iteration, keys, vals, bound)


def _check_finite(lat: Lattice) -> None:
    vals = lat.values()
    bad = ~np.isfinite(vals)
    if np.any(bad):
        site = tuple(lat.sites()[np.argmax(bad)].tolist())
        raise NonFiniteError(
            f"non-finite quantity in lattice {lat.name!r} at iteration {lat.iteration}, site {site}"
        )


def run(
    state: EngineState,
    table: CouplingTable | None,
    steps: int,
    probes: Iterable[tuple[str, Site]] = (),
    policy: PrunePolicy = NO_PRUNING,
    *,
    stepper: Callable[[EngineState], EngineState] | None = None,
    on_step: Callable[[EngineState], None] | None = None,
) -> RunRecord:
    """Iterate ``steps`` times, recording probes and pruning after each step.

    ``stepper`` replaces table stepping (used for the fused Maxwell stencil);
    ``on_step`` sees every state, including the initial one.
    """
    if steps < 0:
        raise ValidationError("steps must be >= 0")
    probes = [(name, as_site(site)) for name, site in probes]
    for name, _ in probes:
        if name not in state:
            raise ValidationError(f"probe lattice {name!r} not in state")
    if stepper is None:
        if table is None:
            raise ValidationError("either a table or a stepper is required")
        problems = validate_table(table, state)
        if problems:
            raise ValidationError("; ".join(problems))
        stepper = lambda s: step(s, table)  # noqa: E731

    values = np.empty((steps + 1, len(probes)), dtype=np.complex128)
    reports: list[PruneReport] = []

    def record(n: int, s: EngineState) -> None:
        for k, (name, site) in enumerate(probes):
            values[n, k] = s.get(name, site)
        if on_step is not None:
            on_step(s)

    start = state.iteration
    record(0, state)
    for n in range(1, steps + 1):
        state = stepper(state)
        if policy.enabled:
            for lat in state.lattices.values():
                if lat.nonzero_count() > policy.per_lattice_budget:
                    reports.append(lat.prune(policy.per_lattice_budget))
        record(n, state)
        if n % 50 == 0:
            log.debug("iteration %d: %d stored sites", state.iteration, state.nonzero_count())
    return RunRecord(probes, values, start, reports, state)
