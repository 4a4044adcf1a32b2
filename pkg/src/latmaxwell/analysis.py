"""Observables derived from run records: probe series, wave maxima, growth."""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from .engine import RunRecord
from .lattice import Lattice, as_site


@dataclass(frozen=True)
class Series:
    """Real-valued samples at strictly increasing integer abscissae."""

    t: np.ndarray
    values: np.ndarray
    name: str = ""

    def __post_init__(self):
        t = np.asarray(self.t, dtype=np.int64)
        v = np.asarray(self.values, dtype=np.float64)
        if t.ndim != 1 or t.shape != v.shape:
            raise ValueError("t and values must be 1-D and of equal length")
        if np.any(np.diff(t) <= 0):
            raise ValueError("t must be strictly increasing")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.t.size

    def at(self, t: int) -> float:
        i = int(np.searchsorted(self.t, t))
        if i == self.t.size or self.t[i] != t:
            raise KeyError(t)
        return float(self.values[i])

    def window(self, lo: int, hi: int) -> Series:
        m = (self.t >= lo) & (self.t <= hi)
        return Series(self.t[m], self.values[m], self.name)


@dataclass(frozen=True)
class MaximaReport:
    maxima: list[tuple[int, float]]
    includes_start: bool

    @property
    def heights(self) -> list[float]:
        return [h for _, h in self.maxima]

    @property
    def times(self) -> list[int]:
        return [t for t, _ in self.maxima]


@dataclass(frozen=True)
class GrowthEstimate:
    per_step_factor: float
    window: tuple[int, int]
    method: str = "geometric-maxima"


def probe_name(lattice: str, site) -> str:
    x, y, z = as_site(site)
    return f"{lattice}({x},{y},{z})"


def probe_series(record: RunRecord, lattice: str, site) -> Series:
    """Real part of one probe over every recorded iteration."""
    vals = record.series(lattice, site)
    return Series(record.iterations, vals.real, probe_name(lattice, site))


def _plateaus(v: np.ndarray):
    """Runs of equal values as ``(first, last)`` index pairs."""
    edges = np.flatnonzero(np.diff(v) != 0)
    firsts = np.concatenate([[0], edges + 1])
    lasts = np.concatenate([edges, [v.size - 1]])
    return list(zip(firsts.tolist(), lasts.tolist()))


def _interior_extrema(v: np.ndarray, sign: int) -> list[int]:
    """First index of every interior plateau strictly above (sign=+1) or
    below (sign=-1) both neighbouring values."""
    out = []
    for a, b in _plateaus(v):
        if a == 0 or b == v.size - 1:
            continue
        if sign * (v[a] - v[a - 1]) > 0 and sign * (v[b] - v[b + 1]) > 0:
            out.append(a)
    return out


def detect_maxima(s: Series) -> MaximaReport:
    """Wave maxima of a series.

    Interior maxima are strict local maxima; a flat top counts once, at its
    first sample. The first sample is a maximum too when nothing up to the
    first interior minimum exceeds it, which makes the canonical start
    ``1, 1, 1 - 4p^2, ...`` the first wave maximum.

    Examples:
        >>> rep = detect_maxima(Series(range(6), [1, 1, 0.9, 0.5, 0.7, 0.6]))
        >>> rep.maxima
        [(0, 1.0), (4, 0.7)]
    """
    if len(s) < 3:
        raise ValueError("need at least 3 samples to find maxima")
    v = s.values
    minima = _interior_extrema(v, -1)
    stop = minima[0] if minima else v.size - 1
    includes_start = bool(np.all(v[0] >= v[: stop + 1]))
    idx = ([0] if includes_start else []) + _interior_extrema(v, +1)
    return MaximaReport([(int(s.t[i]), float(v[i])) for i in idx], includes_start)


def growth_factor(s: Series, window: tuple[int, int]) -> GrowthEstimate:
    """Average per-step growth of the wave maxima inside ``window``.

    Geometric mean of successive maxima ratios, normalized by the number
    of time steps between the first and last maximum.
    """
    lo, hi = window
    if lo < s.t[0] or hi > s.t[-1] or hi <= lo:
        raise ValueError(f"window {window} not within series range {s.t[0]}..{s.t[-1]}")
    maxima = [(t, h) for t, h in detect_maxima(s).maxima if lo <= t <= hi]
    if len(maxima) < 2:
        raise ValueError(f"fewer than 2 maxima in window {window}")
    if any(h <= 0 for _, h in maxima):
        raise ValueError("maxima heights must be positive for a growth factor")
    log_sum = sum(math.log(h2 / h1) for (_, h1), (_, h2) in zip(maxima, maxima[1:]))
    span = maxima[-1][0] - maxima[0][0]
    return GrowthEstimate(math.exp(log_sum / span), (lo, hi))


@dataclass(frozen=True)
class SubspaceSpec:
    """Sites whose fixed coordinates match; ``None`` leaves an axis free.

    ``SubspaceSpec()`` is all of space, ``SubspaceSpec(y=0, z=0)`` the x axis.
    """

    x: int | None = None
    y: int | None = None
    z: int | None = None

    @classmethod
    def point(cls, site) -> SubspaceSpec:
        return cls(*as_site(site))

    @classmethod
    def from_mapping(cls, fixed: Mapping[str, int]) -> SubspaceSpec:
        return cls(**fixed)

    def mask(self, sites: np.ndarray) -> np.ndarray:
        m = np.ones(sites.shape[0], dtype=bool)
        for axis, val in enumerate((self.x, self.y, self.z)):
            if val is not None:
                m &= sites[:, axis] == val
        return m


def subspace_sum(lat: Lattice, spec: SubspaceSpec) -> complex:
    vals = lat.values()[spec.mask(lat.sites())]
    return complex(vals.sum()) if vals.size else 0j


def subspace_statistic(lat: Lattice, spec: SubspaceSpec, kind: str = "square_sum") -> float:
    """Sum of ``q`` (real part), ``|q|`` or ``|q|^2`` over a subspace.

    ``kind`` is one of ``"sum"``, ``"abs_sum"``, ``"square_sum"``; use
    :func:`subspace_sum` for the complex sum.
    """
    vals = lat.values()[spec.mask(lat.sites())]
    if kind == "sum":
        return float(vals.real.sum())
    if kind == "abs_sum":
        return float(np.abs(vals).sum())
    if kind == "square_sum":
        return float((vals.real**2 + vals.imag**2).sum())
    raise ValueError(f"unknown statistic {kind!r}")


def significant_digit_agreement(a: float, b: float) -> int:
    """Leading decimal digits on which ``a`` and ``b`` agree, 0..15.

    Examples:
        >>> significant_digit_agreement(1.234567, 1.234599)
        4
        >>> significant_digit_agreement(1.0, -1.0)
        0
    """
    if a == b:
        return 15
    rel = abs(a - b) / max(abs(a), abs(b))
    return int(min(15, max(0, math.floor(-math.log10(rel)))))


def slice_along_x(lat: Lattice, y: int = 0, z: int = 0, half_width: int | None = None) -> Series:
    """``lat(x, y, z)`` against x, zero-filled over ``[-half_width, half_width]``."""
    if half_width is None:
        half_width = max(lat.l1_support_radius(), 0)
    xs = np.arange(-half_width, half_width + 1)
    vals = np.array([lat.get((int(x), y, z)).real for x in xs])
    return Series(xs, vals, f"{lat.name}(x,{y},{z})")
