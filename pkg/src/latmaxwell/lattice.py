"""Complex quantities on the unbounded 3-D integer lattice.

Two storage backends share one surface:

* :class:`SparseLattice` keeps only nonzero sites, as a sorted key array
  plus a value array. It is the default and has no bounds.
* :class:`DenseLattice` holds a complex array over a declared inclusive
  bounding box. Reads outside the box are zero; writes outside it raise.

A quantity that becomes exactly zero is treated as absent, so
``nonzero_count`` and pruning only ever see nonzero sites.
"""

from __future__ import annotations

import math
from collections.abc import Iterator, Mapping
from dataclasses import dataclass

import numpy as np

from . import _kernels

Site = tuple[int, int, int]


@dataclass(frozen=True)
class PruneReport:
    """What one call to ``prune`` removed from a lattice."""

    lattice: str
    iteration: int
    sites_before: int
    sites_after: int
    dropped_abs_sum: float
    smallest_kept: float

    @property
    def pruned(self) -> bool:
        return self.sites_after < self.sites_before


def as_site(site) -> Site:
    x, y, z = site
    out = (int(x), int(y), int(z))
    if (x, y, z) != out:
        raise ValueError(f"site coordinates must be integers, got {site!r}")
    return out


def as_quantity(q) -> complex:
    q = complex(q)
    if not (math.isfinite(q.real) and math.isfinite(q.imag)):
        raise ValueError(f"quantity must be finite, got {q!r}")
    # fold -0.0 components to +0.0 so stored bit patterns are canonical
    return complex(q.real + 0.0, q.imag + 0.0)


def _check_coords(coords: np.ndarray) -> None:
    if coords.size and np.abs(coords).max() > _kernels.COORD_LIMIT:
        raise ValueError(
            f"site coordinates beyond +/-{_kernels.COORD_LIMIT} are not representable"
        )


def _prune_mask(mags: np.ndarray, budget: int) -> np.ndarray:
    """Keep mask for the ``budget`` largest magnitudes.

    ``mags`` is in lexicographic site order, so among equal magnitudes at
    the cut the earliest entries (smaller sites) are kept.
    """
    n = mags.size
    keep = np.zeros(n, dtype=bool)
    if budget <= 0:
        return keep
    thr = np.partition(mags, n - budget)[n - budget]
    keep = mags > thr
    need = budget - int(np.count_nonzero(keep))
    if need > 0:
        keep[np.flatnonzero(mags == thr)[:need]] = True
    return keep


class _LatticeBase:
    name: str
    iteration: int
    backend: str

    def sites(self) -> np.ndarray:
        raise NotImplementedError

    def values(self) -> np.ndarray:
        raise NotImplementedError

    def nonzero_count(self) -> int:
        raise NotImplementedError

    def __len__(self) -> int:
        return self.nonzero_count()

    def items(self) -> Iterator[tuple[Site, complex]]:
        """Nonzero ``(site, quantity)`` pairs in lexicographic site order."""
        for s, q in zip(self.sites().tolist(), self.values().tolist()):
            yield tuple(s), q

    def to_dict(self) -> dict[Site, complex]:
        return dict(self.items())

    def l1_support_radius(self) -> int:
        """Largest ``|x|+|y|+|z|`` over nonzero sites, or -1 when empty."""
        s = self.sites()
        if s.shape[0] == 0:
            return -1
        return int(np.abs(s).sum(axis=1).max())

    def linf_extent(self) -> tuple[Site, Site] | None:
        """Inclusive bounding box of the nonzero sites, or None when empty."""
        s = self.sites()
        if s.shape[0] == 0:
            return None
        return tuple(s.min(axis=0).tolist()), tuple(s.max(axis=0).tolist())

    def to_sparse(self) -> SparseLattice:
        return SparseLattice.from_arrays(
            self.name, self.sites(), self.values(), iteration=self.iteration
        )

    def to_dense(self, lo: Site | None = None, hi: Site | None = None) -> DenseLattice:
        if lo is None or hi is None:
            ext = self.linf_extent() or ((0, 0, 0), (0, 0, 0))
            lo = ext[0] if lo is None else lo
            hi = ext[1] if hi is None else hi
        out = DenseLattice(self.name, lo, hi, iteration=self.iteration)
        out.add_shifted_scaled(self, (0, 0, 0), 1.0)
        return out

    def __repr__(self) -> str:
        return (
            f"{type(self).__name__}(name={self.name!r}, iteration={self.iteration}, "
            f"nonzero={self.nonzero_count()})"
        )


class SparseLattice(_LatticeBase):
    """Sorted-key sparse lattice.

    Examples:
        >>> lat = SparseLattice("Ex")
        >>> lat.add_assign((0, 0, 0), 1.0)
        >>> lat.get((0, 0, 0)), lat.get((1, 0, 0))
        ((1+0j), 0j)
    """

    backend = "sparse"

    def __init__(self, name: str, iteration: int = 0):
        self.name = name
        self.iteration = int(iteration)
        self._keys = np.empty(0, dtype=np.int64)
        self._vals = np.empty(0, dtype=np.complex128)
        # conservative upper bound on max |coordinate| of stored sites
        self._bound = 0

    @classmethod
    def _wrap(cls, name, iteration, keys, vals, bound) -> SparseLattice:
        lat = cls(name, iteration)
        lat._keys = keys
        lat._vals = vals
        lat._bound = int(bound)
        return lat

    @classmethod
    def from_arrays(cls, name: str, coords, values, iteration: int = 0) -> SparseLattice:
        """Build from an (n, 3) site array and n quantities.

        Sites must be distinct; zero quantities are dropped.
        """
        coords = np.asarray(coords, dtype=np.int64).reshape(-1, 3)
        values = np.asarray(values, dtype=np.complex128).reshape(-1)
        if coords.shape[0] != values.shape[0]:
            raise ValueError("coords and values differ in length")
        if not np.all(np.isfinite(values)):
            raise ValueError("quantities must be finite")
        _check_coords(coords)
        keys = _kernels.encode(coords)
        order = np.argsort(keys, kind="stable")
        keys, values = keys[order], values[order] + 0.0
        if not _is_sorted_unique(keys):
            raise ValueError("duplicate sites")
        nz = values != 0
        bound = int(np.abs(coords).max()) if coords.size else 0
        return cls._wrap(name, iteration, keys[nz], values[nz], bound)

    @classmethod
    def from_dict(cls, name: str, mapping: Mapping[Site, complex], iteration: int = 0):
        sites = [as_site(s) for s in mapping]
        vals = [as_quantity(q) for q in mapping.values()]
        return cls.from_arrays(name, np.array(sites, dtype=np.int64).reshape(-1, 3), vals, iteration)

    def copy(self) -> SparseLattice:
        return self._wrap(self.name, self.iteration, self._keys.copy(), self._vals.copy(), self._bound)

    # -- access ---------------------------------------------------------------

    @property
    def keys(self) -> np.ndarray:
        return self._keys

    @property
    def bound(self) -> int:
        return self._bound

    def sites(self) -> np.ndarray:
        return _kernels.decode(self._keys)

    def values(self) -> np.ndarray:
        return self._vals

    def nonzero_count(self) -> int:
        return int(self._keys.size)

    def _find(self, site: Site) -> tuple[int, bool]:
        s = as_site(site)
        if max(abs(c) for c in s) > _kernels.COORD_LIMIT:
            return -1, False
        key = int(_kernels.encode(np.array(s))[0])
        i = int(np.searchsorted(self._keys, key))
        return i, i < self._keys.size and int(self._keys[i]) == key

    def get(self, site) -> complex:
        i, hit = self._find(site)
        return complex(self._vals[i]) if hit else 0j

    def add_assign(self, site, q) -> None:
        q = as_quantity(q)
        s = as_site(site)
        _check_coords(np.array(s))
        i, hit = self._find(s)
        if hit:
            new = complex(self._vals[i]) + q
            if new == 0:
                self._keys = np.delete(self._keys, i)
                self._vals = np.delete(self._vals, i)
            else:
                self._vals[i] = new
        elif q != 0:
            key = _kernels.encode(np.array(s))[0]
            self._keys = np.insert(self._keys, i, key)
            self._vals = np.insert(self._vals, i, 0j + q)
            self._bound = max(self._bound, max(abs(c) for c in s))

    def add_shifted_scaled(self, src: _LatticeBase, offset, factor) -> None:
        """``self[s + offset] += factor * src[s]`` for every nonzero site of ``src``.

        All reads of ``src`` happen before any write, so ``src`` may be
        ``self``.
        """
        factor = as_quantity(factor)
        offset = as_site(offset)
        if isinstance(src, SparseLattice):
            src_keys, src_vals, src_bound = src._keys, src._vals, src._bound
        else:
            coords = src.sites()
            src_keys, src_vals = _kernels.encode(coords), src.values()
            src_bound = int(np.abs(coords).max()) if coords.size else 0
        src_bound = ensure_shift_fits(src_keys, src_bound, offset)
        keys = np.concatenate([self._keys, src_keys])
        vals = np.concatenate([self._vals, src_vals])
        n0 = self._keys.size
        self._keys, self._vals = _kernels.gather(
            keys, vals,
            np.array([0, n0], np.int64),
            np.array([n0, keys.size], np.int64),
            np.array([0, _kernels.shift_of(offset)], np.int64),
            np.array([1.0, factor.real]),
            np.array([0.0, factor.imag]),
        )
        self._bound = max(self._bound, src_bound + max(abs(c) for c in offset))

    def prune(self, budget: int) -> PruneReport:
        """Keep only the ``budget`` sites of largest magnitude."""
        if budget < 0:
            raise ValueError("budget must be >= 0")
        n = self._keys.size
        mags = np.abs(self._vals)
        if n <= budget:
            smallest = float(mags.min()) if n else 0.0
            return PruneReport(self.name, self.iteration, n, n, 0.0, smallest)
        keep = _prune_mask(mags, budget)
        dropped = float(mags[~keep].sum())
        smallest = float(mags[keep].min()) if budget else 0.0
        self._keys = self._keys[keep]
        self._vals = self._vals[keep]
        return PruneReport(self.name, self.iteration, n, self._keys.size, dropped, smallest)


def _is_sorted_unique(keys: np.ndarray) -> bool:
    return bool(np.all(keys[1:] > keys[:-1]))


def ensure_shift_fits(keys: np.ndarray, bound: int, offset: Site) -> int:
    """Check that shifting the sites behind ``keys`` keeps them encodable.

    ``bound`` is a cached upper bound on their max |coordinate|; it is
    tightened from the keys when the cheap check fails. Returns the bound
    actually used.
    """
    reach = max(abs(c) for c in offset)
    if bound + reach <= _kernels.COORD_LIMIT:
        return bound
    exact = int(np.abs(_kernels.decode(keys)).max()) if keys.size else 0
    if exact + reach > _kernels.COORD_LIMIT:
        raise ValueError(
            f"shift by {offset} moves sites beyond +/-{_kernels.COORD_LIMIT}"
        )
    return exact


class DenseLattice(_LatticeBase):
    """Dense complex array over the inclusive box ``lo..hi``.

    Examples:
        >>> lat = DenseLattice("Ex", (-1, -1, -1), (1, 1, 1))
        >>> lat.add_assign((1, 0, 0), 2.0)
        >>> lat.get((1, 0, 0)), lat.get((5, 5, 5))
        ((2+0j), 0j)
    """

    backend = "dense"

    def __init__(self, name: str, lo, hi, iteration: int = 0, data: np.ndarray | None = None):
        self.name = name
        self.iteration = int(iteration)
        self.lo = np.array(as_site(lo), dtype=np.int64)
        self.hi = np.array(as_site(hi), dtype=np.int64)
        if np.any(self.hi < self.lo):
            raise ValueError(f"empty bounding box {tuple(self.lo)}..{tuple(self.hi)}")
        _check_coords(np.stack([self.lo, self.hi]))
        shape = tuple((self.hi - self.lo + 1).tolist())
        if data is None:
            data = np.zeros(shape, dtype=np.complex128)
        elif data.shape != shape or data.dtype != np.complex128:
            raise ValueError("data does not match the bounding box")
        self.data = data

    @classmethod
    def centered(cls, name: str, radius: int, iteration: int = 0) -> DenseLattice:
        r = int(radius)
        return cls(name, (-r, -r, -r), (r, r, r), iteration)

    @property
    def bbox(self) -> tuple[Site, Site]:
        return tuple(self.lo.tolist()), tuple(self.hi.tolist())

    def copy(self) -> DenseLattice:
        return DenseLattice(self.name, self.lo, self.hi, self.iteration, self.data.copy())

    def contains(self, site) -> bool:
        s = np.asarray(as_site(site))
        return bool(np.all(s >= self.lo) and np.all(s <= self.hi))

    def sites(self) -> np.ndarray:
        idx = np.argwhere(self.data != 0)
        return idx.astype(np.int64) + self.lo

    def values(self) -> np.ndarray:
        return self.data[self.data != 0]

    def nonzero_count(self) -> int:
        return int(np.count_nonzero(self.data))

    def get(self, site) -> complex:
        if not self.contains(site):
            return 0j
        q = complex(self.data[tuple(np.asarray(site) - self.lo)])
        return q if q != 0 else 0j

    def add_assign(self, site, q) -> None:
        q = as_quantity(q)
        if not self.contains(site):
            raise ValueError(f"site {site} outside bounding box {self.bbox}")
        idx = tuple(np.asarray(site) - self.lo)
        self.data[idx] = complex(self.data[idx]) + q

    def add_shifted_scaled(self, src: _LatticeBase, offset, factor) -> None:
        """``self[s + offset] += factor * src[s]``; every target must lie in the box."""
        factor = as_quantity(factor)
        off = np.array(as_site(offset), dtype=np.int64)
        if isinstance(src, DenseLattice):
            if src is self:
                src = src.copy()
            # box of src after shifting, clipped to self
            s_lo, s_hi = src.lo + off, src.hi + off
            lo = np.maximum(s_lo, self.lo)
            hi = np.minimum(s_hi, self.hi)
            inner_src = tuple(slice(a, b + 1) for a, b in zip(lo - s_lo, hi - s_lo))
            if np.any(hi < lo):
                if src.nonzero_count():
                    raise ValueError(f"shifted sites of {src.name!r} fall outside {self.bbox}")
                return
            if np.any(s_lo < self.lo) or np.any(s_hi > self.hi):
                outside = src.nonzero_count() - int(np.count_nonzero(src.data[inner_src]))
                if outside:
                    raise ValueError(f"shifted sites of {src.name!r} fall outside {self.bbox}")
            dst_view = self.data[tuple(slice(a, b + 1) for a, b in zip(lo - self.lo, hi - self.lo))]
            scaled_add(dst_view, src.data[inner_src], factor)
        else:
            coords = src.sites() + off
            if coords.shape[0] == 0:
                return
            if np.any(coords < self.lo) or np.any(coords > self.hi):
                raise ValueError(f"shifted sites of {src.name!r} fall outside {self.bbox}")
            idx = tuple((coords - self.lo).T)
            view = self.data[idx]
            scaled_add(view, src.values(), factor)
            self.data[idx] = view

    def prune(self, budget: int) -> PruneReport:
        if budget < 0:
            raise ValueError("budget must be >= 0")
        nz = np.argwhere(self.data != 0)
        n = nz.shape[0]
        mags = np.abs(self.data[tuple(nz.T)])
        if n <= budget:
            smallest = float(mags.min()) if n else 0.0
            return PruneReport(self.name, self.iteration, n, n, 0.0, smallest)
        keep = _prune_mask(mags, budget)
        self.data[tuple(nz[~keep].T)] = 0
        dropped = float(mags[~keep].sum())
        smallest = float(mags[keep].min()) if budget else 0.0
        return PruneReport(self.name, self.iteration, n, budget, dropped, smallest)


def scaled_add(dst: np.ndarray, src: np.ndarray, factor: complex) -> None:
    """In place ``dst += factor * src`` with a fixed per-component operation order.

    The sparse kernel uses the same order, which keeps both backends
    bit-identical.
    """
    if factor.imag == 0.0:
        dst += factor.real * src
    else:
        fr, fi = factor.real, factor.imag
        re = fr * src.real - fi * src.imag
        im = fr * src.imag + fi * src.real
        dst.real += re
        dst.imag += im


Lattice = SparseLattice | DenseLattice
