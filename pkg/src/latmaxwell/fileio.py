"""Plain-text lattice files, coupling-table files and CSV series.

Lattice file (version 1)::

    latmaxwell-lattice 1
    name Ex
    iteration 30
    sites 2
    0 0 0 1.0 0.0
    0 1 0 -0.085424542921 0.0

One record per nonzero site, ``x y z re im``, in lexicographic site order.
Floats are written as the shortest decimal that reads back to the same
binary64 value, so save/load is bit-exact.

Coupling-table file: one entry per line, ``SRC DST dx dy dz re im``;
``#`` starts a comment.
"""

from __future__ import annotations

import contextlib
import csv
import math
import os
from collections.abc import Sequence
from pathlib import Path
from typing import TextIO

import numpy as np

from .analysis import Series, probe_name
from .engine import CouplingEntry, RunRecord
from .lattice import Lattice, SparseLattice

LATTICE_MAGIC = "latmaxwell-lattice"
LATTICE_VERSION = 1


class FormatError(ValueError):
    """A file does not follow its declared format."""

    def __init__(self, path, line: int | None, msg: str):
        where = f"{path}:{line}" if line is not None else str(path)
        super().__init__(f"{where}: {msg}")
        self.path = path
        self.line = line


def _float_text(v: float) -> str:
    return repr(float(v))


def save_lattice(lat: Lattice, path: str | os.PathLike) -> None:
    if any(c.isspace() for c in lat.name) or not lat.name:
        raise ValueError(f"lattice name {lat.name!r} cannot be written")
    sites = lat.sites()
    vals = lat.values()
    lines = [
        f"{LATTICE_MAGIC} {LATTICE_VERSION}",
        f"name {lat.name}",
        f"iteration {lat.iteration}",
        f"sites {sites.shape[0]}",
    ]
    for (x, y, z), q in zip(sites.tolist(), vals.tolist()):
        lines.append(f"{x} {y} {z} {_float_text(q.real)} {_float_text(q.imag)}")
    Path(path).write_text("\n".join(lines) + "\n")


def _header(path, lineno: int, line: str, key: str) -> str:
    parts = line.split()
    if len(parts) != 2 or parts[0] != key:
        raise FormatError(path, lineno, f"expected '{key} <value>', got {line!r}")
    return parts[1]


def _int(path, lineno: int, text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise FormatError(path, lineno, f"not an integer: {text!r}") from None


def _finite(path, lineno: int, text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise FormatError(path, lineno, f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise FormatError(path, lineno, f"non-finite value {text!r}")
    return v


def load_lattice(path: str | os.PathLike) -> SparseLattice:
    """Read a lattice file into a sparse lattice.

    Raises:
        FormatError: malformed content (with the offending line number) or
            an unsupported format version.
    """
    with open(path) as fh:
        lines = fh.read().splitlines()
    if len(lines) < 4:
        raise FormatError(path, len(lines) + 1, "truncated header")
    magic = lines[0].split()
    if len(magic) != 2 or magic[0] != LATTICE_MAGIC:
        raise FormatError(path, 1, "not a lattice file")
    if magic[1] != str(LATTICE_VERSION):
        raise FormatError(path, 1, f"unsupported format version {magic[1]!r}")
    name = _header(path, 2, lines[1], "name")
    iteration = _int(path, 3, _header(path, 3, lines[2], "iteration"))
    count = _int(path, 4, _header(path, 4, lines[3], "sites"))
    body = [(i + 5, ln) for i, ln in enumerate(lines[4:]) if ln.strip()]
    if len(body) != count:
        raise FormatError(path, None, f"header declares {count} sites, found {len(body)}")
    coords = np.empty((count, 3), dtype=np.int64)
    vals = np.empty(count, dtype=np.complex128)
    for k, (lineno, ln) in enumerate(body):
        parts = ln.split()
        if len(parts) != 5:
            raise FormatError(path, lineno, f"expected 'x y z re im', got {ln!r}")
        coords[k] = [_int(path, lineno, p) for p in parts[:3]]
        vals[k] = complex(_finite(path, lineno, parts[3]), _finite(path, lineno, parts[4]))
    try:
        return SparseLattice.from_arrays(name, coords, vals, iteration)
    except ValueError as exc:
        raise FormatError(path, None, str(exc)) from None


def save_table(table: Sequence[CouplingEntry], path: str | os.PathLike) -> None:
    lines = ["# SRC DST dx dy dz re im"]
    for e in table:
        dx, dy, dz = e.offset
        lines.append(
            f"{e.source} {e.destination} {dx} {dy} {dz} "
            f"{_float_text(e.factor.real)} {_float_text(e.factor.imag)}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def load_table(path: str | os.PathLike) -> list[CouplingEntry]:
    table = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 7:
                raise FormatError(path, lineno, f"expected 'SRC DST dx dy dz re im', got {line!r}")
            off = tuple(_int(path, lineno, p) for p in parts[2:5])
            factor = complex(_finite(path, lineno, parts[5]), _finite(path, lineno, parts[6]))
            table.append(CouplingEntry(parts[0], parts[1], off, factor))
    return table


def export_series_csv(
    series: Sequence[Series], path: str | os.PathLike | TextIO, index_label: str = "t"
) -> None:
    """Write series side by side, aligned on ``t``; missing samples are blank.

    ``path`` may also be an open text stream.
    """
    if not series:
        raise ValueError("no series to export")
    ts = np.unique(np.concatenate([s.t for s in series]))
    cols = []
    for s in series:
        idx = np.searchsorted(s.t, ts).clip(max=len(s) - 1)
        hit = s.t[idx] == ts
        cols.append([_float_text(v) if h else "" for v, h in zip(s.values[idx].tolist(), hit)])
    with contextlib.ExitStack() as stack:
        fh = path if hasattr(path, "write") else stack.enter_context(open(path, "w", newline=""))
        w = csv.writer(fh)
        w.writerow([index_label] + [s.name or f"series{k}" for k, s in enumerate(series)])
        for i, t in enumerate(ts.tolist()):
            w.writerow([t] + [c[i] for c in cols])


def read_series_csv(path: str | os.PathLike) -> list[Series]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or len(rows[0]) < 2:
        raise FormatError(path, 1, "expected a header row with an index column and series names")
    names = rows[0][1:]
    t = []
    cols: list[list[tuple[int, float]]] = [[] for _ in names]
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(names) + 1:
            raise FormatError(path, lineno, f"expected {len(names) + 1} columns")
        ti = _int(path, lineno, row[0])
        t.append(ti)
        for k, cell in enumerate(row[1:]):
            if cell != "":
                cols[k].append((ti, _finite(path, lineno, cell)))
    return [
        Series([a for a, _ in col], [b for _, b in col], name)
        for name, col in zip(names, cols)
    ]


def record_series(record: RunRecord) -> list[Series]:
    """Probe series of a record; imaginary parts get their own columns when nonzero."""
    out = []
    t = record.iterations
    for k, (lat, site) in enumerate(record.probes):
        v = record.values[:, k]
        name = probe_name(lat, site)
        out.append(Series(t, v.real, name))
        if np.any(v.imag != 0):
            out.append(Series(t, v.imag, f"Im {name}"))
    return out


def write_prune_reports(record: RunRecord, path: str | os.PathLike) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["lattice", "iteration", "sites_before", "sites_after",
                    "dropped_abs_sum", "smallest_kept"])
        for r in record.prune_reports:
            w.writerow([r.lattice, r.iteration, r.sites_before, r.sites_after,
                        _float_text(r.dropped_abs_sum), _float_text(r.smallest_kept)])


def write_run_record(record: RunRecord, out_dir: str | os.PathLike) -> dict[str, Path]:
    """``series.csv`` plus ``prune.csv`` in ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"series": out / "series.csv", "prune": out / "prune.csv"}
    export_series_csv(record_series(record), paths["series"])
    write_prune_reports(record, paths["prune"])
    return paths
