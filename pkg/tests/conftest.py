from __future__ import annotations

import numpy as np
import pytest

from latmaxwell.maxwell import SQRT_ALPHA, canonical_initial_state, run_maxwell

ACCEPTANCE_LINES: list[str] = []


def lattice_bits(lat):
    """(sites, raw value bits) of a lattice, for bit-exact comparisons."""
    return lat.sites(), np.ascontiguousarray(lat.values()).view(np.int64)


def assert_same_bits(a, b):
    sa, va = lattice_bits(a)
    sb, vb = lattice_bits(b)
    np.testing.assert_array_equal(sa, sb)
    np.testing.assert_array_equal(va, vb)


def maxwell_oracle(p: float, steps: int):
    """Dict-based evaluation of the explicit update equations.

    Reads neighbours literally (F(v+1), F(v-1)) instead of going through
    coupling-table offsets. Terms are summed left to right as written.
    Returns the list of field dicts per iteration.
    """
    fields = {k: {} for k in ("Ex", "Ey", "Ez", "Bx", "By", "Bz")}
    fields["Ex"][(0, 0, 0)] = 1.0
    history = [fields]

    def g(f, s):
        return fields[f].get(s, 0.0)

    def nb(s, axis, d):
        s = list(s)
        s[axis] += d
        return tuple(s)

    # (dst, [(sign, src, axis)]) : dst += sign*p*(src(v+1) - src(v-1))
    eqs = {
        "Ex": [(+1, "Bz", 1), (-1, "By", 2)],
        "Ey": [(+1, "Bx", 2), (-1, "Bz", 0)],
        "Ez": [(+1, "By", 0), (-1, "Bx", 1)],
        "Bx": [(-1, "Ez", 1), (+1, "Ey", 2)],
        "By": [(-1, "Ex", 2), (+1, "Ez", 0)],
        "Bz": [(-1, "Ey", 0), (+1, "Ex", 1)],
    }
    for _ in range(steps):
        r = max((abs(a) + abs(b) + abs(c) for f in fields.values() for a, b, c in f), default=0) + 1
        rng = range(-r, r + 1)
        new = {}
        for dst, terms in eqs.items():
            out = {}
            for x in rng:
                for y in rng:
                    for z in rng:
                        s = (x, y, z)
                        v = 0.0 + g(dst, s)
                        for sign, src, axis in terms:
                            v = v + (sign * p) * g(src, nb(s, axis, +1))
                            v = v + (-sign * p) * g(src, nb(s, axis, -1))
                        if v != 0:
                            out[s] = v
            new[dst] = out
        fields = new
        history.append(fields)
    return history


@pytest.fixture(scope="session")
def run_sqrt_alpha_40():
    return run_maxwell(SQRT_ALPHA, 40, [("Ex", (0, 0, 0)), ("Bz", (0, 1, 0))])


@pytest.fixture
def canonical():
    return canonical_initial_state()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
