"""Acceptance criteria, each at its stated tolerance and time bound.

Every test appends one PASS/FAIL line, printed in the terminal summary.
"""

import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ACCEPTANCE_LINES, assert_same_bits
from latmaxwell.analysis import detect_maxima, growth_factor, probe_series, significant_digit_agreement
from latmaxwell.engine import EngineState, PrunePolicy, run
from latmaxwell.fileio import load_lattice, save_lattice
from latmaxwell.lattice import SparseLattice
from latmaxwell.maxwell import (
    B_FIELDS,
    E_FIELDS,
    FIELDS,
    ORIGIN,
    SQRT_ALPHA,
    build_maxwell_table,
    canonical_initial_state,
    parity_violations,
    run_maxwell,
)

GOLDEN = {
    26: 0.877636902081288,
    27: 0.950716819197347,
    28: 0.98752930561647,
    29: 0.986271782354442,
    30: 0.947405056005354,
}
PRUNE_BUDGET_150 = 300_000
PRUNE_BUDGET_600 = 2_000_000


def verdict(label, ok, detail):
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
    assert ok, f"{label}: {detail}"


@pytest.fixture(scope="module", autouse=True)
def warm_jit():
    run_maxwell(SQRT_ALPHA, 3)


def timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t0


@pytest.fixture(scope="module")
def unpruned_150():
    return timed(run_maxwell, SQRT_ALPHA, 150)


def ex_origin(record):
    return probe_series(record, "Ex", ORIGIN)


def test_c1_golden_values():
    rec, secs = timed(run_maxwell, SQRT_ALPHA, 30)
    s = ex_origin(rec)
    digits = {t: significant_digit_agreement(s.at(t), v) for t, v in GOLDEN.items()}
    ok = min(digits.values()) >= 12 and secs < 5
    verdict("1 golden values t=26..30", ok, f"digits {list(digits.values())}, {secs:.2f} s")


def test_c2_second_maximum():
    rec, secs = timed(run_maxwell, SQRT_ALPHA, 40)
    t2, h2 = detect_maxima(ex_origin(rec)).maxima[1]
    ok = t2 == 28 and abs(h2 - 1) < 0.02 and secs < 5
    verdict("2 second maximum", ok, f"t={t2}, |h-1|={abs(h2 - 1):.3e}, {secs:.2f} s")


def test_c3_interpolated_factor():
    rec, secs = timed(run_maxwell, 0.08672495, 40)
    t2, h2 = detect_maxima(ex_origin(rec)).maxima[1]
    ok = t2 == 28 and abs(h2 - 1) < 1e-6 and secs < 5
    verdict("3 p=0.08672495 maximum", ok, f"t={t2}, |h-1|={abs(h2 - 1):.3e}, {secs:.2f} s")


def test_c4_regime_ordering():
    t0 = time.perf_counter()
    m2 = {p: detect_maxima(ex_origin(run_maxwell(p, 60))).maxima[1][1]
          for p in (1 / 16, SQRT_ALPHA, 1 / 8)}
    fast = detect_maxima(ex_origin(run_maxwell(0.2, 60))).heights
    secs = time.perf_counter() - t0
    rising = all(a < b for a, b in zip(fast, fast[1:]))
    ok = m2[1 / 16] < m2[SQRT_ALPHA] < m2[1 / 8] and m2[1 / 8] > 1 and rising and secs < 20
    verdict(
        "4 regime ordering",
        ok,
        f"m2 = {m2[1 / 16]:.4f} < {m2[SQRT_ALPHA]:.4f} < {m2[1 / 8]:.4f}, "
        f"p=0.2 maxima rising {rising}, {secs:.2f} s",
    )


def test_c5_divergence_onset(unpruned_150):
    rec, secs = unpruned_150
    heights = detect_maxima(ex_origin(rec)).heights
    # maxima are counted from 1, the start of the run being the first
    tail = heights[5:]
    ok = len(tail) >= 2 and all(a < b for a, b in zip(tail, tail[1:])) and secs < 120
    verdict("5 divergence onset", ok, f"maxima from the 6th: {np.round(tail, 4).tolist()}, {secs:.1f} s")


def test_c6_pruning_fidelity(unpruned_150):
    full, _ = unpruned_150
    pruned, secs = timed(run_maxwell, SQRT_ALPHA, 150, policy=PrunePolicy.budget(PRUNE_BUDGET_150))
    a = full.series("Ex", ORIGIN)[150].real
    b = pruned.series("Ex", ORIGIN)[150].real
    digits = significant_digit_agreement(a, b)
    events = sum(r.pruned for r in pruned.prune_reports)
    ok = events > 0 and digits >= 12 and secs < 300
    verdict("6 pruning fidelity", ok, f"{digits} digits, {events} prune events, {secs:.1f} s")


def test_c7_long_term_growth():
    rec, secs = timed(run_maxwell, SQRT_ALPHA, 600, policy=PrunePolicy.budget(PRUNE_BUDGET_600))
    g = growth_factor(ex_origin(rec), (200, 600)).per_step_factor
    ok = 1.02 <= g <= 1.06 and secs < 900
    verdict("7 long-term growth", ok, f"factor {g:.5f} per step, {secs:.0f} s")


# -- criterion 8: property suite ----------------------------------------------


def test_c8_superposition():
    table = build_maxwell_table(SQRT_ALPHA)
    u = canonical_initial_state()
    v = EngineState([SparseLattice.from_dict(n, {(1, 0, 1): 0.3} if n == "By" else {}) for n in FIELDS])
    w = EngineState([
        SparseLattice.from_dict(n, {s: 1.3 * u[n].get(s) - 0.7 * v[n].get(s)
                                    for s in set(u[n].to_dict()) | set(v[n].to_dict())})
        for n in FIELDS
    ])
    probes = [("Ex", ORIGIN), ("By", (1, 0, 1)), ("Ez", (2, 1, 1))]
    ru, rv, rw = (run(s, table, 30, probes).values for s in (u, v, w))
    expect = 1.3 * ru - 0.7 * rv
    err = np.abs(rw - expect).max() / np.abs(expect).max()
    verdict("8a superposition", err <= 1e-12, f"max relative error {err:.2e}")


def test_c8_parity_and_light_cone():
    bad = []

    def check(state):
        n = state.iteration
        for f in FIELDS:
            lat = state[f]
            if parity_violations(lat, even=f in E_FIELDS) or lat.l1_support_radius() > n:
                bad.append((n, f))

    run_maxwell(SQRT_ALPHA, 30, [], on_step=check)
    assert set(E_FIELDS) | set(B_FIELDS) == set(FIELDS)
    verdict("8b checkerboard and light cone", not bad, f"violations {bad}")


def test_c8_backend_bit_identity():
    probes = [("Ex", ORIGIN), ("Bz", (0, 1, 0))]
    a = run_maxwell(SQRT_ALPHA, 50, probes, backend="table")
    b = run_maxwell(SQRT_ALPHA, 50, probes, backend="direct")
    same = a.values.tobytes() == b.values.tobytes()
    for f in FIELDS:
        assert_same_bits(a.final_state[f], b.final_state[f])
    verdict("8c table vs direct, 50 steps", same, "bit-identical" if same else "differs")


def test_c8_two_step_closed_form():
    errs = {}
    for p in (1 / 16, 1 / 8, SQRT_ALPHA):
        got = run_maxwell(p, 2).series("Ex", ORIGIN)[2].real
        want = 1 - 4 * p * p
        errs[p] = float(abs(got - want) / np.spacing(want))
    ok = all(e <= 1 for e in errs.values())
    verdict("8d Ex(2) = 1 - 4p^2", ok, f"errors in ulp {list(errs.values())}")


finite = st.floats(allow_nan=False, allow_infinity=False)
fuzz_lattices = st.dictionaries(
    st.tuples(*[st.integers(-(2**20) + 1, 2**20 - 1)] * 3), st.builds(complex, finite, finite), max_size=60
)


def test_c8_lattice_file_round_trip(tmp_path):
    failures = []

    @settings(max_examples=200, deadline=None)
    @given(fuzz_lattices, st.integers(0, 10**6))
    def round_trip(mapping, iteration):
        lat = SparseLattice.from_dict("Fz", mapping, iteration=iteration)
        save_lattice(lat, tmp_path / "f.lat")
        back = load_lattice(tmp_path / "f.lat")
        try:
            assert back.iteration == iteration and back.name == "Fz"
            assert_same_bits(back, lat)
        except AssertionError:
            failures.append(mapping)
            raise

    try:
        round_trip()
    finally:
        verdict("8e lattice file round trip", not failures, "bit-exact on 200 fuzzed lattices")
