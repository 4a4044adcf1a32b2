import math

import numpy as np
import pytest

from conftest import assert_same_bits
from latmaxwell.engine import (
    NO_PRUNING,
    CouplingEntry,
    EngineState,
    NonFiniteError,
    PrunePolicy,
    ValidationError,
    run,
    step,
    validate_table,
)
from latmaxwell.lattice import DenseLattice, SparseLattice
from latmaxwell.maxwell import SQRT_ALPHA, build_maxwell_table, canonical_initial_state

P = SQRT_ALPHA
ORIGIN = (0, 0, 0)


def state_of(**maps):
    return EngineState([SparseLattice.from_dict(k, v) for k, v in maps.items()])


def test_validate_maxwell_table(canonical):
    assert validate_table(build_maxwell_table(P), canonical) == []


def test_validate_unknown_lattice(canonical):
    table = [CouplingEntry("Q", "Ex", ORIGIN, 1.0)]
    assert len(validate_table(table, canonical)) == 1


def test_validate_nan_factor(canonical):
    table = [CouplingEntry("Ex", "Ex", ORIGIN, math.nan)]
    assert len(validate_table(table, canonical)) == 1


def test_step_rejects_invalid_table(canonical):
    with pytest.raises(ValidationError):
        step(canonical, [CouplingEntry("Q", "Ex", ORIGIN, 1.0)])


def test_state_requires_equal_iterations():
    with pytest.raises(ValidationError):
        EngineState([SparseLattice("A", 0), SparseLattice("B", 1)])


def test_empty_table_clears_everything():
    s = state_of(A={ORIGIN: 1.0}, B={(1, 0, 0): 2.0})
    s1 = step(s, [])
    assert s1.iteration == 1
    assert s1.nonzero_count() == 0


def test_identity_entry_persists_exactly():
    s = state_of(A={ORIGIN: 0.1, (3, -1, 2): -2.5 + 1e-3j})
    s1 = step(s, [CouplingEntry("A", "A", ORIGIN, 1.0)])
    assert_same_bits(s1["A"], s["A"])
    assert s1["A"].iteration == 1


def test_maxwell_one_step_expansion(canonical):
    s1 = step(canonical, build_maxwell_table(P))
    assert s1["Bz"].to_dict() == {(0, -1, 0): P, (0, 1, 0): -P}
    assert s1["By"].to_dict() == {(0, 0, -1): -P, (0, 0, 1): P}
    assert s1["Ex"].to_dict() == {ORIGIN: 1.0}
    for name in ("Ey", "Ez", "Bx"):
        assert s1[name].nonzero_count() == 0


def test_step_equals_sequential_shifted_adds(canonical):
    # the fused kernel against one add_shifted_scaled per entry, in table order
    table = build_maxwell_table(P)
    state = canonical
    for _ in range(4):
        fused = step(state, table)
        frames = {n: SparseLattice(n, state.iteration + 1) for n in state.names}
        for e in table:
            frames[e.destination].add_shifted_scaled(state[e.source], e.offset, e.factor)
        for n in state.names:
            assert_same_bits(fused[n], frames[n])
        state = fused


def test_complex_factor_rotates():
    s = state_of(A={ORIGIN: 1.0})
    s1 = step(s, [CouplingEntry("A", "A", (1, 0, 0), 1j)])
    assert s1["A"].to_dict() == {(1, 0, 0): 1j}


def test_overflow_aborts_with_site():
    s = state_of(A={(2, 0, 0): 1e300})
    table = [CouplingEntry("A", "A", ORIGIN, 1e10)]
    with pytest.raises(NonFiniteError, match=r"iteration 1.*\(2, 0, 0\)"):
        step(s, table)


def test_run_zero_steps(canonical):
    rec = run(canonical, build_maxwell_table(P), 0, [("Ex", ORIGIN)])
    assert rec.values.shape == (1, 1)
    assert rec.values[0, 0] == 1


def test_run_one_step_first_step_stasis(canonical):
    rec = run(canonical, build_maxwell_table(P), 1, [("Ex", ORIGIN)])
    assert rec.series("Ex", ORIGIN).tolist() == [1, 1]


def test_run_golden_t28(canonical):
    rec = run(canonical, build_maxwell_table(P), 30, [("Ex", ORIGIN)])
    assert rec.series("Ex", ORIGIN)[28].real == pytest.approx(0.98752930561647, rel=1e-12)


def test_run_rejects_negative_steps(canonical):
    with pytest.raises(ValidationError):
        run(canonical, build_maxwell_table(P), -1)


def test_run_unknown_probe(canonical):
    with pytest.raises(ValidationError):
        run(canonical, build_maxwell_table(P), 1, [("Q", ORIGIN)])
    rec = run(canonical, build_maxwell_table(P), 1, [("Ex", ORIGIN)])
    with pytest.raises(KeyError):
        rec.series("Ex", (1, 0, 0))


def test_prune_policy_needs_budget():
    with pytest.raises(ValidationError):
        PrunePolicy(enabled=True)
    with pytest.raises(ValidationError):
        PrunePolicy.budget(0)


def test_run_prunes_over_budget(canonical):
    rec = run(canonical, build_maxwell_table(P), 6, [("Ex", ORIGIN)], PrunePolicy.budget(5))
    assert rec.prune_reports
    assert all(r.sites_after <= 5 for r in rec.prune_reports)
    assert all(lat.nonzero_count() <= 5 for lat in rec.final_state.lattices.values())


def test_determinism(canonical):
    table = build_maxwell_table(P)
    a = run(canonical, table, 20, [("Ex", ORIGIN), ("Bz", (0, 1, 0))])
    b = run(canonical_initial_state(), table, 20, [("Ex", ORIGIN), ("Bz", (0, 1, 0))])
    assert a.values.tobytes() == b.values.tobytes()
    for n in a.final_state.names:
        assert_same_bits(a.final_state[n], b.final_state[n])


def test_no_prune_fidelity(canonical):
    table = build_maxwell_table(P)
    a = run(canonical, table, 20, [("Ex", ORIGIN)], NO_PRUNING)
    b = run(canonical_initial_state(), table, 20, [("Ex", ORIGIN)], PrunePolicy.budget(2**62))
    assert a.values.tobytes() == b.values.tobytes()
    assert b.prune_reports == []


def test_iteration_homogeneity():
    table = build_maxwell_table(P)
    state = run(canonical_initial_state(), table, 5, []).final_state
    s = 3.7
    scaled = EngineState(
        [SparseLattice.from_arrays(n, lat.sites(), lat.values() * s, lat.iteration)
         for n, lat in state.lattices.items()]
    )
    a, b = step(state, table), step(scaled, table)
    # each new value sums five rounded terms bounded by the largest input, and
    # near-cancelling sites keep only that rounding residue
    largest = max(np.abs(lat.values()).max() for lat in state.lattices.values())
    bound = 8 * np.finfo(float).eps * s * largest
    for n in state.names:
        da, db = a[n].to_dict(), b[n].to_dict()
        err = max(abs(db.get(k, 0) - s * da.get(k, 0)) for k in da.keys() | db.keys())
        assert err <= bound


def test_superposition():
    table = build_maxwell_table(P)
    u = canonical_initial_state()
    v = EngineState(
        [SparseLattice.from_dict(n, m) for n, m in {
            "Ex": {}, "Ey": {(1, 0, 0): 0.5}, "Ez": {},
            "Bx": {(0, 1, 0): -0.25}, "By": {(0, 0, 1): 2.0}, "Bz": {},
        }.items()]
    )
    a, b = 1.5, -0.75
    w = EngineState(
        [SparseLattice.from_dict(n, {
            s: a * u[n].get(s) + b * v[n].get(s)
            for s in set(u[n].to_dict()) | set(v[n].to_dict())
        }) for n in u.names]
    )
    probes = [("Ex", ORIGIN), ("Bz", (0, 1, 0)), ("Ey", (1, 0, 0)), ("By", (2, 1, 0))]
    ru = run(u, table, 30, probes).values
    rv = run(v, table, 30, probes).values
    rw = run(w, table, 30, probes).values
    expect = a * ru + b * rv
    scale = np.abs(expect).max()
    np.testing.assert_allclose(rw, expect, rtol=1e-12, atol=1e-12 * scale)


def test_dense_engine_matches_sparse():
    table = build_maxwell_table(P)
    sparse = run(canonical_initial_state(), table, 12, [("Ex", ORIGIN)])
    dense = run(canonical_initial_state("dense", radius=12), table, 12, [("Ex", ORIGIN)])
    assert sparse.values.tobytes() == dense.values.tobytes()
    for n in sparse.final_state.names:
        assert isinstance(dense.final_state[n], DenseLattice)
        assert_same_bits(sparse.final_state[n], dense.final_state[n])


def test_dense_engine_out_of_box_raises():
    table = build_maxwell_table(P)
    with pytest.raises(ValueError):
        run(canonical_initial_state("dense", radius=2), table, 3)
