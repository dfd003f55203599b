import numpy as np
import pytest

from multiwit import (
    Polynomial,
    breakup,
    complete_witness,
    compute_witness_collection,
    grow_witness_set,
    monodromy_permutation,
    random_loop,
    trace_test,
)
from multiwit.fixtures import get_fixture

from conftest import rs


@pytest.fixture(scope="module")
def cubic_ws(opts):
    fx = get_fixture("cubic")
    wc = compute_witness_collection(fx.system, fx.default_keys, rs(60), opts)
    return fx, wc.entries[(1,)]


@pytest.fixture(scope="module")
def two_lines_ws(opts):
    fx = get_fixture("two-lines")
    wc = compute_witness_collection(fx.system, fx.default_keys, rs(61), opts)
    return fx, wc.entries[(1,)]


def test_random_loop_matches_selection_shape(cubic_ws):
    fx, ws = cubic_ws
    loop = random_loop(ws, rs(62))
    assert len(loop.forms1) == len(ws.selection.forms)
    assert len(loop.forms2) == len(ws.selection.forms)
    for gamma in loop.gammas:
        assert abs(abs(gamma) - 1) < 1e-12


def test_monodromy_permutation_is_bijection(cubic_ws, opts):
    fx, ws = cubic_ws
    outcome = monodromy_permutation(ws, random_loop(ws, rs(63)), opts)
    assert not outcome.new_points
    assert not outcome.unmatched
    assert sorted(outcome.permutation) == [0, 1, 2]
    assert sorted(outcome.permutation.values()) == [0, 1, 2]


def test_breakup_cubic_is_one_certified_orbit(cubic_ws, opts):
    fx, ws = cubic_ws
    state = breakup(ws, rs(64), opts)
    assert [len(p) for p in state.partition] == [3]
    assert state.certified == [True]
    assert state.complete


def test_breakup_two_lines_gives_two_certified_parts(two_lines_ws, opts):
    fx, ws = two_lines_ws
    state = breakup(ws, rs(65), opts)
    assert sorted(len(p) for p in state.partition) == [1, 1]
    assert state.certified == [True, True]
    assert state.complete


def test_trace_full_part_passes_and_subsets_fail(cubic_ws, opts):
    fx, ws = cubic_ws
    g = fx.system.grouping
    pencil = Polynomial.constant(g, rs(66).unit_complex())
    full = trace_test(fx.system, ws.selection, pencil, list(ws.points), opts,
                      rs=rs(67), sq_core=ws.sq_core)
    assert full
    for size in (1, 2):
        part = list(ws.points)[:size]
        assert not trace_test(fx.system, ws.selection, pencil, part, opts,
                              rs=rs(68), sq_core=ws.sq_core)


def test_trace_rejects_empty_part(cubic_ws):
    fx, ws = cubic_ws
    pencil = Polynomial.constant(fx.system.grouping, 1.0)
    with pytest.raises(ValueError):
        trace_test(fx.system, ws.selection, pencil, [])


def test_grow_witness_set_recovers_full_degree(cubic_ws, opts):
    fx, ws = cubic_ws
    from multiwit import WitnessSet

    seeded = WitnessSet(ws.system, ws.sq_core, ws.selection, [ws.points[0]],
                        grouping=ws.grouping, extra=ws.extra)
    grown, stable = grow_witness_set(seeded, rs(69), opts)
    assert len(grown.points) == 3
    assert stable


def test_complete_witness_from_smooth_seed(opts):
    fx = get_fixture("cubic")
    # a smooth point: x = 2, y a root of y^2 - 4y - 6
    seed = np.array([2.0, 2.0 + np.sqrt(10.0)], dtype=complex)
    wc = complete_witness(fx.system, seed, rs(70), opts)
    assert wc.multidegree_map() == {(1,): 3}
    assert wc.incomplete_keys == []
