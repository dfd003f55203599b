import numpy as np
import pytest

from multiwit import (
    component_membership,
    compute_witness_collection,
    dimension_polytope,
    local_multidimension,
    membership_product,
    nid_curve_affine,
    nid_multi,
    product_factorization,
)
from multiwit.fixtures import OCTAHEDRON_KEYS, get_fixture
from multiwit.nid import compute_slice_vector, order_support

from conftest import rs


def test_compute_slice_vector_stops_at_dimension_one():
    assert compute_slice_vector(frozenset({(2,)})) == ((1,), frozenset({(1,)}))
    # a curve polytope needs no slicing at all
    poly = frozenset({(1, 0), (0, 1)})
    m, sliced = compute_slice_vector(poly)
    assert m == (0, 0)
    assert sliced == poly


def test_compute_slice_vector_octahedron():
    m, sliced = compute_slice_vector(frozenset(OCTAHEDRON_KEYS))
    assert m == (0, 0, 0, 0)  # every projection already has dimension 1
    assert sliced == frozenset(OCTAHEDRON_KEYS)


def test_order_support_prefix_dimensions():
    poly = frozenset(OCTAHEDRON_KEYS)
    e = min(OCTAHEDRON_KEYS)
    assert e == (0, 0, 1, 1)
    order = order_support(e, poly)
    assert sorted(order) == [2, 3]
    # the prefix projections must have dimensions exactly 1 then 2
    from multiwit.dimension import polytope_proj_dim

    assert polytope_proj_dim(poly, order[:1]) == 1
    assert polytope_proj_dim(poly, order) == 2


@pytest.fixture(scope="module")
def two_lines_data(opts):
    fx = get_fixture("two-lines")
    wc = compute_witness_collection(fx.system, fx.default_keys, rs(80), opts)
    return fx, wc


def test_nid_curve_affine_two_lines(two_lines_data, opts):
    fx, wc = two_lines_data
    state = nid_curve_affine(fx.system, wc.entries[(1,)], rs(81), opts)
    assert sorted(len(p) for p in state.partition) == [1, 1]
    assert all(state.certified)


def test_nid_multi_separates_the_lines(two_lines_data, opts):
    fx, wc = two_lines_data
    points = list(wc.entries[(1,)].points)
    dec = nid_multi(fx.system, points, rs(82), opts)
    assert len(dec.components) == 2
    assert not dec.diagnostics
    assert sorted(dec.assignment.values()) == [0, 1]
    for rec in dec.components:
        assert rec.certified
        assert rec.curve_degree == 1
        assert rec.profile.total_dim == 1


def test_component_membership_distinguishes_lines(two_lines_data, opts):
    fx, wc = two_lines_data
    points = list(wc.entries[(1,)].points)
    dec = nid_multi(fx.system, points, rs(83), opts)
    rec0 = dec.components[0]
    own = next(p for i, p in enumerate(points) if dec.assignment[i] == 0)
    other = next(p for i, p in enumerate(points) if dec.assignment[i] == 1)
    assert component_membership(rec0, own, opts)
    assert not component_membership(rec0, other, opts)


@pytest.fixture(scope="module")
def product_data(opts):
    fx = get_fixture("point-times-surface")
    wc = compute_witness_collection(fx.system, fx.default_keys, rs(84), opts)
    return fx, wc


def test_product_fixture_polytope_factors(product_data):
    fx, wc = product_data
    assert wc.multidegree_map() == {(0, 1, 2): 1, (0, 2, 1): 1}
    p = wc.entries[(0, 1, 2)].points[0]
    prof = local_multidimension(fx.system, p)
    poly = dimension_polytope(prof, fx.system.grouping.sizes)
    assert product_factorization(poly) == [(0,), (1, 2)]


def test_membership_product_per_factor(product_data, opts):
    fx, wc = product_data
    p = wc.entries[(0, 1, 2)].points[0]
    prof = local_multidimension(fx.system, p)
    poly = dimension_polytope(prof, fx.system.grouping.sizes)
    blocks = product_factorization(poly)
    q = wc.entries[(0, 2, 1)].points[0]
    combined, per_factor = membership_product(wc, q, blocks, opts, rs=rs(85))
    assert combined and all(per_factor)
    off = q.copy()
    off[-1] += 0.7  # leave the surface factor, keep the point factor
    combined2, per_factor2 = membership_product(wc, off, blocks, opts, rs=rs(86))
    assert not combined2
    assert per_factor2[0] and not per_factor2[1]
