import numpy as np
import pytest

from multiwit import (
    PolySystem,
    Polynomial,
    VariableGrouping,
    complete_intersection_class,
    mbezout,
    solve_zero_dim,
    square_up,
    start_package,
)
from multiwit.fixtures import get_fixture
from multiwit.startsys import residual_ok
from multiwit.witness import random_affine_form

from conftest import rs


def test_class_of_two_bilinear_forms():
    # two (1,1)-forms on C^1 x C^1: the class is 2*s1*s2
    assert mbezout([[1, 1], [1, 1]], (1, 1)) == 2


def test_class_single_form():
    assert complete_intersection_class([[2]], (2,)) == {(1,): 2}
    assert complete_intersection_class([], (2,)) == {(2,): 1}


def test_class_truncates_by_group_sizes():
    # (s1+s2)^2 mod s1^2, s2^2 keeps only the mixed term
    assert complete_intersection_class([[1, 1], [1, 1]], (1, 1)) == {(0, 0): 2}


def test_class_rejects_excess_forms():
    with pytest.raises(ValueError):
        complete_intersection_class([[1], [1], [1]], (2,))


def test_mbezout_requires_square_pattern():
    with pytest.raises(ValueError):
        mbezout([[1, 1]], (1, 1))


def test_mbezout_classical_bezout():
    # two conics in the plane (one group of size 2): 4 intersections
    assert mbezout([[2], [2]], (2,)) == 4


def test_total_degree_package():
    g = VariableGrouping.from_sizes([2], ["x", "y"])
    x, y = Polynomial.variable(g, 0), Polynomial.variable(g, 1)
    target = PolySystem([x**2 + y - 1, x * y**3 - 2])
    sp = start_package(target, "total-degree", rs(10))
    assert sp.predicted_count == 2 * 4
    assert len(sp.solutions) == 8
    for s in sp.solutions:
        assert np.max(np.abs(sp.start.evaluate(s))) < 1e-10


def test_linear_product_package_counts_and_solves():
    g = VariableGrouping.from_sizes([1, 1], ["x", "y"])
    x, y = Polynomial.variable(g, 0), Polynomial.variable(g, 1)
    target = PolySystem([x * y - 1, x + y - 3])
    sp = start_package(target, "linear-product", rs(11))
    # degrees (1,1) and (1,1): the count is the permanent, 2
    assert sp.predicted_count == 2
    assert len(sp.solutions) == 2
    for s in sp.solutions:
        assert np.max(np.abs(sp.start.evaluate(s))) < 1e-9


def test_start_package_validation():
    g = VariableGrouping.from_sizes([2], ["x", "y"])
    x = Polynomial.variable(g, 0)
    with pytest.raises(ValueError):
        start_package(PolySystem([x]), "total-degree", rs(0))  # not square
    sq = PolySystem([x, Polynomial.variable(g, 1)])
    with pytest.raises(ValueError):
        start_package(sq, "no-such-kind", rs(0))


def test_square_up():
    g = VariableGrouping.from_sizes([2], ["x", "y"])
    x, y = Polynomial.variable(g, 0), Polynomial.variable(g, 1)
    F = PolySystem([x - 1, y - 2, x + y - 3])
    same = square_up(F, 3, rs(12))
    assert same is F
    small = square_up(F, 2, rs(12))
    assert len(small) == 2
    # combinations of F vanish wherever F does
    pt = np.array([1.0, 2.0], dtype=complex)
    assert np.max(np.abs(small.evaluate(pt))) < 1e-12
    with pytest.raises(ValueError):
        square_up(F, 4, rs(12))


def test_residual_ok_scales_relatively():
    g = VariableGrouping.from_sizes([1], ["x"])
    x = Polynomial.variable(g, 0)
    F = PolySystem([x**2 - 1])
    assert residual_ok(F, np.array([1.0 + 0j]))
    assert not residual_ok(F, np.array([1.1 + 0j]))


def test_solve_zero_dim_line_pair():
    fx = get_fixture("two-lines")
    g = fx.system.grouping
    slices = [random_affine_form(g, [0, 1], rs(13))]
    pts = solve_zero_dim(fx.system, slices, rs(14))
    assert len(pts) == 2
    full = fx.system.concat(slices)
    for p in pts:
        assert residual_ok(full, p)


def test_solve_zero_dim_cubic_degree():
    fx = get_fixture("cubic")
    g = fx.system.grouping
    slices = [random_affine_form(g, [0, 1], rs(15))]
    pts = solve_zero_dim(fx.system, slices, rs(16))
    assert len(pts) == 3


def test_solve_zero_dim_rejects_underdetermined():
    fx = get_fixture("cubic")
    with pytest.raises(ValueError):
        solve_zero_dim(fx.system, [], rs(0))
