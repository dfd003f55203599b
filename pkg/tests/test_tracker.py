import numpy as np
import pytest

from multiwit import (
    Homotopy,
    NonconvergenceError,
    PolySystem,
    Polynomial,
    SingularJacobianError,
    TrackOptions,
    VariableGrouping,
    newton_refine,
    track_many,
    track_path,
)
from multiwit.tracker import dedupe_points, points_equal

from conftest import rs


def univariate():
    g = VariableGrouping.from_sizes([1], ["x"])
    return g, Polynomial.variable(g, 0)


def test_track_quadratic_to_quadratic():
    g, x = univariate()
    h = Homotopy(PolySystem([x**2 - 1]), PolySystem([x**2 - 4]),
                 gamma=rs(0).unit_complex())
    results = track_many(h, [np.array([1.0 + 0j]), np.array([-1.0 + 0j])])
    assert all(r.converged for r in results)
    ends = sorted(complex(r.endpoint[0]).real for r in results)
    assert abs(ends[0] + 2) < 1e-8 and abs(ends[1] - 2) < 1e-8


def test_track_matches_numpy_roots():
    g, x = univariate()
    coeffs = [1.0, -0.7 + 0.3j, 2.0, -1.5j]  # x^3 - ... cubic
    target = (
        x**3 + coeffs[1] * x**2 + coeffs[2] * x
        + Polynomial.constant(g, coeffs[3])
    )
    h = Homotopy(PolySystem([x**3 - 1]), PolySystem([target]),
                 gamma=rs(1).unit_complex())
    starts = [np.array([np.exp(2j * np.pi * k / 3)]) for k in range(3)]
    results = track_many(h, starts)
    assert all(r.converged for r in results)
    got = sorted((complex(r.endpoint[0]) for r in results),
                 key=lambda z: (z.real, z.imag))
    expected = sorted(np.roots(coeffs), key=lambda z: (z.real, z.imag))
    for a, b in zip(got, expected):
        assert abs(a - b) < 1e-7


def test_degree_drop_classifies_divergence():
    g, x = univariate()
    # the cubic degenerates to a quadratic at t=0: one path must diverge
    h = Homotopy(PolySystem([x**3 - 1]), PolySystem([x**2 - 2]),
                 gamma=rs(2).unit_complex())
    starts = [np.array([np.exp(2j * np.pi * k / 3)]) for k in range(3)]
    results = track_many(h, starts)
    statuses = sorted(r.status for r in results)
    assert statuses == ["converged", "converged", "diverged"]
    ends = sorted(complex(r.endpoint[0]).real for r in results if r.converged)
    assert abs(ends[0] + np.sqrt(2)) < 1e-8 and abs(ends[1] - np.sqrt(2)) < 1e-8


def test_track_path_single():
    g, x = univariate()
    h = Homotopy(PolySystem([x**2 - 1]), PolySystem([x**2 - 9]), gamma=1.0)
    r = track_path(h, np.array([1.0 + 0j]))
    assert r.converged
    assert abs(r.endpoint[0] - 3) < 1e-8
    assert r.steps_taken > 0


def test_homotopy_shape_validation():
    g, x = univariate()
    with pytest.raises(ValueError):
        Homotopy(PolySystem([x, x]), PolySystem([x]))
    with pytest.raises(ValueError):
        Homotopy(PolySystem([x]), PolySystem([x]), gamma=0.0)


def test_fixed_block_stays_satisfied():
    g = VariableGrouping.from_sizes([2], ["x", "y"])
    x, y = Polynomial.variable(g, 0), Polynomial.variable(g, 1)
    circle = x**2 + y**2 - 2
    # move a line through (1,1) to a line through (1,-1), along the circle
    start_line = x - y
    end_line = x + y
    h = Homotopy(PolySystem([start_line]), PolySystem([end_line]),
                 gamma=rs(3).unit_complex(), fixed=PolySystem([circle]))
    r = track_path(h, np.array([1.0 + 0j, 1.0 + 0j]))
    assert r.converged
    assert abs(circle.evaluate(r.endpoint)) < 1e-7
    assert abs(end_line.evaluate(r.endpoint)) < 1e-7


def test_newton_refine_quadratic_convergence():
    g = VariableGrouping.from_sizes([2], ["x", "y"])
    x, y = Polynomial.variable(g, 0), Polynomial.variable(g, 1)
    F = PolySystem([x**2 + y**2 - 2, x - y])
    p = newton_refine(F, np.array([1.01, 0.99], dtype=complex), tol=1e-12)
    assert np.allclose(p, [1.0, 1.0], atol=1e-10)


def test_newton_refine_singular_raises():
    g, x = univariate()
    F = PolySystem([x**2 - 1])
    # at x = 0 the Jacobian vanishes while the residual does not
    with pytest.raises(SingularJacobianError):
        newton_refine(F, np.array([0.0 + 0j]))


def test_newton_refine_nonconvergence_raises():
    g, x = univariate()
    F = PolySystem([x**2 - 1])
    with pytest.raises(NonconvergenceError):
        newton_refine(F, np.array([100.0 + 0j]), tol=1e-12, max_iters=2)


def test_points_equal_and_dedupe():
    a = np.array([1.0, 2.0], dtype=complex)
    b = a + 1e-12
    c = np.array([1.0, 2.1], dtype=complex)
    assert points_equal(a, b)
    assert not points_equal(a, c)
    assert len(dedupe_points([a, b, c])) == 2


def test_track_many_workers_agree():
    g, x = univariate()
    target = x**4 - 3 * x + 1
    h = Homotopy(PolySystem([x**4 - 1]), PolySystem([target]),
                 gamma=rs(4).unit_complex())
    starts = [np.array([np.exp(2j * np.pi * k / 4)]) for k in range(4)]
    serial = track_many(h, starts, TrackOptions(workers=1))
    parallel = track_many(h, starts, TrackOptions(workers=4))
    for a, b in zip(serial, parallel):
        assert a.status == b.status
        if a.converged:
            assert np.allclose(a.endpoint, b.endpoint, atol=1e-9)


def test_track_options_validation():
    with pytest.raises(ValueError):
        TrackOptions(initial_step=1.0, max_step=0.1)
    with pytest.raises(ValueError):
        TrackOptions(newton_tol=0.0)
