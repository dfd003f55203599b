import numpy as np
import pytest

from multiwit import (
    PolySystem,
    Polynomial,
    VariableGrouping,
    dehomogenize,
    homogenize,
    multidegree_of,
    numerical_rank,
)


def grouping2():
    return VariableGrouping.from_sizes([2, 1], ["x1", "x2", "y"])


def test_grouping_basics():
    g = grouping2()
    assert g.k == 2
    assert g.sizes == (2, 1)
    assert g.nvars == 3
    assert g.group_of == (0, 0, 1)


def test_grouping_merge_and_split():
    g = grouping2()
    m = g.merge(0, 1)
    assert m.k == 1
    assert m.sizes == (3,)
    s = g.split(0, [0])
    assert s.k == 3
    assert s.sizes == (1, 1, 1)


def test_polynomial_arithmetic_expansion():
    g = grouping2()
    x1 = Polynomial.variable(g, 0)
    x2 = Polynomial.variable(g, 1)
    p = (x1 + x2) ** 2
    assert set(p.terms) == {(2, 0, 0), (1, 1, 0), (0, 2, 0)}
    assert p.terms[(2, 0, 0)] == 1
    assert p.terms[(1, 1, 0)] == 2
    assert p.terms[(0, 2, 0)] == 1


def test_polynomial_evaluate_matches_direct_computation():
    g = grouping2()
    x1, x2, y = (Polynomial.variable(g, v) for v in range(3))
    p = 3 * x1**2 * y - 2 * x2 + 5
    pt = np.array([1.5 + 0.5j, -2.0, 0.25j])
    expected = 3 * pt[0] ** 2 * pt[2] - 2 * pt[1] + 5
    assert abs(p.evaluate(pt) - expected) < 1e-12


def test_polynomial_diff():
    g = grouping2()
    x1, x2, y = (Polynomial.variable(g, v) for v in range(3))
    p = x1**3 * y + 7 * x2
    dp = p.diff(0)
    pt = np.array([2.0, 3.0, 4.0], dtype=complex)
    assert abs(dp.evaluate(pt) - 3 * pt[0] ** 2 * pt[2]) < 1e-12
    assert abs(p.diff(1).evaluate(pt) - 7) < 1e-12


def test_multidegree_per_group():
    g = grouping2()
    x1, x2, y = (Polynomial.variable(g, v) for v in range(3))
    p = x1 * x2 * y**2 + x1**3
    assert p.multidegree() == (3, 2)
    assert multidegree_of(p) == (3, 2)


def test_affine_constructor():
    g = grouping2()
    p = Polynomial.affine(g, [2.0, 3.0], 1.0, [0, 2])
    pt = np.array([1.0, 9.0, 2.0], dtype=complex)
    assert abs(p.evaluate(pt) - (2 * 1 + 3 * 2 + 1)) < 1e-12


def test_system_requires_polynomials_and_shared_grouping():
    g = grouping2()
    other = VariableGrouping.from_sizes([3], ["a", "b", "c"])
    with pytest.raises(ValueError):
        PolySystem([])
    with pytest.raises(ValueError):
        PolySystem([Polynomial.variable(g, 0), Polynomial.variable(other, 0)])


def test_jacobian_matches_finite_differences():
    g = grouping2()
    x1, x2, y = (Polynomial.variable(g, v) for v in range(3))
    F = PolySystem([x1**2 * y - x2, x1 + x2 * y**3])
    pt = np.array([1.1, -0.3, 0.7], dtype=complex)
    J = F.jacobian(pt)
    h = 1e-7
    for v in range(3):
        dpt = pt.copy()
        dpt[v] += h
        col = (F.evaluate(dpt) - F.evaluate(pt)) / h
        assert np.allclose(J[:, v], col, atol=1e-5)


def test_jacobian_omit_groups():
    g = grouping2()
    x1, x2, y = (Polynomial.variable(g, v) for v in range(3))
    F = PolySystem([x1 * y, x2 + y])
    pt = np.array([1.0, 2.0, 3.0], dtype=complex)
    J = F.jacobian(pt, omit_groups=[0])
    assert J.shape == (2, 1)  # only the y column remains


def test_numerical_rank_known_ranks():
    rng = np.random.default_rng(0)
    A = rng.normal(size=(5, 3)) + 1j * rng.normal(size=(5, 3))
    assert numerical_rank(A) == 3
    B = np.outer(A[:, 0], np.conj(A[:, 1]))
    assert numerical_rank(B) == 1
    assert numerical_rank(np.zeros((4, 4))) == 0
    with pytest.raises(ValueError):
        numerical_rank(A, rel_tol=2.0)


def test_homogenize_makes_polynomial_multihomogeneous():
    g = grouping2()
    x1, x2, y = (Polynomial.variable(g, v) for v in range(3))
    p = x1**2 * y + x2 - 1
    ph = homogenize(p)
    d = p.multidegree()
    rng = np.random.default_rng(1)
    pt = rng.normal(size=5) + 1j * rng.normal(size=5)
    lam, mu = 1.3 - 0.2j, 0.4 + 0.9j
    scaled = pt.copy()
    scaled[:3] *= lam  # group 0 gained a homogenizing coordinate: size 3
    scaled[3:] *= mu
    lhs = ph.evaluate(scaled)
    rhs = lam ** d[0] * mu ** d[1] * ph.evaluate(pt)
    assert abs(lhs - rhs) < 1e-10 * max(1.0, abs(rhs))


def test_homogenize_dehomogenize_round_trip():
    g = grouping2()
    x1, x2, y = (Polynomial.variable(g, v) for v in range(3))
    p = x1**2 * y + 4 * x2 - 1
    back = dehomogenize(homogenize(p))
    pt = np.array([0.3, -1.2, 2.5], dtype=complex)
    assert abs(back.evaluate(pt) - p.evaluate(pt)) < 1e-12


def test_with_grouping_preserves_values():
    g = grouping2()
    merged = g.merge(0, 1)
    x1, x2, y = (Polynomial.variable(g, v) for v in range(3))
    p = x1 * y - x2**2
    q = p.with_grouping(merged)
    pt = np.array([1.0, 2.0, 3.0], dtype=complex)
    assert abs(q.evaluate(pt) - p.evaluate(pt)) < 1e-12
    assert q.grouping.k == 1
