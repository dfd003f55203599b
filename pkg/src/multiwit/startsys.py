"""Root-count combinatorics and start systems.

Contains the multihomogeneous Bezout machinery (complete-intersection
multidegree classes and the m-Bezout count), total-degree and
linear-product start systems, and solve_zero_dim: the square
zero-dimensional solver (random square-up + gamma homotopy) that every
witness computation sits on.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import Polynomial, PolySystem
from .sysio import RandomSource
from .tracker import (
    Homotopy,
    NonconvergenceError,
    SingularJacobianError,
    TrackOptions,
    TrackingError,
    dedupe_points,
    newton_refine,
    track_many,
)

RESIDUAL_TOL = 1e-8  # relative residual for accepting a point on the original system


def complete_intersection_class(
    degrees: Sequence[Sequence[int]], nvec: Sequence[int]
) -> dict[tuple[int, ...], int]:
    """Multidegree map of a general complete intersection.

    Expands prod_j (sum_i d_{j,i} s_i) modulo s_i^(n_i+1); the coefficient
    of s^(n-a) is reported as Deg(a).  Exact integer arithmetic.
    """
    nvec = tuple(int(n) for n in nvec)
    k = len(nvec)
    if len(degrees) > sum(nvec):
        raise ValueError("more forms than the ambient dimension")
    shape = tuple(n + 1 for n in nvec)
    poly = np.zeros(shape, dtype=object)
    poly[(0,) * k] = 1
    for d in degrees:
        d = tuple(int(x) for x in d)
        if len(d) != k:
            raise ValueError(f"degree vector {d} has arity {len(d)}, expected {k}")
        new = np.zeros(shape, dtype=object)
        for idx in np.ndindex(shape):
            c = poly[idx]
            if c == 0:
                continue
            for i in range(k):
                if d[i] == 0:
                    continue
                if idx[i] + 1 <= nvec[i]:
                    jdx = idx[:i] + (idx[i] + 1,) + idx[i + 1:]
                    new[jdx] += c * d[i]
        poly = new
    out = {}
    for idx in np.ndindex(shape):
        c = poly[idx]
        if c != 0:
            a = tuple(n - x for n, x in zip(nvec, idx))
            out[a] = int(c)
    return out


def mbezout(degrees: Sequence[Sequence[int]], nvec: Sequence[int]) -> int:
    """Coefficient of prod s_i^{n_i} in prod_j (sum_i d_{j,i} s_i)."""
    nvec = tuple(int(n) for n in nvec)
    if len(degrees) != sum(nvec):
        raise ValueError(
            f"m-Bezout needs a square pattern: {len(degrees)} forms vs dimension {sum(nvec)}"
        )
    cls = complete_intersection_class(degrees, nvec)
    return cls.get((0,) * len(nvec), 0)


@dataclass
class StartPackage:
    start: PolySystem
    solutions: list[np.ndarray]
    predicted_count: int


def _random_affine_in_group(grouping, group: int, rs: RandomSource) -> Polynomial:
    block = grouping.blocks[group]
    coeffs = [rs.gaussian_complex() for _ in block]
    return Polynomial.affine(grouping, coeffs, rs.gaussian_complex(), block)


def _total_degree_package(target: PolySystem, rs: RandomSource) -> StartPackage:
    g = target.grouping
    n = g.nvars
    degs = [sum(p.multidegree()) for p in target.polys]
    if any(d == 0 for d in degs):
        raise ValueError("total-degree start needs every equation nonconstant")
    polys = []
    roots_per_var = []
    for j, d in enumerate(degs):
        xj = Polynomial.variable(g, j)
        polys.append(xj ** d - 1)
        roots_per_var.append(
            [np.exp(2j * np.pi * r / d) for r in range(d)]
        )
    count = int(np.prod([len(r) for r in roots_per_var]))
    solutions = [np.asarray(sol, dtype=complex) for sol in itertools.product(*roots_per_var)]
    return StartPackage(PolySystem(polys), solutions, count)


def _linear_product_package(target: PolySystem, rs: RandomSource) -> StartPackage:
    g = target.grouping
    k = g.k
    patterns = [p.multidegree() for p in target.polys]
    if any(sum(d) == 0 for d in patterns):
        raise ValueError("linear-product start needs every equation nonconstant")
    predicted = mbezout(patterns, g.sizes)

    # One random affine form per unit of group-degree per equation.
    factors: list[list[tuple[int, Polynomial]]] = []
    for d in patterns:
        eq_factors = []
        for i in range(k):
            for _ in range(d[i]):
                eq_factors.append((i, _random_affine_in_group(g, i, rs)))
        factors.append(eq_factors)

    start_polys = []
    for eq_factors in factors:
        p = Polynomial.constant(g, 1.0)
        for _, form in eq_factors:
            p = p * form
        start_polys.append(p)

    # Enumerate cells: per equation one factor, per group exactly n_i picks.
    solutions: list[np.ndarray] = []
    m = len(factors)
    capacity = list(g.sizes)

    def solve_cell(chosen: list[tuple[int, Polynomial]]) -> np.ndarray:
        x = np.zeros(g.nvars, dtype=complex)
        for i in range(k):
            block = list(g.blocks[i])
            forms = [f for gi, f in chosen if gi == i]
            A = np.zeros((len(block), len(block)), dtype=complex)
            b = np.zeros(len(block), dtype=complex)
            for r, form in enumerate(forms):
                for cidx, v in enumerate(block):
                    e = [0] * g.nvars
                    e[v] = 1
                    A[r, cidx] = form.terms.get(tuple(e), 0.0)
                b[r] = -form.terms.get((0,) * g.nvars, 0.0)
            x[block] = np.linalg.solve(A, b)
        return x

    def recurse(j: int, chosen: list):
        if j == m:
            solutions.append(solve_cell(chosen))
            return
        # each equation consumes one capacity unit, so capacities stay
        # exactly fillable; only per-group exhaustion needs checking
        for gi, form in factors[j]:
            if capacity[gi] == 0:
                continue
            capacity[gi] -= 1
            chosen.append((gi, form))
            recurse(j + 1, chosen)
            chosen.pop()
            capacity[gi] += 1

    recurse(0, [])
    if len(solutions) != predicted:
        raise TrackingError(
            f"linear-product cell count {len(solutions)} disagrees with m-Bezout {predicted}"
        )
    return StartPackage(PolySystem(start_polys), solutions, predicted)


def start_package(target: PolySystem, kind: str, rs: RandomSource) -> StartPackage:
    if len(target) != target.grouping.nvars:
        raise ValueError("start systems require a square target")
    if kind == "total-degree":
        return _total_degree_package(target, rs)
    if kind == "linear-product":
        return _linear_product_package(target, rs)
    raise ValueError(f"unknown start system kind: {kind!r}")


def square_up(F: PolySystem, rows: int, rs: RandomSource) -> PolySystem:
    """Replace F by `rows` random complex combinations of its equations."""
    if rows > len(F):
        raise ValueError("cannot square up to more equations than given")
    if rows == len(F):
        return F
    A = rs.gaussian_complex_array(rows, len(F))
    polys = []
    for i in range(rows):
        p = Polynomial.constant(F.grouping, 0.0)
        for j, f in enumerate(F.polys):
            p = p + A[i, j] * f
        polys.append(p)
    return PolySystem(polys)


def residual_ok(F: PolySystem, point: np.ndarray, tol: float = RESIDUAL_TOL) -> bool:
    r = np.abs(F.evaluate(point))
    scale = F.residual_scale(point)
    return bool(np.max(r / scale) < tol)


def solve_zero_dim(
    F: PolySystem,
    slices: Sequence[Polynomial],
    rs: RandomSource,
    opts: TrackOptions = TrackOptions(),
) -> list[np.ndarray]:
    """Isolated nonsingular solutions of V(F) intersected with V(slices).

    Squares F up to (nvars - |slices|) random combinations when
    overdetermined, appends the slices, solves by a linear-product start
    homotopy, then keeps only deduplicated endpoints whose residual on
    the ORIGINAL F is small.
    """
    g = F.grouping
    n = g.nvars
    s = len(slices)
    if len(F) + s < n:
        raise ValueError(
            f"underdetermined: {len(F)} equations + {s} slices < {n} variables"
        )
    core = square_up(F, n - s, rs.substream(1))
    target = core.concat(list(slices))
    sp = start_package(target, "linear-product", rs.substream(2))
    h = Homotopy(sp.start, target, gamma=rs.substream(3).unit_complex())
    results = track_many(h, sp.solutions, opts)

    failed = sum(1 for r in results if r.status == "failed")
    if results and failed > len(results) / 2:
        raise TrackingError(
            f"{failed}/{len(results)} paths failed; homotopy appears ill-conditioned"
        )

    points = []
    for r in results:
        if not r.converged:
            continue
        try:
            p = newton_refine(target, r.endpoint, tol=1e-10)
        except (SingularJacobianError, NonconvergenceError):
            continue
        if residual_ok(F, p):
            points.append(p)
    return dedupe_points(points)
