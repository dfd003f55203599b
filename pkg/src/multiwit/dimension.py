"""Local multidimension at a smooth point and the dimension polytope.

At a general smooth point x of a component X of V(F), the total
dimension is the corank of DF(x) and each projected dimension dim_I(X)
is read off kernel dimensions of Jacobian column blocks.  The lattice
points e with |e| = dim X and sum_{i in I} e_i <= dim_I for all proper
subsets I form the dimension polytope Dim(X) (a polymatroid polytope).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .algebra import PolySystem, numerical_rank

MAX_GROUPS = 16


class IllConditionedError(RuntimeError):
    """Rank of a Jacobian block changed across a tolerance decade."""


@dataclass(frozen=True)
class DimensionProfile:
    total_dim: int
    proj_dims: dict  # frozenset of group indices -> dim_I
    k: int

    def dim(self, I) -> int:
        I = frozenset(I)
        if not I:
            return 0
        if len(I) == self.k:
            return self.total_dim
        return self.proj_dims[I]

    def signature(self) -> tuple:
        """Hashable identity for grouping points by profile."""
        items = tuple(sorted((tuple(sorted(I)), d) for I, d in self.proj_dims.items()))
        return (self.total_dim, items)

    def check_monotone(self) -> bool:
        subsets = list(self.proj_dims) + [frozenset(range(self.k))]
        for I in subsets:
            for J in subsets:
                if I < J and self.dim(I) > self.dim(J):
                    return False
        return True


def _stable_rank(M: np.ndarray, rel_tol: float, what: str) -> int:
    r1 = numerical_rank(M, rel_tol)
    r2 = numerical_rank(M, min(10 * rel_tol, 0.5))
    if r1 != r2:
        raise IllConditionedError(
            f"rank of {what} is {r1} at tol {rel_tol:g} but {r2} at {10 * rel_tol:g}; "
            "the point does not look general"
        )
    return r1


def local_multidimension(
    F: PolySystem, point, rel_tol: float = 1e-8
) -> DimensionProfile:
    """Dimension profile of the component of V(F) through a smooth point."""
    g = F.grouping
    k = g.k
    if k > MAX_GROUPS:
        raise ValueError(f"at most {MAX_GROUPS} groups supported, got {k}")
    point = np.asarray(point, dtype=complex)
    J = F.jacobian(point)
    n = g.nvars
    rank_full = _stable_rank(J, rel_tol, "DF")
    ker_full = n - rank_full
    total = ker_full

    proj = {}
    for r in range(1, k):
        for I in combinations(range(k), r):
            Ic_cols = [v for i in range(k) if i not in I for v in g.blocks[i]]
            sub = J[:, sorted(Ic_cols)]
            cols = len(Ic_cols)
            rank_sub = _stable_rank(sub, rel_tol, f"DF restricted to complement of {I}")
            ker_sub = cols - rank_sub
            proj[frozenset(I)] = ker_full - ker_sub
    profile = DimensionProfile(total_dim=total, proj_dims=proj, k=k)
    if not profile.check_monotone():
        raise IllConditionedError("projected dimensions are not monotone; point not general")
    return profile


def dimension_polytope(profile: DimensionProfile, nvec: Sequence[int]) -> frozenset:
    """All e in [nvec] with |e| = dim and the polymatroid inequalities."""
    nvec = tuple(int(x) for x in nvec)
    k = len(nvec)
    if k != profile.k:
        raise ValueError(f"nvec arity {k} does not match profile arity {profile.k}")
    total = profile.total_dim
    singles = [profile.dim([i]) for i in range(k)]
    out = []

    def recurse(i: int, prefix: list, remaining: int):
        if i == k:
            if remaining == 0:
                e = tuple(prefix)
                for r in range(1, k):
                    for I in combinations(range(k), r):
                        if sum(e[j] for j in I) > profile.dim(I):
                            return
                out.append(e)
            return
        hi = min(nvec[i], singles[i], remaining)
        for x in range(hi + 1):
            prefix.append(x)
            recurse(i + 1, prefix, remaining - x)
            prefix.pop()

    recurse(0, [], total)
    if not out:
        raise ValueError("dimension polytope is empty; profile inconsistent with nvec")
    return frozenset(out)


def slice_polytope(points, group: int) -> frozenset:
    """Lattice points of Dim(X cap V(l)) for a general l in one group."""
    out = {
        tuple(x - (1 if i == group else 0) for i, x in enumerate(e))
        for e in points
        if e[group] > 0
    }
    return frozenset(out)


def polytope_proj_dim(points, I) -> int:
    """dim_I read off the polytope: max coordinate sum over I."""
    return max(sum(e[i] for i in I) for e in points)


def equidim_partition(F: PolySystem, points: Sequence, rel_tol: float = 1e-8) -> list:
    """Partition points by equal dimension profile.

    Returns a list of (profile, point list) pairs, in order of first
    appearance."""
    order = []
    groups: dict = {}
    for p in points:
        prof = local_multidimension(F, p, rel_tol)
        sig = prof.signature()
        if sig not in groups:
            groups[sig] = (prof, [])
            order.append(sig)
        groups[sig][1].append(p)
    return [groups[sig] for sig in order]


def _projection(points, block) -> frozenset:
    return frozenset(tuple(e[i] for i in block) for e in points)


def _is_product(points, block_a, block_b) -> bool:
    union = sorted(block_a) + sorted(block_b)
    union_proj = _projection(points, union)
    pa = _projection(points, sorted(block_a))
    pb = _projection(points, sorted(block_b))
    if len(union_proj) != len(pa) * len(pb):
        return False
    want = set()
    for x in pa:
        for y in pb:
            combined = {}
            for v, c in zip(sorted(block_a), x):
                combined[v] = c
            for v, c in zip(sorted(block_b), y):
                combined[v] = c
            want.add(tuple(combined[v] for v in union))
    return union_proj == want


def product_factorization(points) -> list[tuple[int, ...]]:
    """Finest partition of the groups under which the polytope is a product."""
    points = frozenset(tuple(e) for e in points)
    if not points:
        raise ValueError("empty dimension polytope")
    k = len(next(iter(points)))
    blocks = [[i] for i in range(k)]
    changed = True
    while changed:
        changed = False
        for x in range(len(blocks)):
            for y in range(x + 1, len(blocks)):
                if not _is_product(points, blocks[x], blocks[y]):
                    blocks[x] = sorted(blocks[x] + blocks[y])
                    del blocks[y]
                    changed = True
                    break
            if changed:
                break
    # global verification: the pairwise fixpoint must reproduce the polytope
    count = 1
    for b in blocks:
        count *= len(_projection(points, sorted(b)))
    if count != len(points):
        return [tuple(range(k))]
    return [tuple(b) for b in blocks]
