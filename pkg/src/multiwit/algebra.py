"""Sparse complex polynomials over grouped variables.

Polynomials are stored as maps from dense exponent vectors to complex
coefficients.  Variables are partitioned into groups (the factors of a
product of affine/projective spaces); most operations here are indexed
by group: per-group degrees, Jacobian column blocks, homogenization.

Evaluation and differentiation of whole systems go through a compiled
form (stacked exponent/coefficient arrays) so the path tracker can call
them cheaply.
"""

from __future__ import annotations

from functools import cached_property
from typing import Iterable, Sequence

import numpy as np


class VariableGrouping:
    """A partition of the variables into ordered groups.

    blocks[i] is the tuple of variable indices belonging to group i.
    names[v] is the identifier of variable v.
    """

    def __init__(self, blocks: Sequence[Sequence[int]], names: Sequence[str]):
        blocks = tuple(tuple(b) for b in blocks)
        names = tuple(names)
        if not blocks or any(len(b) == 0 for b in blocks):
            raise ValueError("every group must contain at least one variable")
        flat = sorted(v for b in blocks for v in b)
        if flat != list(range(len(names))):
            raise ValueError("blocks must partition the variable indices")
        if len(set(names)) != len(names):
            raise ValueError("variable names must be unique")
        self.blocks = blocks
        self.names = names

    @classmethod
    def from_sizes(cls, sizes: Sequence[int], names: Sequence[str]) -> "VariableGrouping":
        blocks = []
        start = 0
        for n in sizes:
            blocks.append(tuple(range(start, start + n)))
            start += n
        return cls(blocks, names)

    @property
    def k(self) -> int:
        return len(self.blocks)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    @property
    def nvars(self) -> int:
        return len(self.names)

    @cached_property
    def group_of(self) -> tuple[int, ...]:
        owner = [0] * self.nvars
        for i, b in enumerate(self.blocks):
            for v in b:
                owner[v] = i
        return tuple(owner)

    def merge(self, a: int, b: int) -> "VariableGrouping":
        """Merge group b into group a; the merged group keeps position a."""
        if a == b:
            raise ValueError("cannot merge a group with itself")
        a, b = min(a, b), max(a, b)
        blocks = list(self.blocks)
        merged = tuple(sorted(blocks[a] + blocks[b]))
        blocks[a] = merged
        del blocks[b]
        return VariableGrouping(blocks, self.names)

    def split(self, group: int, first_part: Sequence[int]) -> "VariableGrouping":
        """Split one group in two; first_part lists variable indices kept in
        the first half, the rest form a new group inserted right after."""
        first = tuple(first_part)
        block = self.blocks[group]
        if not first or not set(first) < set(block):
            raise ValueError("first_part must be a proper nonempty subset of the group")
        second = tuple(v for v in block if v not in first)
        blocks = list(self.blocks)
        blocks[group] = first
        blocks.insert(group + 1, second)
        return VariableGrouping(blocks, self.names)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, VariableGrouping)
            and self.blocks == other.blocks
            and self.names == other.names
        )

    def __hash__(self) -> int:
        return hash((self.blocks, self.names))

    def __repr__(self) -> str:
        parts = ["|".join(self.names[v] for v in b) for b in self.blocks]
        return f"VariableGrouping({', '.join(parts)})"


class Polynomial:
    """A sparse polynomial: exponent vector -> complex coefficient."""

    def __init__(self, grouping: VariableGrouping, terms: dict):
        self.grouping = grouping
        self.terms = {
            tuple(e): complex(c) for e, c in terms.items() if c != 0
        }

    @classmethod
    def constant(cls, grouping: VariableGrouping, c: complex) -> "Polynomial":
        return cls(grouping, {(0,) * grouping.nvars: c})

    @classmethod
    def variable(cls, grouping: VariableGrouping, v: int) -> "Polynomial":
        e = [0] * grouping.nvars
        e[v] = 1
        return cls(grouping, {tuple(e): 1.0})

    @classmethod
    def affine(cls, grouping: VariableGrouping, coeffs: Sequence[complex],
               constant: complex, variables: Sequence[int] | None = None) -> "Polynomial":
        """constant + sum coeffs[j] * x_{variables[j]}."""
        if variables is None:
            variables = range(grouping.nvars)
        terms = {(0,) * grouping.nvars: complex(constant)}
        for c, v in zip(coeffs, variables, strict=True):
            e = [0] * grouping.nvars
            e[v] = 1
            terms[tuple(e)] = complex(c)
        return cls(grouping, terms)

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0.0) + c
        return Polynomial(self.grouping, terms)

    def __radd__(self, other) -> "Polynomial":
        return self + other

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.grouping, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return -self + other

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, float, complex)):
            return Polynomial(
                self.grouping, {e: c * other for e, c in self.terms.items()}
            )
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0.0) + c1 * c2
        return Polynomial(self.grouping, terms)

    def __rmul__(self, other) -> "Polynomial":
        return self * other

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(self.grouping, 1.0)
        for _ in range(n):
            result = result * self
        return result

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        return Polynomial.constant(self.grouping, other)

    def diff(self, v: int) -> "Polynomial":
        terms = {}
        for e, c in self.terms.items():
            if e[v] > 0:
                de = list(e)
                de[v] -= 1
                terms[tuple(de)] = c * e[v]
        return Polynomial(self.grouping, terms)

    def evaluate(self, point: np.ndarray) -> complex:
        point = np.asarray(point, dtype=complex)
        total = 0.0 + 0.0j
        for e, c in self.terms.items():
            total += c * np.prod(point ** np.asarray(e))
        return complex(total)

    def multidegree(self) -> tuple[int, ...]:
        """Per-group max total degree across terms; all-zeros for 0."""
        g = self.grouping
        deg = [0] * g.k
        for e in self.terms:
            for i, block in enumerate(g.blocks):
                d = sum(e[v] for v in block)
                if d > deg[i]:
                    deg[i] = d
        return tuple(deg)

    def with_grouping(self, grouping: VariableGrouping) -> "Polynomial":
        if grouping.nvars != self.grouping.nvars:
            raise ValueError("regrouping must preserve the variable set")
        return Polynomial(grouping, self.terms)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polynomial)
            and self.grouping == other.grouping
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.grouping, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        names = self.grouping.names
        parts = []
        for e in sorted(self.terms, key=lambda e: (-sum(e), tuple(-x for x in e))):
            c = self.terms[e]
            mono = "*".join(
                f"{names[v]}^{d}" if d > 1 else names[v]
                for v, d in enumerate(e) if d > 0
            )
            coeff = _fmt_complex(c)
            parts.append(f"{coeff}*{mono}" if mono else coeff)
        return " + ".join(parts)


def _fmt_complex(c: complex) -> str:
    if c.imag == 0:
        r = c.real
        return repr(int(r)) if r == int(r) else repr(r)
    return f"({c.real:+g}{c.imag:+g}i)"


class _Compiled:
    """Stacked term arrays for fast batch evaluation of a poly list."""

    def __init__(self, polys: Sequence[Polynomial], nvars: int):
        exps, coeffs, owners = [], [], []
        for j, p in enumerate(polys):
            for e, c in p.terms.items():
                exps.append(e)
                coeffs.append(c)
                owners.append(j)
        self.m = len(polys)
        self.nvars = nvars
        if exps:
            self.E = np.asarray(exps, dtype=np.int64)
            self.c = np.asarray(coeffs, dtype=complex)
            self.owner = np.asarray(owners, dtype=np.int64)
            self.maxdeg = int(self.E.max())
            self.cols = np.arange(nvars)
        else:
            self.E = np.zeros((0, nvars), dtype=np.int64)
            self.c = np.zeros(0, dtype=complex)
            self.owner = np.zeros(0, dtype=np.int64)
            self.maxdeg = 0
            self.cols = np.arange(nvars)

    def _term_values(self, point: np.ndarray) -> np.ndarray:
        # pow_table[v, d] = point[v]**d via cumulative products
        pow_table = np.ones((self.nvars, self.maxdeg + 1), dtype=complex)
        for d in range(1, self.maxdeg + 1):
            pow_table[:, d] = pow_table[:, d - 1] * point
        return self.c * np.prod(pow_table[self.cols, self.E], axis=1)

    def evaluate(self, point: np.ndarray) -> np.ndarray:
        out = np.zeros(self.m, dtype=complex)
        np.add.at(out, self.owner, self._term_values(point))
        return out

    def evaluate_abs(self, point: np.ndarray) -> np.ndarray:
        """Sum of |coeff| * |monomial| per poly; the scale for relative residuals."""
        apoint = np.abs(point)
        pow_table = np.ones((self.nvars, self.maxdeg + 1))
        for d in range(1, self.maxdeg + 1):
            pow_table[:, d] = pow_table[:, d - 1] * apoint
        vals = np.abs(self.c) * np.prod(pow_table[self.cols, self.E], axis=1)
        out = np.zeros(self.m)
        np.add.at(out, self.owner, vals)
        return out


class PolySystem:
    """An ordered list of polynomials over one shared grouping."""

    def __init__(self, polys: Sequence[Polynomial]):
        polys = tuple(polys)
        if not polys:
            raise ValueError("a system must contain at least one polynomial")
        grouping = polys[0].grouping
        if any(p.grouping != grouping for p in polys):
            raise ValueError("all polynomials must share one grouping")
        self.polys = polys
        self.grouping = grouping

    def __len__(self) -> int:
        return len(self.polys)

    def __iter__(self):
        return iter(self.polys)

    @cached_property
    def _compiled(self) -> _Compiled:
        return _Compiled(self.polys, self.grouping.nvars)

    @cached_property
    def _compiled_jac(self) -> tuple[_Compiled, np.ndarray, np.ndarray]:
        """Nonzero partial derivatives stacked into one compiled batch."""
        derivs, rows, cols = [], [], []
        for j, p in enumerate(self.polys):
            for v in range(self.grouping.nvars):
                d = p.diff(v)
                if d.terms:
                    derivs.append(d)
                    rows.append(j)
                    cols.append(v)
        if not derivs:
            derivs = [Polynomial.constant(self.grouping, 0.0)]
            rows, cols = [0], [0]
        return (
            _Compiled(derivs, self.grouping.nvars),
            np.asarray(rows, dtype=np.int64),
            np.asarray(cols, dtype=np.int64),
        )

    def evaluate(self, point) -> np.ndarray:
        point = np.asarray(point, dtype=complex)
        if point.shape != (self.grouping.nvars,):
            raise ValueError(
                f"point has {point.size} coordinates, expected {self.grouping.nvars}"
            )
        return self._compiled.evaluate(point)

    def residual_scale(self, point) -> np.ndarray:
        point = np.asarray(point, dtype=complex)
        return self._compiled.evaluate_abs(point) + 1.0

    def jacobian(self, point, omit_groups: Iterable[int] = ()) -> np.ndarray:
        """DF(point); column blocks of groups in omit_groups removed."""
        point = np.asarray(point, dtype=complex)
        if point.shape != (self.grouping.nvars,):
            raise ValueError(
                f"point has {point.size} coordinates, expected {self.grouping.nvars}"
            )
        comp, rows, cols = self._compiled_jac
        vals = comp.evaluate(point)
        J = np.zeros((len(self.polys), self.grouping.nvars), dtype=complex)
        J[rows, cols] = vals
        omit = set(omit_groups)
        if omit:
            bad = omit - set(range(self.grouping.k))
            if bad:
                raise ValueError(f"no such groups: {sorted(bad)}")
            keep = [
                v
                for i, b in enumerate(self.grouping.blocks)
                if i not in omit
                for v in b
            ]
            J = J[:, sorted(keep)]
        return J

    def multidegrees(self) -> list[tuple[int, ...]]:
        return [p.multidegree() for p in self.polys]

    def with_grouping(self, grouping: VariableGrouping) -> "PolySystem":
        return PolySystem([p.with_grouping(grouping) for p in self.polys])

    def concat(self, extra: Sequence[Polynomial]) -> "PolySystem":
        return PolySystem(list(self.polys) + [p.with_grouping(self.grouping) for p in extra])

    def __repr__(self) -> str:
        return f"PolySystem({len(self.polys)} polynomials, {self.grouping!r})"


def evaluate(system: PolySystem, point) -> np.ndarray:
    return system.evaluate(point)


def jacobian(system: PolySystem, point, omit_groups: Iterable[int] = ()) -> np.ndarray:
    return system.jacobian(point, omit_groups)


def numerical_rank(m: np.ndarray, rel_tol: float = 1e-8) -> int:
    """Count of singular values above rel_tol times the largest one."""
    if not 0 < rel_tol < 1:
        raise ValueError("rel_tol must lie in (0,1)")
    m = np.asarray(m, dtype=complex)
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s > rel_tol * s[0]))


def _require_consecutive(grouping: VariableGrouping) -> None:
    flat = [v for b in grouping.blocks for v in b]
    if flat != sorted(flat):
        raise ValueError("homogenization requires consecutively-indexed groups")


def homogenize(p: Polynomial, target: Sequence[int] | None = None) -> Polynomial:
    """Pad every term with a new 0th coordinate per group up to the group degree.

    The homogenizing coordinate is inserted as the first variable of each
    group in the returned polynomial's grouping.
    """
    g = p.grouping
    _require_consecutive(g)
    mdeg = p.multidegree()
    if target is None:
        target = mdeg
    target = tuple(target)
    if any(t < d for t, d in zip(target, mdeg)):
        raise ValueError(f"target multidegree {target} below polynomial degree {mdeg}")
    sizes = [n + 1 for n in g.sizes]
    names = []
    old_to_new = {}
    idx = 0
    for i, block in enumerate(g.blocks):
        names.append(f"_h{i}_{g.names[block[0]]}")
        h_idx = idx
        idx += 1
        for v in block:
            names.append(g.names[v])
            old_to_new[v] = idx
            idx += 1
        old_to_new[("h", i)] = h_idx
    new_g = VariableGrouping.from_sizes(sizes, names)
    terms = {}
    for e, c in p.terms.items():
        ne = [0] * new_g.nvars
        for v, d in enumerate(e):
            ne[old_to_new[v]] = d
        for i, block in enumerate(g.blocks):
            d = sum(e[v] for v in block)
            ne[old_to_new[("h", i)]] = target[i] - d
        terms[tuple(ne)] = c
    return Polynomial(new_g, terms)


def dehomogenize(p: Polynomial) -> Polynomial:
    """Set each group's first variable to 1 and drop it from the grouping."""
    g = p.grouping
    _require_consecutive(g)
    if any(len(b) < 2 for b in g.blocks):
        raise ValueError("every group needs at least 2 variables to dehomogenize")
    keep = [v for b in g.blocks for v in sorted(b)[1:]]
    sizes = [len(b) - 1 for b in g.blocks]
    new_g = VariableGrouping.from_sizes(sizes, [g.names[v] for v in keep])
    terms: dict = {}
    for e, c in p.terms.items():
        ne = tuple(e[v] for v in keep)
        terms[ne] = terms.get(ne, 0.0) + c
    return Polynomial(new_g, terms)


def multidegree_of(p: Polynomial) -> tuple[int, ...]:
    return p.multidegree()
