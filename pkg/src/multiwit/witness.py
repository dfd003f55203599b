"""Witness sets and witness collections over grouped variables.

A witness collection pairs a polynomial system F with a coherent slice
bank: per group i a fixed sequence of generic affine forms, of which a
selection L^e takes the first e_i per group.  The e-witness point set is
the finite intersection of the variety with V(L^e).  This module holds
the collection data structures plus the slice transformations: exact
slicing bookkeeping, refinement and coarsening homotopies, slice
motion, Segre degree, and the multiprojective membership test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import Polynomial, PolySystem, VariableGrouping
from .sysio import RandomSource
from .startsys import residual_ok, solve_zero_dim, square_up
from .tracker import (
    Homotopy,
    NonconvergenceError,
    SingularJacobianError,
    TrackOptions,
    TrackingError,
    dedupe_points,
    newton_refine,
    points_equal,
    track_many,
)


class IndeterminateError(TrackingError):
    """A query could not be decided because paths failed (never silent false)."""


def random_affine_form(
    grouping: VariableGrouping,
    variables: Sequence[int],
    rs: RandomSource,
    through: np.ndarray | None = None,
) -> Polynomial:
    """A random affine form in the given variables; if `through` is set the
    constant is adjusted so the form vanishes there."""
    coeffs = [rs.gaussian_complex() for _ in variables]
    if through is None:
        const = rs.gaussian_complex()
    else:
        through = np.asarray(through, dtype=complex)
        const = -sum(c * through[v] for c, v in zip(coeffs, variables))
    return Polynomial.affine(grouping, coeffs, const, variables)


class SliceBank:
    """Per group i, affine forms l_{i,1..n_i}; selections take prefixes."""

    def __init__(self, grouping: VariableGrouping, forms: Sequence[Sequence[Polynomial]]):
        self.grouping = grouping
        self.forms = tuple(tuple(fs) for fs in forms)
        if len(self.forms) != grouping.k:
            raise ValueError("bank needs one form list per group")

    @classmethod
    def generate(
        cls,
        grouping: VariableGrouping,
        rs: RandomSource,
        through: np.ndarray | None = None,
    ) -> "SliceBank":
        forms = []
        for i, block in enumerate(grouping.blocks):
            sub = rs.substream(100 + i)
            forms.append(
                [random_affine_form(grouping, block, sub, through) for _ in block]
            )
        return cls(grouping, forms)

    def selection(self, e: Sequence[int]) -> "SliceSelection":
        e = tuple(int(x) for x in e)
        if len(e) != self.grouping.k:
            raise ValueError(f"key {e} has arity {len(e)}, expected {self.grouping.k}")
        per_group = []
        for i, ei in enumerate(e):
            if ei > len(self.forms[i]):
                raise ValueError(f"group {i} has only {len(self.forms[i])} bank forms")
            per_group.append(tuple(self.forms[i][:ei]))
        return SliceSelection(e, tuple(per_group))

    def drop_first(self, group: int) -> "SliceBank":
        forms = [list(fs) for fs in self.forms]
        if not forms[group]:
            raise ValueError(f"group {group} has no bank forms left")
        forms[group] = forms[group][1:]
        return SliceBank(self.grouping, forms)


@dataclass(frozen=True)
class SliceSelection:
    """L^e: the first e_i bank forms per group (or ad-hoc forms after motion)."""

    e: tuple[int, ...] | None
    per_group: tuple[tuple[Polynomial, ...], ...]

    @classmethod
    def ad_hoc(cls, forms: Sequence[Polynomial]) -> "SliceSelection":
        return cls(None, (tuple(forms),))

    @property
    def forms(self) -> list[Polynomial]:
        return [f for fs in self.per_group for f in fs]

    def counts(self) -> tuple[int, ...]:
        return tuple(len(fs) for fs in self.per_group)

    def replace_forms(self, new_forms: Sequence[Polynomial]) -> "SliceSelection":
        new_forms = list(new_forms)
        if len(new_forms) != len(self.forms):
            raise ValueError("replacement must keep the per-group form counts")
        out = []
        pos = 0
        for fs in self.per_group:
            out.append(tuple(new_forms[pos:pos + len(fs)]))
            pos += len(fs)
        return SliceSelection(self.e, tuple(out))


class WitnessSet:
    """(F, L, points): a variety cut to finitely many generic points.

    sq_core holds a square-up of F sized so that core + extra + slices is
    a square system (what the tracker needs); extra holds slice forms that
    have been promoted into the system by exact slicing.
    """

    def __init__(
        self,
        system: PolySystem,
        sq_core: PolySystem,
        selection: SliceSelection,
        points: Sequence[np.ndarray],
        grouping: VariableGrouping | None = None,
        extra: Sequence[Polynomial] = (),
    ):
        self.system = system
        self.sq_core = sq_core
        self.selection = selection
        self.points = [np.asarray(p, dtype=complex) for p in points]
        self.grouping = grouping or system.grouping
        self.extra = tuple(extra)
        n = system.grouping.nvars
        rows = len(sq_core) + len(self.extra) + len(selection.forms)
        if rows != n:
            raise ValueError(f"core+extra+slices = {rows} rows, expected {n}")

    @property
    def fixed_block(self) -> PolySystem:
        return self.sq_core.concat(list(self.extra)) if self.extra else self.sq_core

    def full_square_system(self) -> PolySystem:
        return self.fixed_block.concat(self.selection.forms)

    def verify(self, tol: float = 1e-8) -> bool:
        full = self.system.concat(list(self.extra) + self.selection.forms)
        return all(residual_ok(full, p, tol) for p in self.points)

    def __len__(self) -> int:
        return len(self.points)


class WitnessCollection:
    """Map e -> e-witness set, all sharing one system and slice bank."""

    def __init__(self, system: PolySystem, bank: SliceBank,
                 entries: dict, grouping: VariableGrouping | None = None,
                 extra: Sequence[Polynomial] = ()):
        self.system = system
        self.bank = bank
        self.entries = dict(entries)
        self.grouping = grouping or bank.grouping
        self.extra = tuple(extra)
        sizes = {sum(e) for e in self.entries}
        if len(sizes) > 1:
            raise ValueError(f"mixed slice dimensions in one collection: {sorted(sizes)}")

    def multidegree_map(self) -> dict[tuple[int, ...], int]:
        return {e: len(ws) for e, ws in sorted(self.entries.items()) if len(ws) > 0}

    @property
    def dim(self) -> int:
        return sum(next(iter(self.entries)))


def compute_witness_collection(
    F: PolySystem,
    candidates: Sequence[Sequence[int]],
    rs: RandomSource,
    opts: TrackOptions = TrackOptions(),
    bank: SliceBank | None = None,
) -> WitnessCollection:
    """Solve F against L^e for every candidate e (all of equal |e|)."""
    g = F.grouping
    candidates = [tuple(int(x) for x in e) for e in candidates]
    if not candidates:
        raise ValueError("no candidate multi-indices supplied")
    dims = {sum(e) for e in candidates}
    if len(dims) > 1:
        raise ValueError(f"candidates must share |e|; got {sorted(dims)}")
    d = dims.pop()
    if bank is None:
        bank = SliceBank.generate(g, rs.substream(11))
    core = square_up(F, g.nvars - d, rs.substream(12))
    entries = {}
    for idx, e in enumerate(sorted(candidates)):
        sel = bank.selection(e)
        pts = solve_zero_dim(F, sel.forms, rs.substream(13 + idx), opts)
        if pts:
            entries[e] = WitnessSet(F, core, sel, pts)
    if not entries:
        raise TrackingError("no candidate slice met the variety; empty collection")
    return WitnessCollection(F, bank, entries)


def slice_collection(wc: WitnessCollection, group: int) -> WitnessCollection:
    """Exact bookkeeping: move l_{group,1} into the system, shift keys by
    -eps_group, reuse every point verbatim.  No path is tracked."""
    if all(e[group] == 0 for e in wc.entries):
        raise ValueError(
            f"slicing group {group} empties the variety (all keys have e_{group} = 0)"
        )
    moved = wc.bank.forms[group][0].with_grouping(wc.system.grouping)
    new_bank = wc.bank.drop_first(group)
    entries = {}
    for e, ws in wc.entries.items():
        if e[group] == 0:
            continue
        ne = tuple(x - (1 if i == group else 0) for i, x in enumerate(e))
        per_group = list(ws.selection.per_group)
        per_group[group] = per_group[group][1:]
        entries[ne] = WitnessSet(
            ws.system,
            ws.sq_core,
            SliceSelection(ne, tuple(per_group)),
            ws.points,
            grouping=ws.grouping,
            extra=ws.extra + (moved,),
        )
    return WitnessCollection(
        wc.system, new_bank, entries, grouping=wc.grouping, extra=wc.extra + (moved,)
    )


def move_slice(
    ws: WitnessSet,
    new_forms: Sequence[Polynomial],
    opts: TrackOptions = TrackOptions(),
    gamma: complex = 1.0,
) -> WitnessSet:
    """Track the points as the slice forms move along a convex combination."""
    old = ws.selection.forms
    new_forms = [f.with_grouping(ws.system.grouping) for f in new_forms]
    if len(new_forms) != len(old):
        raise ValueError(f"{len(new_forms)} new forms for {len(old)} slice rows")
    if not old:
        return WitnessSet(ws.system, ws.sq_core, ws.selection, ws.points,
                          grouping=ws.grouping, extra=ws.extra)
    h = Homotopy(
        PolySystem(old), PolySystem(new_forms), gamma=gamma, fixed=ws.fixed_block
    )
    results = track_many(h, ws.points, opts)
    pts = [r.endpoint for r in results if r.converged]
    return WitnessSet(
        ws.system,
        ws.sq_core,
        ws.selection.replace_forms(new_forms),
        dedupe_points(pts),
        grouping=ws.grouping,
        extra=ws.extra,
    )


def refine(
    ws: WitnessSet,
    split: tuple[int, int],
    target_e: Sequence[int],
    rs: RandomSource,
    opts: TrackOptions = TrackOptions(),
) -> WitnessSet:
    """Transform a witness set when one group splits into two.

    split = (group, size of the first part); target_e is the key on the
    refined grouping.  Only the split group's slice forms move; paths that
    leave the affine patch diverge and are dropped.
    """
    group, first_size = split
    g = ws.grouping
    block = g.blocks[group]
    if not 0 < first_size < len(block):
        raise ValueError("first part must be a proper nonempty subpart of the group")
    new_g = g.split(group, block[:first_size])
    target_e = tuple(int(x) for x in target_e)
    if len(target_e) != new_g.k:
        raise ValueError(f"target key arity {len(target_e)}, expected {new_g.k}")
    e = ws.selection.counts()
    ok = (
        target_e[:group] == e[:group]
        and target_e[group] + target_e[group + 1] == e[group]
        and target_e[group + 2:] == e[group + 1:]
    )
    if not ok:
        raise ValueError(f"target key {target_e} incompatible with source key {e}")

    new_first = [
        random_affine_form(ws.system.grouping, new_g.blocks[group], rs.substream(21 + i))
        for i in range(target_e[group])
    ]
    new_second = [
        random_affine_form(ws.system.grouping, new_g.blocks[group + 1], rs.substream(51 + i))
        for i in range(target_e[group + 1])
    ]
    per_group = list(ws.selection.per_group)
    moving_old = list(per_group[group])
    others = [f for i, fs in enumerate(per_group) if i != group for f in fs]
    moving_new = new_first + new_second
    fixed = ws.fixed_block.concat(others) if others else ws.fixed_block
    h = Homotopy(
        PolySystem(moving_old),
        PolySystem(moving_new),
        gamma=rs.substream(99).unit_complex(),
        fixed=fixed,
    )
    results = track_many(h, ws.points, opts)
    pts = dedupe_points([r.endpoint for r in results if r.converged])
    new_per_group = (
        tuple(per_group[:group])
        + (tuple(new_first), tuple(new_second))
        + tuple(per_group[group + 1:])
    )
    return WitnessSet(
        ws.system,
        ws.sq_core,
        SliceSelection(target_e, new_per_group),
        pts,
        grouping=new_g,
        extra=ws.extra,
    )


@dataclass
class CoarsenResult:
    witness: WitnessSet
    delta: int  # start paths tracked (Segre-formula count)
    converged: int
    diverged: int
    grouping: VariableGrouping = field(default=None)


def coarsen(
    wc: WitnessCollection,
    merge: tuple[int, int],
    target_e: Sequence[int],
    rs: RandomSource,
    opts: TrackOptions = TrackOptions(),
    target_forms: Sequence[Polynomial] | None = None,
) -> CoarsenResult:
    """Transform witness data when two groups merge into one.

    Builds, for every split S|T of the merged slice budget e, the start
    set W_{S,T} by slice motion from the matching collection entry, then
    tracks all delta = sum binom(e,|S|) Deg(|S|,|T|,...) paths of the
    homotopy whose moving block interpolates the bilinear products
    l10_i * l01_i toward the target affine forms l_i.
    """
    a, b = sorted(merge)
    g = wc.grouping
    new_g = g.merge(a, b)
    target_e = tuple(int(x) for x in target_e)
    if len(target_e) != new_g.k:
        raise ValueError(f"target key arity {len(target_e)}, expected {new_g.k}")
    e = target_e[a]
    # map a new-grouping key back to the old-grouping key template
    old_groups = [i for i in range(g.k) if i != b]

    def old_key(s: int, t: int) -> tuple[int, ...]:
        key = [0] * g.k
        for new_i, old_i in enumerate(old_groups):
            key[old_i] = target_e[new_i]
        key[a] = s
        key[b] = t
        return tuple(key)

    # all polynomials inside one witness set share the system's grouping
    base_g = wc.system.grouping
    merged_vars = new_g.blocks[a]
    sub = rs.substream(7)
    l10 = [random_affine_form(base_g, g.blocks[a], sub.substream(i)) for i in range(e)]
    l01 = [random_affine_form(base_g, g.blocks[b], sub.substream(50 + i)) for i in range(e)]
    if target_forms is None:
        target_forms = [
            random_affine_form(base_g, merged_vars, sub.substream(100 + i))
            for i in range(e)
        ]
    else:
        target_forms = [f.with_grouping(base_g) for f in target_forms]
        if len(target_forms) != e:
            raise ValueError(f"need {e} target forms, got {len(target_forms)}")

    # Assemble the start points W_{S,T} and remember the shared rest forms.
    starts: list[np.ndarray] = []
    delta = 0
    rest_sel: SliceSelection | None = None
    core = None
    some_entry = None
    for s in range(e + 1):
        t = e - s
        key = old_key(s, t)
        ws = wc.entries.get(key)
        if ws is None or not ws.points:
            continue
        some_entry = ws
        core = ws.sq_core
        for S in _subsets(range(e), s):
            Sset = set(S)
            forms_a = [l10[i] for i in range(e) if i in Sset]
            forms_b = [l01[i] for i in range(e) if i not in Sset]
            per_group = list(ws.selection.per_group)
            new_per = [
                tuple(forms_a) if i == a else tuple(forms_b) if i == b else fs
                for i, fs in enumerate(per_group)
            ]
            flat = [f for fs in new_per for f in fs]
            moved = move_slice(ws, flat, opts, gamma=sub.substream(999 + s).unit_complex())
            if len(moved.points) != len(ws.points):
                raise TrackingError(
                    f"building W_(S,T) for key {key} lost "
                    f"{len(ws.points) - len(moved.points)} points"
                )
            starts.extend(moved.points)
            delta += len(moved.points)
            if rest_sel is None:
                rest_sel = moved.selection
    if some_entry is None:
        raise ValueError(f"no collection entry matches any split of target {target_e}")

    rest_forms = [
        f
        for i, fs in enumerate(rest_sel.per_group)
        if i not in (a, b)
        for f in fs
    ]
    new_per_group = []
    for new_i, old_i in enumerate(old_groups):
        if old_i == a:
            new_per_group.append(tuple(target_forms))
        else:
            new_per_group.append(rest_sel.per_group[old_i])
    new_sel = SliceSelection(target_e, tuple(new_per_group))

    if e == 0:
        ws0 = wc.entries.get(old_key(0, 0))
        if ws0 is None:
            raise ValueError(f"no collection entry matches target {target_e}")
        return CoarsenResult(
            WitnessSet(ws0.system, ws0.sq_core, new_sel, ws0.points,
                       grouping=new_g, extra=ws0.extra),
            delta=len(ws0.points), converged=len(ws0.points), diverged=0,
            grouping=new_g,
        )

    products = [l10[i] * l01[i] for i in range(e)]
    fixed = core.concat(list(some_entry.extra) + rest_forms)
    h = Homotopy(
        PolySystem(products),
        PolySystem(target_forms),
        gamma=sub.substream(1234).unit_complex(),
        fixed=fixed,
    )
    results = track_many(h, starts, opts)
    pts = []
    n_conv = 0
    for r in results:
        if r.converged:
            n_conv += 1
            pts.append(r.endpoint)
        elif r.status == "failed":
            raise TrackingError("coarsening path failed (neither converged nor diverged)")
    pts = dedupe_points(pts)
    out = WitnessSet(
        some_entry.system, core, new_sel, pts, grouping=new_g, extra=some_entry.extra
    )
    return CoarsenResult(out, delta=delta, converged=n_conv,
                         diverged=delta - n_conv, grouping=new_g)


def coarsen_collection(
    wc: WitnessCollection,
    merge: tuple[int, int],
    rs: RandomSource,
    opts: TrackOptions = TrackOptions(),
) -> tuple[WitnessCollection, list[CoarsenResult]]:
    """Coarsen every reachable key, sharing one coherent bank for the
    merged group so the result is a proper witness collection."""
    a, b = sorted(merge)
    g = wc.grouping
    new_g = g.merge(a, b)
    merged_block = new_g.blocks[a]
    bank_sub = rs.substream(17)
    merged_forms = [
        random_affine_form(g, merged_block, bank_sub.substream(i))
        for i in range(len(merged_block))
    ]
    old_groups = [i for i in range(g.k) if i != b]
    new_keys = sorted(
        {
            tuple(
                (key[a] + key[b]) if oi == a else key[oi] for oi in old_groups
            )
            for key in wc.entries
        }
    )
    new_bank_forms = []
    for new_i, old_i in enumerate(old_groups):
        if old_i == a:
            new_bank_forms.append(merged_forms)
        else:
            new_bank_forms.append([f.with_grouping(g) for f in wc.bank.forms[old_i]])
    new_bank = SliceBank(new_g, [
        [f.with_grouping(new_g) for f in fs] for fs in new_bank_forms
    ])
    entries = {}
    stats = []
    for key in new_keys:
        res = coarsen(
            wc, (a, b), key, rs.substream(hash(key) % 10000 + 1), opts,
            target_forms=[f.with_grouping(g) for f in merged_forms[: key[a]]],
        )
        stats.append(res)
        if res.witness.points:
            entries[key] = res.witness
    return WitnessCollection(wc.system, new_bank, entries, grouping=new_g,
                             extra=wc.extra), stats


def _subsets(items, size: int):
    import itertools

    return itertools.combinations(items, size)


def segre_degree(md: dict) -> int:
    """Degree under the Segre embedding: sum of multinomial(d; e) * Deg(e)."""
    keys = list(md)
    if not keys:
        raise ValueError("empty multidegree map")
    dims = {sum(e) for e in keys}
    if len(dims) > 1:
        raise ValueError(f"mixed |e| in multidegree map: {sorted(dims)}")
    d = dims.pop()
    total = 0
    for e, v in md.items():
        coef = math.factorial(d)
        for x in e:
            coef //= math.factorial(x)
        total += coef * v
    return total


def membership(
    wc: WitnessCollection,
    point,
    opts: TrackOptions = TrackOptions(),
    rs: RandomSource | None = None,
) -> bool:
    """Multiprojective membership: per key e, move L^e to forms vanishing
    at the query point and look for it among the endpoints."""
    point = np.asarray(point, dtype=complex)
    g = wc.grouping
    if point.size != g.nvars:
        raise ValueError(f"point has {point.size} coordinates, expected {g.nvars}")
    if rs is None:
        rs = RandomSource(stream=4242)
    # the query must already satisfy the sliced-away part of the system
    if wc.extra:
        probe = PolySystem(list(wc.extra))
        if not residual_ok(probe, point, 1e-6):
            return False
    for idx, (e, ws) in enumerate(sorted(wc.entries.items())):
        sub = rs.substream(idx)
        if not ws.selection.forms:
            # zero-dimensional entry: nothing moves, compare directly
            if any(points_equal(p, point) for p in ws.points):
                return True
            continue
        new_forms = []
        for i, fs in enumerate(ws.selection.per_group):
            for j in range(len(fs)):
                new_forms.append(
                    random_affine_form(g, g.blocks[i], sub.substream(10 * i + j), through=point)
                )
        h = Homotopy(
            PolySystem(ws.selection.forms),
            PolySystem(new_forms),
            gamma=sub.substream(77).unit_complex(),
            fixed=ws.fixed_block,
        )
        results = track_many(h, ws.points, opts)
        if any(r.status == "failed" for r in results):
            raise IndeterminateError(
                f"membership tracking failed on key {e}; answer indeterminate"
            )
        for r in results:
            if r.converged and points_equal(r.endpoint, point):
                return True
    return False
