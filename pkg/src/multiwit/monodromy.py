"""Monodromy loops on witness point sets.

Moving the slice around a loop permutes the witness points; orbits stay
inside single irreducible components.  This gives three tools: growing a
partial witness point set from a seed, partitioning a complete witness
set into putative components, and (for affine curves) the linear trace
test that certifies a part is complete.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import Polynomial, PolySystem
from .dimension import dimension_polytope, local_multidimension
from .sysio import RandomSource
from .startsys import residual_ok, square_up
from .tracker import (
    Homotopy,
    NonconvergenceError,
    SingularJacobianError,
    TrackOptions,
    TrackingError,
    newton_refine,
    points_equal,
    track_many,
)
from .witness import (
    IndeterminateError,
    SliceBank,
    SliceSelection,
    WitnessCollection,
    WitnessSet,
    random_affine_form,
)

TRACE_TOL = 1e-6
QUIET_LOOPS = 5
MAX_LOOPS = 60


class MatchAmbiguityError(TrackingError):
    """Two loop endpoints landed within matching tolerance of one start point."""


@dataclass
class LoopSpec:
    """Two intermediate slice systems; the loop runs L -> L' -> L'' -> L."""

    forms1: list[Polynomial]
    forms2: list[Polynomial]
    gammas: tuple[complex, complex, complex] = (1.0, 1.0, 1.0)


def random_loop(ws: WitnessSet, rs: RandomSource) -> LoopSpec:
    """Generic intermediate slices matching the per-group form counts."""
    g = ws.grouping
    full_g = ws.system.grouping

    def forms_from(sub: RandomSource) -> list[Polynomial]:
        out = []
        for i, fs in enumerate(ws.selection.per_group):
            block = g.blocks[i] if ws.selection.e is not None else range(full_g.nvars)
            for j in range(len(fs)):
                out.append(random_affine_form(full_g, list(block), sub.substream(31 * i + j)))
        return out

    return LoopSpec(
        forms1=forms_from(rs.substream(1)),
        forms2=forms_from(rs.substream(2)),
        gammas=(
            rs.substream(3).unit_complex(),
            rs.substream(4).unit_complex(),
            rs.substream(5).unit_complex(),
        ),
    )


@dataclass
class MonodromyOutcome:
    permutation: dict  # matched start index -> start index of the endpoint
    new_points: list
    unmatched: list  # start indices whose path failed or lost its endpoint


def monodromy_permutation(
    ws: WitnessSet, loop: LoopSpec, opts: TrackOptions = TrackOptions()
) -> MonodromyOutcome:
    """Track every witness point around the loop and read off the permutation."""
    fixed = ws.fixed_block
    base = ws.selection.forms
    legs = [
        (base, loop.forms1, loop.gammas[0]),
        (loop.forms1, loop.forms2, loop.gammas[1]),
        (loop.forms2, base, loop.gammas[2]),
    ]
    current = {i: p for i, p in enumerate(ws.points)}
    for start_forms, target_forms, gamma in legs:
        h = Homotopy(PolySystem(start_forms), PolySystem(target_forms),
                     gamma=gamma, fixed=fixed)
        indices = sorted(current)
        results = track_many(h, [current[i] for i in indices], opts)
        nxt = {}
        for i, r in zip(indices, results):
            if r.converged:
                nxt[i] = r.endpoint
        current = nxt

    full = ws.full_square_system()
    refined = {}
    for i, p in current.items():
        try:
            refined[i] = newton_refine(full, p, tol=1e-10)
        except (SingularJacobianError, NonconvergenceError):
            pass

    perm: dict = {}
    new_points: list = []
    taken: dict = {}
    for i, endpoint in sorted(refined.items()):
        matches = [
            j for j, q in enumerate(ws.points) if points_equal(endpoint, q)
        ]
        if len(matches) > 1:
            raise MatchAmbiguityError(
                f"endpoint of path {i} matches {len(matches)} start points"
            )
        if matches:
            j = matches[0]
            if j in taken:
                raise MatchAmbiguityError(
                    f"paths {taken[j]} and {i} both landed on start point {j}"
                )
            taken[j] = i
            perm[i] = j
        else:
            if residual_ok(ws.system, endpoint) and not any(
                points_equal(endpoint, q) for q in new_points
            ):
                new_points.append(endpoint)
    unmatched = [i for i in range(len(ws.points)) if i not in perm]
    return MonodromyOutcome(perm, new_points, unmatched)


def trace_test(
    F: PolySystem,
    selection: SliceSelection,
    pencil_form: Polynomial,
    part: list,
    opts: TrackOptions = TrackOptions(),
    rs: RandomSource | None = None,
    sq_core: PolySystem | None = None,
    extra: tuple = (),
    trace_tol: float = TRACE_TOL,
) -> bool:
    """Linear trace: move one slice form along l + s*pencil and check the
    centroid of the part moves affinely in s.

    Only meaningful on affine-slice data (a single moving form); the
    multiprojective analogue is unsound and deliberately not offered.
    """
    if rs is None:
        rs = RandomSource(stream=808)
    part = [np.asarray(p, dtype=complex) for p in part]
    if not part:
        raise ValueError("empty part")
    forms = selection.forms
    if sq_core is None:
        n = F.grouping.nvars
        sq_core = square_up(F, n - len(forms) - len(extra), rs.substream(6))
    fixed = sq_core.concat(list(extra) + forms[1:]) if (extra or forms[1:]) else sq_core
    rotation = rs.substream(1).unit_complex()
    s_values = (0.5 * rotation, 1.0 * rotation)
    centroids = [np.mean(part, axis=0)]
    base = forms[0]
    for idx, s in enumerate(s_values):
        target = base + s * pencil_form
        # gamma = 1 keeps the slice motion affine in t, which the trace needs
        h = Homotopy(PolySystem([base]), PolySystem([target]), gamma=1.0, fixed=fixed)
        results = track_many(h, part, opts)
        if not all(r.converged for r in results):
            raise IndeterminateError("trace test path failed; result indeterminate")
        centroids.append(np.mean([r.endpoint for r in results], axis=0))
    v1 = (centroids[1] - centroids[0]) / s_values[0]
    v2 = (centroids[2] - centroids[0]) / s_values[1]
    scale = max(1.0, float(np.linalg.norm(v1)), float(np.linalg.norm(v2)))
    return bool(np.linalg.norm(v1 - v2) < trace_tol * scale)


def _trace_applicable(ws: WitnessSet) -> bool:
    return len(ws.selection.forms) == 1


def _trace_certify(ws: WitnessSet, part_points: list, rs: RandomSource,
                   opts: TrackOptions) -> bool:
    g = ws.system.grouping
    sel = ws.selection
    if sel.e is None:
        # ad-hoc (curve) selection: move the final form, the generic one;
        # the earlier forms pin the curve and must stay where they are
        forms = sel.forms
        sel = SliceSelection.ad_hoc([forms[-1]] + forms[:-1])
    # a constant pencil translates the slice parallel to itself; the
    # centroid is affine in s only for parallel motion
    pencil = Polynomial.constant(g, rs.substream(9).unit_complex())
    return trace_test(
        ws.system, sel, pencil, part_points, opts,
        rs=rs.substream(10), sq_core=ws.sq_core, extra=ws.extra,
    )


@dataclass
class MonodromyState:
    points: list
    partition: list  # list of sorted index lists
    certified: list  # parallel booleans
    loops_run: int
    complete: bool = True


def breakup(
    ws: WitnessSet,
    rs: RandomSource,
    opts: TrackOptions = TrackOptions(),
    max_loops: int = MAX_LOOPS,
    quiet_loops: int = QUIET_LOOPS,
) -> MonodromyState:
    """Partition a complete witness point set by monodromy orbits, then
    certify parts with the trace test where it applies."""
    points = list(ws.points)
    parent = list(range(len(points)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[rj] = ri
            return True
        return False

    def current_partition() -> list:
        parts_map: dict = {}
        for i in range(len(points)):
            parts_map.setdefault(find(i), []).append(i)
        return sorted(parts_map.values())

    use_trace = _trace_applicable(ws)

    def certify(partition: list) -> list:
        out = []
        for pi, part in enumerate(partition):
            if use_trace:
                ok = _trace_certify(ws, [points[i] for i in part],
                                    rs.substream(5000 + pi), opts)
                out.append(bool(ok))
            else:
                out.append(False)
        return out

    loops = 0
    quiet = 0
    partition = current_partition()
    certified = certify(partition) if len(points) == 1 else []
    while loops < max_loops and not (certified and all(certified)):
        loop = random_loop(ws, rs.substream(1000 + loops))
        outcome = monodromy_permutation(ws, loop, opts)
        loops += 1
        merged = False
        for i, j in outcome.permutation.items():
            if union(i, j):
                merged = True
        if outcome.new_points:
            raise TrackingError(
                "breakup found new witness points; the input set was incomplete"
            )
        quiet = 0 if merged else quiet + 1
        if quiet >= quiet_loops:
            partition = current_partition()
            certified = certify(partition)
            if all(certified) or not use_trace:
                break
            # quiescent but uncertified: an orbit is still split across
            # parts, so keep looping for a merge the trace will accept
            quiet = 0

    partition = current_partition()
    if not certified or len(certified) != len(partition):
        certified = certify(partition)
    return MonodromyState(
        points=points,
        partition=partition,
        certified=certified,
        loops_run=loops,
        complete=all(certified) if use_trace else quiet >= quiet_loops,
    )


def grow_witness_set(
    ws: WitnessSet,
    rs: RandomSource,
    opts: TrackOptions = TrackOptions(),
    max_loops: int = MAX_LOOPS,
    quiet_loops: int = QUIET_LOOPS,
) -> tuple[WitnessSet, bool]:
    """Grow a partial witness point set by monodromy until quiescent.

    For affine-curve data the trace test replaces pure quiescence as the
    stopping rule.  Returns (witness set, stable flag)."""
    points = list(ws.points)
    loops = 0
    quiet = 0
    use_trace = _trace_applicable(ws)
    stable = False
    while loops < max_loops:
        current = WitnessSet(ws.system, ws.sq_core, ws.selection, points,
                             grouping=ws.grouping, extra=ws.extra)
        loop = random_loop(current, rs.substream(2000 + loops))
        try:
            outcome = monodromy_permutation(current, loop, opts)
        except MatchAmbiguityError:
            loops += 1
            continue
        loops += 1
        if outcome.new_points:
            points.extend(outcome.new_points)
            quiet = 0
            continue
        quiet += 1
        if use_trace and quiet >= 1:
            final = WitnessSet(ws.system, ws.sq_core, ws.selection, points,
                               grouping=ws.grouping, extra=ws.extra)
            try:
                if _trace_certify(final, points, rs.substream(3000 + loops), opts):
                    stable = True
                    break
            except IndeterminateError:
                pass
        if quiet >= quiet_loops:
            stable = not use_trace
            break
    return (
        WitnessSet(ws.system, ws.sq_core, ws.selection, points,
                   grouping=ws.grouping, extra=ws.extra),
        stable or (not use_trace and quiet >= quiet_loops),
    )


def complete_witness(
    F: PolySystem,
    seed_point,
    rs: RandomSource,
    opts: TrackOptions = TrackOptions(),
    rel_tol: float = 1e-8,
    max_loops: int = MAX_LOOPS,
    quiet_loops: int = QUIET_LOOPS,
) -> WitnessCollection:
    """Grow a full witness collection from one general smooth point.

    All bank forms vanish at the seed, so the seed is itself an e-witness
    point for every e in its component's dimension polytope; monodromy
    loops find the rest."""
    seed_point = np.asarray(seed_point, dtype=complex)
    g = F.grouping
    profile = local_multidimension(F, seed_point, rel_tol)
    polytope = dimension_polytope(profile, g.sizes)
    bank = SliceBank.generate(g, rs.substream(41), through=seed_point)
    core = square_up(F, g.nvars - profile.total_dim, rs.substream(42))
    entries = {}
    incomplete = []
    for idx, e in enumerate(sorted(polytope)):
        sel = bank.selection(e)
        ws = WitnessSet(F, core, sel, [seed_point])
        grown, stable = grow_witness_set(
            ws, rs.substream(43 + idx), opts, max_loops=max_loops, quiet_loops=quiet_loops
        )
        entries[e] = grown
        if not stable:
            incomplete.append(e)
    wc = WitnessCollection(F, bank, entries)
    wc.incomplete_keys = incomplete
    return wc
