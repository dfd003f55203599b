"""Numerical irreducible decomposition for multiaffine varieties.

The equidimensional affine routine is monodromy breakup plus the trace
test.  The multiprojective sorting loop reduces the component through
each sample point to an irreducible affine curve — slice away as much
dimension as the polytope allows, then cut with mixed-group forms whose
group supports grow along an ordering compatible with the projected
dimensions — and derives a membership test by moving the curve's linear
system from the sample point to the query point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import Polynomial, PolySystem
from .dimension import (
    DimensionProfile,
    dimension_polytope,
    equidim_partition,
    polytope_proj_dim,
    slice_polytope,
)
from .monodromy import breakup, grow_witness_set
from .sysio import RandomSource
from .startsys import square_up
from .tracker import (
    Homotopy,
    TrackOptions,
    TrackingError,
    points_equal,
    track_many,
)
from .witness import (
    IndeterminateError,
    SliceSelection,
    WitnessCollection,
    WitnessSet,
    membership,
    random_affine_form,
)


def nid_curve_affine(
    F: PolySystem,
    ws: WitnessSet,
    rs: RandomSource,
    opts: TrackOptions = TrackOptions(),
):
    """Equidimensional affine NID: monodromy breakup with trace certificates.

    Returns the MonodromyState; its partition lists index the input points."""
    return breakup(ws, rs, opts)


def compute_slice_vector(polytope) -> tuple[tuple[int, ...], frozenset]:
    """The coordinatewise-maximal m with X cap V(L^m) still irreducible.

    Slicing group i preserves irreducibility while the projection to
    factor i has dimension >= 2; on the polytope that reads off as
    max_e e_i >= 2.  Group order does not matter (unit slices commute)."""
    current = frozenset(polytope)
    k = len(next(iter(current)))
    m = [0] * k
    for i in range(k):
        while polytope_proj_dim(current, [i]) >= 2:
            current = slice_polytope(current, i)
            m[i] += 1
    return tuple(m), current


def order_support(e: tuple[int, ...], sliced_polytope) -> list[int]:
    """Order supp(e) so prefix projections have dim exactly 1, 2, 3, ...

    Dimensions are read off the sliced polytope (max coordinate sums)."""
    support = [i for i, x in enumerate(e) if x > 0]

    def backtrack(prefix: list, rest: list) -> list | None:
        if not rest:
            return prefix
        j = len(prefix) + 1
        for idx, cand in enumerate(rest):
            if polytope_proj_dim(sliced_polytope, prefix + [cand]) == j:
                out = backtrack(prefix + [cand], rest[:idx] + rest[idx + 1:])
                if out is not None:
                    return out
        return None

    ordered = backtrack([], support)
    if ordered is None:
        raise TrackingError(f"no admissible ordering of the support of {e}")
    return ordered


@dataclass
class ComponentRecord:
    profile: DimensionProfile
    polytope: frozenset
    m: tuple[int, ...]
    e: tuple[int, ...]
    I_order: list[int]
    L: list[Polynomial]  # slice-away forms + the mixed-group curve cuts, all through p
    curve_witness: WitnessSet
    representative: np.ndarray
    certified: bool

    @property
    def curve_degree(self) -> int:
        return len(self.curve_witness.points)

    def to_summary(self) -> dict:
        return {
            "dim": self.profile.total_dim,
            "polytope": sorted(self.polytope),
            "m": list(self.m),
            "e": list(self.e),
            "I_order": list(self.I_order),
            "curve_degree": self.curve_degree,
            "certified": self.certified,
        }


@dataclass
class Decomposition:
    components: list
    assignment: dict  # input point index -> component index
    diagnostics: list = field(default_factory=list)


def build_component(
    F: PolySystem,
    p: np.ndarray,
    profile: DimensionProfile,
    rs: RandomSource,
    opts: TrackOptions = TrackOptions(),
) -> ComponentRecord:
    """Reduce the component through p to a certified irreducible affine curve."""
    g = F.grouping
    p = np.asarray(p, dtype=complex)
    polytope = dimension_polytope(profile, g.sizes)
    m, sliced = compute_slice_vector(polytope)
    e = min(sliced)  # lexicographically smallest {0,1}-vector
    if sum(m) + sum(e) != profile.total_dim:
        raise TrackingError(
            f"slice bookkeeping broke: |m|+|e| = {sum(m) + sum(e)} "
            f"but dim = {profile.total_dim}"
        )
    I_order = order_support(e, sliced)

    # Slice-away forms: m_i general forms per group, all vanishing at p.
    L: list[Polynomial] = []
    sub = rs.substream(61)
    for i in range(g.k):
        for j in range(m[i]):
            L.append(random_affine_form(g, g.blocks[i], sub.substream(10 * i + j), through=p))
    # Mixed-group cuts: l_j general in the groups i_1..i_{j+1}, through p.
    for j in range(1, len(I_order)):
        vars_j = [v for i in I_order[: j + 1] for v in g.blocks[i]]
        L.append(random_affine_form(g, vars_j, sub.substream(500 + j), through=p))

    # One more generic form through p completes a witness of the curve C_L.
    ell0 = random_affine_form(g, list(range(g.nvars)), sub.substream(999), through=p)
    core = square_up(F, g.nvars - len(L) - 1, rs.substream(62))
    selection = SliceSelection.ad_hoc(L + [ell0])
    ws = WitnessSet(F, core, selection, [p])
    grown, stable = grow_witness_set(ws, rs.substream(63), opts)
    return ComponentRecord(
        profile=profile,
        polytope=polytope,
        m=m,
        e=e,
        I_order=I_order,
        L=L,
        curve_witness=grown,
        representative=p,
        certified=stable,
    )


def component_membership(
    rec: ComponentRecord,
    q,
    opts: TrackOptions = TrackOptions(),
    gamma: complex = 1.0,
) -> bool:
    """Move the curve's linear system from vanishing at p to vanishing at q
    and look for q among the tracked endpoints."""
    q = np.asarray(q, dtype=complex)
    ws = rec.curve_witness
    old_forms = ws.selection.forms
    new_forms = []
    for form in old_forms:
        value = complex(form.evaluate(q))
        new_forms.append(form - value)
    h = Homotopy(
        PolySystem(old_forms), PolySystem(new_forms), gamma=gamma, fixed=ws.fixed_block
    )
    results = track_many(h, ws.points, opts)
    if any(r.status == "failed" for r in results):
        raise IndeterminateError("membership homotopy failed; answer indeterminate")
    return any(r.converged and points_equal(r.endpoint, q) for r in results)


def nid_multi(
    F: PolySystem,
    W,
    rs: RandomSource,
    opts: TrackOptions = TrackOptions(),
    rel_tol: float = 1e-8,
) -> Decomposition:
    """Sort general smooth points of V(F) into irreducible components."""
    W = [np.asarray(p, dtype=complex) for p in W]
    classes = equidim_partition(F, W, rel_tol)
    index_of = {id(p): i for i, p in enumerate(W)}
    components: list[ComponentRecord] = []
    assignment: dict = {}
    diagnostics: list = []
    comp_counter = 0
    for cls_idx, (profile, pts) in enumerate(classes):
        remaining = list(pts)
        while remaining:
            p = remaining[0]
            rec = build_component(
                F, p, profile, rs.substream(7000 + 13 * comp_counter), opts
            )
            members = [p]
            rest = []
            for q in remaining[1:]:
                try:
                    if component_membership(rec, q, opts,
                                            gamma=rs.substream(comp_counter * 31 + 5).unit_complex()):
                        members.append(q)
                    else:
                        rest.append(q)
                except IndeterminateError as exc:
                    diagnostics.append(f"point left unassigned: {exc}")
                    rest.append(q)
            components.append(rec)
            for q in members:
                assignment[index_of[id(q)]] = comp_counter
            comp_counter += 1
            remaining = rest
    return Decomposition(components, assignment, diagnostics)


def membership_product(
    wc: WitnessCollection,
    point,
    partition,
    opts: TrackOptions = TrackOptions(),
    rs: RandomSource | None = None,
):
    """Membership in a Cartesian product, tested factor by factor.

    partition: blocks of group indices (from product_factorization).
    Returns (combined, per-factor booleans)."""
    if rs is None:
        rs = RandomSource(stream=11011)
    point = np.asarray(point, dtype=complex)
    g = wc.grouping
    anchor_key = sorted(wc.entries)[0]
    anchor = wc.entries[anchor_key].points[0]

    per_factor = []
    for bi, block in enumerate(partition):
        factor_wc = _restrict_to_factor(wc, tuple(block), anchor)
        factor_point = _project_point(g, point, tuple(block))
        per_factor.append(
            membership(factor_wc, factor_point, opts, rs=rs.substream(900 + bi))
        )
    return all(per_factor), tuple(per_factor)


def _project_point(grouping, point: np.ndarray, block) -> np.ndarray:
    keep = [v for i in block for v in grouping.blocks[i]]
    return point[sorted(keep)]


def _restrict_poly(poly: Polynomial, keep: list[int], values: np.ndarray,
                   new_grouping) -> Polynomial:
    """Substitute fixed values for the dropped variables."""
    pos = {v: j for j, v in enumerate(keep)}
    terms: dict = {}
    for exps, c in poly.terms.items():
        coeff = c
        ne = [0] * len(keep)
        for v, d in enumerate(exps):
            if d == 0:
                continue
            if v in pos:
                ne[pos[v]] = d
            else:
                coeff *= values[v] ** d
        key = tuple(ne)
        terms[key] = terms.get(key, 0.0) + coeff
    return Polynomial(new_grouping, terms)


def _restrict_to_factor(wc: WitnessCollection, block, anchor: np.ndarray) -> WitnessCollection:
    """The factor's witness collection: pin the other groups' coordinates to
    a stored witness point and project points, slices, and keys."""
    from .algebra import VariableGrouping
    from .startsys import square_up as _square_up
    from .witness import SliceBank

    g = wc.grouping
    keep = sorted(v for i in block for v in g.blocks[i])
    old_blocks = [g.blocks[i] for i in block]
    remap = {v: j for j, v in enumerate(keep)}
    new_g = VariableGrouping(
        [[remap[v] for v in b] for b in old_blocks],
        [g.names[v] for v in keep],
    )
    sys_polys = [
        _restrict_poly(p, keep, anchor, new_g) for p in wc.system.polys
    ]
    sys_polys = [p for p in sys_polys if p.terms] or [Polynomial.constant(new_g, 0.0)]
    new_F = PolySystem(sys_polys)

    bank_forms = [
        [_restrict_poly(f, keep, anchor, new_g) for f in wc.bank.forms[i]]
        for i in block
    ]
    new_bank = SliceBank(new_g, bank_forms)

    entries = {}
    seen_sub = set()
    for e, ws in sorted(wc.entries.items()):
        sub_e = tuple(e[i] for i in block)
        if sub_e in seen_sub:
            continue
        seen_sub.add(sub_e)
        pts = []
        for p in ws.points:
            proj = p[keep]
            if not any(points_equal(proj, q) for q in pts):
                pts.append(proj)
        sel = new_bank.selection(sub_e)
        core = _square_up(new_F, new_g.nvars - sum(sub_e), RandomSource(stream=31337))
        entries[sub_e] = WitnessSet(new_F, core, sel, pts, grouping=new_g)
    return WitnessCollection(new_F, new_bank, entries, grouping=new_g)
