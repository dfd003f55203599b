"""Command-line interface.

Wires parse -> compute -> serialize for each toolkit stage, with the
built-in example systems available via --fixture.  Exit codes: 0 on
success, 2 on input errors, 3 on numerical failures.  Output is JSON and
byte-identical for identical inputs and seed.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import fixtures as fixture_mod
from . import tracker as tracker_mod
from .algebra import Polynomial, PolySystem
from .dimension import (
    IllConditionedError,
    dimension_polytope,
    equidim_partition,
    product_factorization,
)
from .monodromy import breakup, trace_test
from .nid import nid_multi
from .startsys import complete_intersection_class
from .sysio import DEFAULT_SEED, ParseError, RandomSource, parse_system
from .tracker import TrackOptions, TrackingError
from .witness import (
    coarsen_collection,
    compute_witness_collection,
    membership,
    refine,
    segre_degree,
    slice_collection,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3

COMMANDS = (
    "witness", "dim", "slice", "refine", "coarsen", "member",
    "trace", "decompose", "segre", "class", "fixture",
)


class InputError(ValueError):
    pass


def _key_str(e) -> str:
    return "".join(str(int(x)) for x in e)


def _emit(obj, path: str | None) -> None:
    from .sysio import _encode

    text = _encode(obj) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_keys(text: str, k: int) -> list[tuple[int, ...]]:
    keys = []
    for part in text.replace(" ", ",").split(","):
        if not part:
            continue
        if len(part) != k or not part.isdigit():
            raise InputError(f"key {part!r} must be {k} digits")
        keys.append(tuple(int(c) for c in part))
    if not keys:
        raise InputError("no keys given")
    return keys


def _parse_point(text: str, nvars: int) -> np.ndarray:
    vals = [float(v) for v in text.replace(",", " ").split()]
    if len(vals) == nvars:
        return np.asarray(vals, dtype=complex)
    if len(vals) == 2 * nvars:
        arr = np.asarray(vals)
        return arr[0::2] + 1j * arr[1::2]
    raise InputError(
        f"point needs {nvars} reals or {2 * nvars} interleaved re/im values, got {len(vals)}"
    )


def _load_system(args):
    if args.fixture:
        try:
            fx = fixture_mod.get_fixture(args.fixture)
        except KeyError as exc:
            raise InputError(str(exc)) from None
        return fx.system, list(fx.default_keys), fx
    if args.input:
        try:
            with open(args.input) as fh:
                doc = parse_system(fh.read())
        except OSError as exc:
            raise InputError(f"cannot read {args.input}: {exc}") from None
        return doc.system, None, None
    raise InputError("need --fixture NAME or --input PATH")


def _options(args) -> TrackOptions:
    overrides = {}
    if args.tol_track is not None:
        overrides["newton_tol"] = args.tol_track
    if args.tol_rank is not None:
        overrides["rank_tol"] = args.tol_rank
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.tol_match is not None:
        tracker_mod.MATCH_TOL = args.tol_match
    return TrackOptions(**overrides)


def _witness_collection(args, opts):
    F, default_keys, fx = _load_system(args)
    if args.keys:
        keys = _parse_keys(args.keys, F.grouping.k)
    elif default_keys:
        keys = default_keys
    else:
        raise InputError("no --keys given and the input has no default keys")
    rs = RandomSource(seed=args.seed)
    return F, compute_witness_collection(F, keys, rs, opts), fx


def cmd_witness(args) -> dict:
    opts = _options(args)
    _, wc, _ = _witness_collection(args, opts)
    return {
        "dim": wc.dim,
        "degree_map": {_key_str(e): n for e, n in wc.multidegree_map().items()},
    }


def cmd_dim(args) -> dict:
    opts = _options(args)
    F, wc, _ = _witness_collection(args, opts)
    points = [p for _, ws in sorted(wc.entries.items()) for p in ws.points]
    rel_tol = args.tol_rank if args.tol_rank is not None else 1e-8
    classes = equidim_partition(F, points, rel_tol)
    rows = []
    for profile, pts in classes:
        polytope = dimension_polytope(profile, F.grouping.sizes)
        rows.append({
            "count": len(pts),
            "total_dim": profile.total_dim,
            "singleton_dims": [profile.dim([i]) for i in range(profile.k)],
            "polytope": sorted(_key_str(e) for e in polytope),
            "product_blocks": [list(b) for b in product_factorization(polytope)],
        })
    return {"classes": rows}


def cmd_slice(args) -> dict:
    opts = _options(args)
    _, wc, _ = _witness_collection(args, opts)
    sliced = slice_collection(wc, args.group)
    return {
        "group": args.group,
        "degree_map": {_key_str(e): n for e, n in sliced.multidegree_map().items()},
    }


def cmd_refine(args) -> dict:
    opts = _options(args)
    try:
        group_s, size_s = args.split.split(":")
        split = (int(group_s), int(size_s))
    except ValueError:
        raise InputError("--split must look like GROUP:FIRST_SIZE") from None
    F, wc, _ = _witness_collection(args, opts)
    group, first = split
    rs = RandomSource(seed=args.seed, stream=3)
    out = {}
    for e, ws in sorted(wc.entries.items()):
        budget = e[group]
        for left in range(budget + 1):
            target = e[:group] + (left, budget - left) + e[group + 1:]
            refined = refine(ws, split, target, rs.substream(hash((e, left)) % 9999), opts)
            if refined.points:
                out[_key_str(target)] = len(refined.points)
    return {"split": list(split), "degree_map": out}


def cmd_coarsen(args) -> dict:
    opts = _options(args)
    try:
        merges = [tuple(int(x) for x in m.split(":")) for m in args.merge.split(",")]
        if any(len(m) != 2 for m in merges):
            raise ValueError
    except ValueError:
        raise InputError("--merge must look like A:B[,A:B...] (group indices)") from None
    _, wc, _ = _witness_collection(args, opts)
    rs = RandomSource(seed=args.seed, stream=5)
    runs = []
    for mi, merge in enumerate(merges):
        wc, stats = coarsen_collection(wc, merge, rs.substream(mi), opts)
        runs.append({
            "merge": list(merge),
            "paths": [
                {"key": _key_str(s.witness.selection.e), "delta": s.delta,
                 "converged": s.converged, "diverged": s.diverged}
                for s in stats
            ],
        })
    return {
        "degree_map": {_key_str(e): n for e, n in wc.multidegree_map().items()},
        "runs": runs,
    }


def cmd_member(args) -> dict:
    opts = _options(args)
    F, wc, _ = _witness_collection(args, opts)
    if not args.point:
        raise InputError("member needs --point")
    point = _parse_point(args.point, F.grouping.nvars)
    rs = RandomSource(seed=args.seed, stream=7)
    return {"member": bool(membership(wc, point, opts, rs=rs))}


def cmd_trace(args) -> dict:
    opts = _options(args)
    F, wc, _ = _witness_collection(args, opts)
    key, ws = sorted(wc.entries.items())[0]
    if len(ws.selection.forms) != 1:
        raise InputError(
            "trace needs a one-form slice (an affine curve witness); "
            f"key {_key_str(key)} has {len(ws.selection.forms)} forms"
        )
    rs = RandomSource(seed=args.seed, stream=9)
    # constant pencil: translate the slice parallel to itself, which is
    # what makes the centroid affine in the pencil parameter
    pencil = Polynomial.constant(F.grouping, rs.substream(1).unit_complex())
    tol = args.tol_trace if args.tol_trace is not None else 1e-6
    ok = trace_test(F, ws.selection, pencil, ws.points, opts,
                    rs=rs.substream(2), sq_core=ws.sq_core, extra=ws.extra,
                    trace_tol=tol)
    return {"key": _key_str(key), "complete": bool(ok)}


def cmd_decompose(args) -> dict:
    opts = _options(args)
    F, wc, _ = _witness_collection(args, opts)
    points = [p for _, ws in sorted(wc.entries.items()) for p in ws.points]
    rs = RandomSource(seed=args.seed, stream=13)
    rel_tol = args.tol_rank if args.tol_rank is not None else 1e-8
    dec = nid_multi(F, points, rs, opts, rel_tol)
    comps = []
    for ci, rec in enumerate(dec.components):
        size = sum(1 for v in dec.assignment.values() if v == ci)
        summary = rec.to_summary()
        summary["polytope"] = [_key_str(e) for e in summary["polytope"]]
        summary["points"] = size
        comps.append(summary)
    return {
        "components": comps,
        "assignment": [dec.assignment.get(i, -1) for i in range(len(points))],
        "diagnostics": dec.diagnostics,
    }


def cmd_segre(args) -> dict:
    opts = _options(args)
    _, wc, _ = _witness_collection(args, opts)
    return {"segre_degree": segre_degree(wc.multidegree_map())}


def cmd_class(args) -> dict:
    if args.fixture:
        if args.fixture not in ("class-123",):
            raise InputError("class accepts --fixture class-123 or explicit --degrees/--nvec")
        data = fixture_mod.class_123()
        degrees, nvec = data["degrees"], data["nvec"]
    else:
        if not (args.degrees and args.nvec):
            raise InputError("class needs --degrees and --nvec (or --fixture class-123)")
        try:
            nvec = tuple(int(x) for x in args.nvec.split(","))
            degrees = [
                [int(x) for x in d.split(",")] for d in args.degrees.split(";")
            ]
        except ValueError:
            raise InputError("--nvec like 3,3,3 and --degrees like 1,2,3;1,2,3") from None
    cls = complete_intersection_class(degrees, nvec)
    out = {"class": {_key_str(e): c for e, c in sorted(cls.items())}}
    if args.group is not None:
        i = args.group
        sliced = {}
        for e, c in cls.items():
            if e[i] == 0:
                continue
            ne = tuple(x - (1 if j == i else 0) for j, x in enumerate(e))
            sliced[_key_str(ne)] = c
        out["sliced"] = dict(sorted(sliced.items()))
        out["sliced_group"] = i
    return out


_HANDLERS = {
    "witness": cmd_witness,
    "dim": cmd_dim,
    "slice": cmd_slice,
    "refine": cmd_refine,
    "coarsen": cmd_coarsen,
    "member": cmd_member,
    "trace": cmd_trace,
    "decompose": cmd_decompose,
    "segre": cmd_segre,
    "class": cmd_class,
}


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="multiwit",
        description="Witness collections and irreducible decomposition "
                    "for varieties with grouped variables.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--fixture", help="built-in example system")
        sp.add_argument("--input", help="system file in the input grammar")
        sp.add_argument("--keys", help="witness keys, e.g. 1100,1010")
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        sp.add_argument("--tol-rank", type=float, default=None)
        sp.add_argument("--tol-track", type=float, default=None)
        sp.add_argument("--tol-match", type=float, default=None)
        sp.add_argument("--tol-trace", type=float, default=None)
        sp.add_argument("--max-loops", type=int, default=None)
        sp.add_argument("--workers", type=int, default=None)
        sp.add_argument("--extended", action="store_true",
                        help="allow long-running extended fixtures")
        sp.add_argument("--output", help="write JSON here instead of stdout")
        return sp

    common(sub.add_parser("witness", help="compute a witness collection"))
    common(sub.add_parser("dim", help="dimension profiles of witness points"))
    sp = common(sub.add_parser("slice", help="witness collection of a slice"))
    sp.add_argument("--group", type=int, required=True)
    sp = common(sub.add_parser("refine", help="split one variable group"))
    sp.add_argument("--split", required=True, help="GROUP:FIRST_SIZE")
    sp = common(sub.add_parser("coarsen", help="merge variable groups"))
    sp.add_argument("--merge", required=True, help="A:B[,A:B...]")
    sp = common(sub.add_parser("member", help="membership test"))
    sp.add_argument("--point", help="coordinates (re or re,im interleaved)")
    common(sub.add_parser("trace", help="trace-test an affine curve witness"))
    common(sub.add_parser("decompose", help="numerical irreducible decomposition"))
    common(sub.add_parser("segre", help="degree under the Segre embedding"))
    sp = common(sub.add_parser("class", help="complete-intersection class"))
    sp.add_argument("--degrees", help="like 1,2,3;1,2,3")
    sp.add_argument("--nvec", help="like 3,3,3")
    sp.add_argument("--group", type=int, default=None,
                    help="also report the class after slicing this group")

    fp = sub.add_parser("fixture", help="run a command on a built-in fixture")
    fp.add_argument("name")
    fp.add_argument("action", choices=sorted(_HANDLERS))
    fp.add_argument("rest", nargs=argparse.REMAINDER)
    return p


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else 0

    if args.command == "fixture":
        return run([args.action, "--fixture", args.name] + list(args.rest))

    if getattr(args, "fixture", None) == "pentad" and not args.extended:
        sys.stderr.write("the pentad fixture is a long run; pass --extended\n")
        return EXIT_INPUT

    if getattr(args, "max_loops", None) is not None:
        from . import monodromy as monodromy_mod

        monodromy_mod.MAX_LOOPS = args.max_loops
    if getattr(args, "workers", None) is None and args.command != "class":
        args.workers = min(4, os.cpu_count() or 1)

    try:
        result = _HANDLERS[args.command](args)
    except (InputError, ParseError, KeyError, ValueError) as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return EXIT_INPUT
    except (TrackingError, IllConditionedError, np.linalg.LinAlgError) as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    _emit(result, getattr(args, "output", None))
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
