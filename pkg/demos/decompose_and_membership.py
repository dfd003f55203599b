"""Numerical irreducible decomposition and membership testing.

The fixture `two-lines` is the union of the lines y = x and x + y = 1 in
the plane, treated as one variable group.  The decomposition separates the
lines; membership testing then tells the components apart.
"""

import numpy as np

from multiwit import (
    RandomSource,
    TrackOptions,
    component_membership,
    compute_witness_collection,
    nid_multi,
)
from multiwit.fixtures import get_fixture


def main():
    fx = get_fixture("two-lines")
    rs = RandomSource(seed=5)
    opts = TrackOptions(workers=4)

    wc = compute_witness_collection(fx.system, fx.default_keys, rs, opts)
    points = list(wc.entries[(1,)].points)
    dec = nid_multi(fx.system, points, rs.substream(1), opts)

    print(f"{len(dec.components)} components:")
    for i, rec in enumerate(dec.components):
        size = sum(1 for v in dec.assignment.values() if v == i)
        print(f"    component {i}: degree {rec.curve_degree}, "
              f"{size} witness points, certified={rec.certified}")

    for q in (np.array([0.3, 0.3], dtype=complex),
              np.array([0.3, 0.7], dtype=complex),
              np.array([0.3, 0.4], dtype=complex)):
        hits = [i for i, rec in enumerate(dec.components)
                if component_membership(rec, q, opts)]
        print(f"point {q.real}: on components {hits or 'none'}")


if __name__ == "__main__":
    main()
