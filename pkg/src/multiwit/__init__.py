"""Numerical toolkit for varieties in products of affine/projective spaces.

Witness collections, local multidimension, monodromy completion,
refinement/coarsening/slicing homotopies, Cartesian-product detection,
the trace test, and numerical irreducible decomposition, on top of a
self-contained homotopy continuation engine.
"""

from .algebra import (
    Polynomial,
    PolySystem,
    VariableGrouping,
    dehomogenize,
    evaluate,
    homogenize,
    jacobian,
    multidegree_of,
    numerical_rank,
)
from .dimension import (
    DimensionProfile,
    IllConditionedError,
    dimension_polytope,
    equidim_partition,
    local_multidimension,
    product_factorization,
)
from .monodromy import (
    MatchAmbiguityError,
    MonodromyOutcome,
    MonodromyState,
    breakup,
    complete_witness,
    grow_witness_set,
    monodromy_permutation,
    random_loop,
    trace_test,
)
from .nid import (
    ComponentRecord,
    Decomposition,
    build_component,
    component_membership,
    membership_product,
    nid_curve_affine,
    nid_multi,
)
from .startsys import (
    StartPackage,
    complete_intersection_class,
    mbezout,
    solve_zero_dim,
    square_up,
    start_package,
)
from .sysio import (
    DEFAULT_SEED,
    ParseError,
    RandomSource,
    SystemDocument,
    WitnessArchive,
    draw,
    format_system,
    load_witness,
    parse_system,
    save_witness,
)
from .tracker import (
    Homotopy,
    NonconvergenceError,
    PathResult,
    SingularJacobianError,
    TrackOptions,
    TrackingError,
    newton_refine,
    track_many,
    track_path,
)
from .witness import (
    CoarsenResult,
    IndeterminateError,
    SliceBank,
    SliceSelection,
    WitnessCollection,
    WitnessSet,
    coarsen,
    coarsen_collection,
    compute_witness_collection,
    membership,
    move_slice,
    refine,
    segre_degree,
    slice_collection,
)

__version__ = "0.1.0"
