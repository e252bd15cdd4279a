"""Multidimensional scaling of manifold-valued data."""

from .errors import (
    AlignmentError,
    CutLocusError,
    DatasetError,
    DegenerateDistanceError,
    ManifoldMDSError,
    NotPositiveDefiniteError,
    StructuralError,
    TraceError,
    ValidationError,
)
from .manifolds import (
    ManifoldKind,
    ManifoldPoint,
    Tag,
    TangentVector,
    distance,
    geodesic_walk,
    inner_product,
    pairwise_distances,
    random_point,
    so_distance,
    so_exp,
    so_log,
    sphere_distance,
    spd_distance,
    su_distance,
    validate,
)
from .solver import (
    EmbeddingResult,
    GivenInit,
    RandomInit,
    SolverConfig,
    Termination,
    embed,
    majorization_step,
    procrustes_align,
    quadratic_descent,
)
from .stress import (
    DistanceMatrix,
    Scheme,
    StressTrace,
    WeightScheme,
    build_A,
    build_C,
    embedded_distances,
    majorization_value,
    make_weights,
    stress,
    stress_trace_db,
)

__version__ = "0.1.0"
