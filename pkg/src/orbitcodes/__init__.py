"""Exact intersection and distance distributions of cyclic orbit codes over finite fields."""

__version__ = "0.1.0"

from .exceptions import (
    FieldError,
    InfeasibleSearchError,
    MixedStabilizerError,
    OrbitCodesError,
    PreconditionError,
    SameOrbitError,
)
from .gf_tower import FieldCtx, FieldSpec, build_field, field_for, isomorphism
from .multiorbit import (
    PairData,
    UnionCode,
    cross_distribution,
    two_space_sidon,
    union_distribution,
    verify_union_theorem,
)
from .orbit import (
    FractionData,
    OrbitProfile,
    counting_identities,
    fraction_set,
    gen_sidon_check,
    intersection_distribution,
    is_sidon,
    lambda_from_f,
    sidon_distribution,
)
from .search import SearchRecord, SweepConfig, exhaustive_sweep, random_sweep, sidon_census
from .structure import AVSet, PhiOrbit, TwoDimAnalysis, analyze_2dim, check_2k4_inequalities, compute_A_V, phi_apply, phi_partition
from .subspace import (
    Subspace,
    contains_field_shift,
    enumerate_containing_one,
    gaussian_binomial,
    random_containing_one,
    shift,
    span,
    stabilizer,
    subfield_subspace,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["OrbitProfiler"]


def __getattr__(name):
    # deferred so the CLI does not pay for importing scikit-learn
    if name == "OrbitProfiler":
        from .estimator import OrbitProfiler

        return OrbitProfiler
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
