"""Multiclass minmax rank aggregation under Kendall tau and footrule distances."""

from .rankings import (
    DuplicateRank,
    ElementOutOfRange,
    Instance,
    PartialRanking,
    Permutation,
    RankOutOfRange,
    RankingClass,
    RankingError,
    as_partial,
    inverse,
    make_instance,
    make_partial_ranking,
    make_permutation,
    position,
)
from .distances import (
    DistanceKind,
    KindMismatch,
    SetDistanceKind,
    SizeMismatch,
    distance,
    effective_kind,
    kemeny,
    kendall_tau,
    minmax_objective,
    partial_footrule,
    set_distance,
    spearman_footrule,
)
from .lp import (
    FractionalSolution,
    Infeasible,
    IterationLimit,
    LinearProgram,
    PairwiseWeights,
    TieMass,
    Unbounded,
    build_footrule_program,
    build_kendall_lp,
    kendall_class_costs,
    pairwise_weights,
    solve,
    tie_mass,
)
from .aggregators import (
    AggregationResult,
    PivotScore,
    RoundedMatrix,
    max_weight_members,
    median_footrule_matching_baseline,
    median_pivot_baseline,
    min_mmkt_conv,
    min_mmsp_conv,
    min_pick_perm,
    mmkt_conv,
    mmsp_conv,
    pick_opt_perm,
    pick_rnd_perm,
    pivot_rounding,
    restrict_to_min_witnesses,
)
from .exact import OptimalSolution, TooLarge, brute_force, lp_gap
from .mallows import MallowsParams, TwoLevelConfig, sample_instance, sample_mallows

__version__ = "0.1.0"

__all__ = [
    "AggregationResult",
    "DistanceKind",
    "DuplicateRank",
    "ElementOutOfRange",
    "FractionalSolution",
    "Infeasible",
    "Instance",
    "IterationLimit",
    "KindMismatch",
    "LinearProgram",
    "MallowsParams",
    "OptimalSolution",
    "PairwiseWeights",
    "PartialRanking",
    "Permutation",
    "PivotScore",
    "RankOutOfRange",
    "RankingClass",
    "RankingError",
    "RoundedMatrix",
    "SetDistanceKind",
    "SizeMismatch",
    "TieMass",
    "TooLarge",
    "TwoLevelConfig",
    "Unbounded",
    "as_partial",
    "brute_force",
    "build_footrule_program",
    "build_kendall_lp",
    "distance",
    "effective_kind",
    "inverse",
    "kemeny",
    "kendall_class_costs",
    "kendall_tau",
    "lp_gap",
    "make_instance",
    "make_partial_ranking",
    "make_permutation",
    "max_weight_members",
    "median_footrule_matching_baseline",
    "median_pivot_baseline",
    "min_mmkt_conv",
    "min_mmsp_conv",
    "min_pick_perm",
    "minmax_objective",
    "mmkt_conv",
    "mmsp_conv",
    "pairwise_weights",
    "partial_footrule",
    "pick_opt_perm",
    "pick_rnd_perm",
    "pivot_rounding",
    "position",
    "restrict_to_min_witnesses",
    "sample_instance",
    "sample_mallows",
    "set_distance",
    "solve",
    "spearman_footrule",
    "tie_mass",
]
