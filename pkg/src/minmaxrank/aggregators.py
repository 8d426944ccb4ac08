"""Aggregation algorithms for the multiclass minmax problem.

Selection algorithms (pick a member of the heaviest classes), LP-rounding
for the Kendall/Kemeny objective, sort-rounding for the footrule objective,
the selection/reduction pair for the minimum set-distance variants, and two
classless median baselines used for benchmarking.

All randomized routines are deterministic given their seed.  Objectives in
results are exact Fractions recomputed from the returned ranking, and the
``certificate`` (when present) is a relaxation optimum lower-bounding every
achievable objective of the run's own problem.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import linear_sum_assignment

from .distances import (
    DistanceKind,
    KindMismatch,
    SetDistanceKind,
    distance,
    effective_kind,
    minmax_objective,
)
from .lp import build_footrule_program, build_kendall_lp, solve
from .rankings import Instance, Permutation, Ranking, RankingClass, as_partial
from ._rng import generator

_B_TOLERANCE = 1e-12
_TIE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class AggregationResult:
    ranking: Ranking
    objective: Fraction
    certificate: float | None = None


@dataclass(frozen=True)
class RoundedMatrix:
    """Deterministic 0/1 rounding of the pairwise fractional solution."""

    h: np.ndarray

    @classmethod
    def from_fractional(cls, u: np.ndarray, eps: float = 1e-9) -> "RoundedMatrix":
        uu = u.copy()
        uu[np.abs(uu) <= eps] = 0.0
        uu[np.abs(uu - 1.0) <= eps] = 1.0
        n = uu.shape[0]
        h = np.zeros((n, n), dtype=np.int8)
        for x in range(n):
            for y in range(x):  # x > y: printed rule
                h[x, y] = 1 if uu[x, y] >= 0.5 else 0
                h[y, x] = 1 - h[x, y]
        return cls(h)


@dataclass(frozen=True)
class PivotScore:
    """Rounding cost A and fractional cost B per class for one pivot."""

    pivot: int  # 1-based element id
    a_costs: tuple[float, ...]
    b_costs: tuple[float, ...]
    ratio: float


def _ratio(a: np.ndarray, b: np.ndarray) -> float:
    """max_k A_k / B_k, with 0/0 -> 0 and positive/0 -> inf."""
    out = np.where(
        b > _B_TOLERANCE,
        a / np.maximum(b, _B_TOLERANCE),
        np.where(a > _B_TOLERANCE, np.inf, 0.0),
    )
    return float(out.max())


def _pivot_costs(a: int, others: np.ndarray, h: np.ndarray, u: np.ndarray,
                 wf: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """A and B cost vectors (one entry per class) for candidate pivot a.

    Indices are 0-based.  ``others`` are the active elements besides a;
    elements with h[x, a] = 1 go left of the pivot, the rest go right, and
    the pivot additionally fixes every (right, left) pair.
    """
    left = others[h[others, a] == 1]
    right = others[h[others, a] == 0]

    a_costs = wf[:, a, left].sum(axis=1) + wf[:, right, a].sum(axis=1)
    b_costs = (u[others, a] * wf[:, a, others]).sum(axis=1) + (
        u[a, others] * wf[:, others, a]
    ).sum(axis=1)
    if left.size and right.size:
        w_rl = wf[:, right][:, :, left]  # w[k][x][y], x right, y left
        w_lr = wf[:, left][:, :, right]  # w[k][y][x]
        a_costs = a_costs + w_rl.sum(axis=(1, 2))
        u_rl = u[np.ix_(right, left)]  # u[x][y]
        u_lr = u[np.ix_(left, right)]  # u[y][x]
        b_costs = b_costs + (
            u_rl[None, :, :] * w_lr.swapaxes(1, 2)
            + u_lr.T[None, :, :] * w_rl
        ).sum(axis=(1, 2))
    return a_costs, b_costs


def pivot_rounding(
    u: np.ndarray, wf: np.ndarray
) -> tuple[list[int], list[PivotScore]]:
    """Recursive min-ratio pivot rounding of a pairwise fractional solution.

    Returns the elements (1-based) best-to-worst together with the chosen
    pivot's cost record at every recursion level, top-down.
    """
    h = RoundedMatrix.from_fractional(u).h

    def recurse(active: list[int]) -> tuple[list[int], list[PivotScore]]:
        if len(active) <= 1:
            return list(active), []
        best_score = None
        for a in active:  # ascending ids: ties keep the smallest element
            others = np.array([x for x in active if x != a])
            a_costs, b_costs = _pivot_costs(a, others, h, u, wf)
            ratio = _ratio(a_costs, b_costs)
            if best_score is None or ratio < best_score.ratio:
                best_score = PivotScore(
                    a + 1, tuple(a_costs.tolist()), tuple(b_costs.tolist()), ratio
                )
        v = best_score.pivot - 1
        left = [x for x in active if x != v and h[x, v] == 1]
        right = [x for x in active if x != v and h[x, v] == 0]
        left_order, left_trace = recurse(left)
        right_order, right_trace = recurse(right)
        order = left_order + [v] + right_order
        return order, [best_score] + left_trace + right_trace

    order0, trace = recurse(list(range(u.shape[0])))
    return [x + 1 for x in order0], trace


def _tau_kind(inst: Instance, kind: DistanceKind | None) -> DistanceKind:
    if kind is None:
        kind = DistanceKind.KENDALL_TAU
    kind = effective_kind(inst, kind)
    if kind not in (DistanceKind.KENDALL_TAU, DistanceKind.KEMENY):
        raise KindMismatch(f"{kind} is not a Kendall-type distance")
    return kind


def _footrule_kind(inst: Instance, kind: DistanceKind | None) -> DistanceKind:
    if kind is None:
        kind = DistanceKind.SPEARMAN_FOOTRULE
    kind = effective_kind(inst, kind)
    if kind not in (DistanceKind.SPEARMAN_FOOTRULE, DistanceKind.PARTIAL_FOOTRULE):
        raise KindMismatch(f"{kind} is not a footrule-type distance")
    return kind


def mmkt_conv(inst: Instance, kind: DistanceKind | None = None) -> AggregationResult:
    """LP relaxation plus deterministic pivot rounding (median Kendall/Kemeny).

    The returned permutation costs at most twice the relaxation optimum,
    which is reported as the certificate.
    """
    kind = _tau_kind(inst, kind)
    prog = build_kendall_lp(inst)
    sol = solve(prog)
    order, _ = pivot_rounding(sol.u_pair, prog.meta["wf"])
    perm = Permutation.from_order(order)
    objective = minmax_objective(perm, inst, kind, SetDistanceKind.MEDIAN)
    return AggregationResult(perm, objective, certificate=sol.objective)


def positions_to_order(
    u: np.ndarray, rng_seed=None, deterministic_ties: bool = False
) -> list[int]:
    """Elements (1-based) by ascending fractional position, ties shuffled.

    Values within 1e-9 of each other count as tied; with
    ``deterministic_ties`` ties keep ascending element order instead of
    being shuffled.
    """
    order = sorted(range(len(u)), key=lambda i: (u[i], i))
    groups: list[list[int]] = []
    for i in order:
        if groups and u[i] - u[groups[-1][0]] <= _TIE_TOLERANCE:
            groups[-1].append(i)
        else:
            groups.append([i])
    if not deterministic_ties:
        rng = generator(rng_seed)
        for g in groups:
            if len(g) > 1:
                rng.shuffle(g)
    return [i + 1 for g in groups for i in g]


def mmsp_conv(
    inst: Instance,
    kind: DistanceKind | None = None,
    rng_seed=None,
    deterministic_ties: bool = False,
) -> AggregationResult:
    """Footrule program plus sort-rounding (median footrule objective).

    The output orders elements by their optimal fractional positions and is
    therefore an L1-closest permutation to them; its cost is at most twice
    the program optimum (the certificate), for every tie-break.
    """
    kind = _footrule_kind(inst, kind)
    prog = build_footrule_program(inst)
    sol = solve(prog)
    order = positions_to_order(sol.u_pos, rng_seed, deterministic_ties)
    perm = Permutation.from_order(order)
    objective = minmax_objective(perm, inst, kind, SetDistanceKind.MEDIAN)
    return AggregationResult(perm, objective, certificate=sol.objective)


def max_weight_members(inst: Instance) -> list[tuple[int, int, Ranking]]:
    """All (class, index, member) candidates from the heaviest classes."""
    top = set(inst.max_weight_classes())
    return [(k, i, m) for k, i, m in inst.iter_members() if k in top]


def pick_rnd_perm(
    inst: Instance,
    kind: DistanceKind,
    set_kind: SetDistanceKind,
    rng_seed=None,
) -> AggregationResult:
    """Uniform random member of the heaviest classes (2-approx in expectation)."""
    kind = effective_kind(inst, kind)
    candidates = max_weight_members(inst)
    rng = generator(rng_seed)
    _, _, chosen = candidates[int(rng.integers(len(candidates)))]
    return AggregationResult(chosen, minmax_objective(chosen, inst, kind, set_kind))


def pick_opt_perm(
    inst: Instance, kind: DistanceKind, set_kind: SetDistanceKind
) -> AggregationResult:
    """Best member of the heaviest classes; ties keep the first (class, index)."""
    kind = effective_kind(inst, kind)
    best = None
    best_obj = None
    for _, _, member in max_weight_members(inst):
        obj = minmax_objective(member, inst, kind, set_kind)
        if best_obj is None or obj < best_obj:
            best, best_obj = member, obj
    return AggregationResult(best, best_obj)


def _min_pick_indices(inst: Instance, kind: DistanceKind) -> tuple[int, int]:
    """(class, index) of the member with the smallest cross-class min score."""
    if inst.num_classes == 1:
        return 0, 0
    best = None
    best_score = None
    for k, i, member in inst.iter_members():
        score = max(
            cls.weight * min(distance(member, s, kind) for s in cls.members)
            for j, cls in enumerate(inst.classes)
            if j != k
        )
        if best_score is None or score < best_score:
            best, best_score = (k, i), score
    return best


def min_pick_perm(inst: Instance, kind: DistanceKind) -> AggregationResult:
    """Member selection for the minimum set-distance problem (2-approx).

    With a single class every member is optimal and the first is returned
    (the cross-class score is vacuous).
    """
    kind = effective_kind(inst, kind)
    k, i = _min_pick_indices(inst, kind)
    member = inst.classes[k].members[i]
    objective = minmax_objective(member, inst, kind, SetDistanceKind.MINIMUM)
    return AggregationResult(member, objective)


def restrict_to_min_witnesses(inst: Instance, kind: DistanceKind) -> Instance:
    """Shrink each class to the members closest to the min-pick selection.

    The selected member's own class becomes a singleton; every other class
    keeps exactly its members attaining the minimum distance to it.  Class
    weights are unchanged.  A median aggregate of the restricted instance
    approximates the original minimum-distance problem.
    """
    kind = effective_kind(inst, kind)
    k_star, i_star = _min_pick_indices(inst, kind)
    anchor = inst.classes[k_star].members[i_star]
    classes = []
    for j, cls in enumerate(inst.classes):
        if j == k_star:
            classes.append(RankingClass((anchor,), cls.weight))
            continue
        dists = [distance(anchor, s, kind) for s in cls.members]
        lo = min(dists)
        kept = tuple(s for s, d in zip(cls.members, dists) if d == lo)
        classes.append(RankingClass(kept, cls.weight))
    return Instance(inst.n, tuple(classes))


def min_mmkt_conv(
    inst: Instance, kind: DistanceKind | None = None, rng_seed=None
) -> AggregationResult:
    """Pivot rounding on the witness-restricted instance (min set-distance).

    The objective is evaluated against the original instance under the
    minimum set-distance; the reduction guarantees a factor of 4.
    """
    kind = _tau_kind(inst, kind)
    inner = mmkt_conv(restrict_to_min_witnesses(inst, kind), kind)
    objective = minmax_objective(inner.ranking, inst, kind, SetDistanceKind.MINIMUM)
    return AggregationResult(inner.ranking, objective)


def min_mmsp_conv(
    inst: Instance,
    kind: DistanceKind | None = None,
    rng_seed=None,
    deterministic_ties: bool = False,
) -> AggregationResult:
    """Sort-rounding on the witness-restricted instance (min set-distance)."""
    kind = _footrule_kind(inst, kind)
    inner = mmsp_conv(
        restrict_to_min_witnesses(inst, kind), kind, rng_seed, deterministic_ties
    )
    objective = minmax_objective(inner.ranking, inst, kind, SetDistanceKind.MINIMUM)
    return AggregationResult(inner.ranking, objective)


def _pooled_majority(inst: Instance) -> np.ndarray:
    """maj[x][y] = number of members (all classes pooled) ranking x above y."""
    n = inst.n
    maj = np.zeros((n, n), dtype=np.int64)
    for _, _, member in inst.iter_members():
        tw = as_partial(member)._twice_positions
        for x in range(n):
            for y in range(n):
                if tw[x] < tw[y]:
                    maj[x, y] += 1
    return maj


def median_pivot_baseline(
    inst: Instance,
    rng_seed=None,
    kind: DistanceKind | None = None,
    set_kind: SetDistanceKind = SetDistanceKind.MEDIAN,
) -> AggregationResult:
    """Classless random-pivot quicksort on pooled majority comparisons.

    A classical median-aggregation heuristic kept as a benchmark; it offers
    no minmax guarantee.  The objective is evaluated under (kind, set_kind).
    """
    kind = effective_kind(inst, kind or DistanceKind.KENDALL_TAU)
    maj = _pooled_majority(inst)
    rng = generator(rng_seed)

    def recurse(active: list[int]) -> list[int]:
        if len(active) <= 1:
            return active
        v = active[int(rng.integers(len(active)))]
        left = [x for x in active if x != v and maj[x, v] > maj[v, x]]
        right = [x for x in active if x != v and maj[x, v] <= maj[v, x]]
        return recurse(left) + [v] + recurse(right)

    order = recurse(list(range(inst.n)))
    perm = Permutation.from_order([x + 1 for x in order])
    return AggregationResult(perm, minmax_objective(perm, inst, kind, set_kind))


def median_footrule_matching_baseline(
    inst: Instance,
    kind: DistanceKind | None = None,
    set_kind: SetDistanceKind = SetDistanceKind.MEDIAN,
) -> AggregationResult:
    """Classless footrule median via optimal element-to-position assignment.

    Minimizes the pooled (unweighted) footrule exactly; no minmax guarantee.
    """
    kind = effective_kind(inst, kind or DistanceKind.SPEARMAN_FOOTRULE)
    n = inst.n
    cost = np.zeros((n, n), dtype=np.int64)
    for _, _, member in inst.iter_members():
        tw = as_partial(member)._twice_positions
        for x in range(n):
            for t in range(1, n + 1):
                cost[x, t - 1] += abs(tw[x] - 2 * t)
    _, cols = linear_sum_assignment(cost)
    perm = Permutation(tuple(int(c) + 1 for c in cols))
    return AggregationResult(perm, minmax_objective(perm, inst, kind, set_kind))
