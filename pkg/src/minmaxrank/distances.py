"""Pairwise and rank-set distances, and the minmax objective.

Four pairwise distances are supported:

* Kendall tau -- pairwise inversions between two permutations (equivalently
  the minimum number of adjacent transpositions).
* Spearman footrule -- sum of absolute rank differences.
* Kemeny -- Kendall tau generalized to partial rankings: oppositely ordered
  pairs count 1, pairs tied in exactly one of the two rankings count 1/2.
* Partial footrule -- footrule over fractional tie positions.

Values are exact: integers for the permutation distances, half-integer
Fractions for the partial-ranking ones.  Rank-set distances aggregate a
class either by averaging (median) or by taking the best member (minimum),
and the minmax objective is the weighted worst class.
"""

from __future__ import annotations

from enum import Enum
from fractions import Fraction

from .rankings import (
    Instance,
    PartialRanking,
    Permutation,
    Ranking,
    RankingClass,
    as_partial,
)


class DistanceError(ValueError):
    pass


class SizeMismatch(DistanceError):
    """The two rankings are over ground sets of different sizes."""


class KindMismatch(DistanceError):
    """A distance was applied to a ranking kind it does not support."""


class DistanceKind(Enum):
    KENDALL_TAU = "kendall-tau"
    SPEARMAN_FOOTRULE = "spearman-footrule"
    KEMENY = "kemeny"
    PARTIAL_FOOTRULE = "partial-footrule"

    @property
    def positional(self) -> bool:
        """True for the footrule-type distances."""
        return self in (DistanceKind.SPEARMAN_FOOTRULE, DistanceKind.PARTIAL_FOOTRULE)


class SetDistanceKind(Enum):
    MEDIAN = "median"
    MINIMUM = "minimum"


def _check_sizes(p: Ranking, q: Ranking) -> None:
    if p.n != q.n:
        raise SizeMismatch(f"rankings over {p.n} and {q.n} elements")


def _require_permutations(p: Ranking, q: Ranking, name: str) -> None:
    if not isinstance(p, Permutation) or not isinstance(q, Permutation):
        raise KindMismatch(f"{name} is defined on permutations only")


def _count_inversions(seq: list[int]) -> int:
    """Inversions in seq, counted by merge sort."""
    n = len(seq)
    if n < 2:
        return 0
    buf = list(seq)
    tmp = [0] * n
    total = 0
    width = 1
    while width < n:
        for lo in range(0, n - width, 2 * width):
            mid = lo + width
            hi = min(lo + 2 * width, n)
            i, j, k = lo, mid, lo
            while i < mid and j < hi:
                if buf[i] <= buf[j]:
                    tmp[k] = buf[i]
                    i += 1
                else:
                    tmp[k] = buf[j]
                    total += mid - i
                    j += 1
                k += 1
            tmp[k:hi] = buf[i:mid] if i < mid else buf[j:hi]
            buf[lo:hi] = tmp[lo:hi]
        width *= 2
    return total


def kendall_tau(p: Permutation, q: Permutation) -> int:
    """Number of element pairs ordered oppositely by p and q."""
    _require_permutations(p, q, "kendall_tau")
    _check_sizes(p, q)
    # Walk p's order and count inversions of q's ranks along it.
    composed = [q.ranks[x - 1] for x in p.order()]
    return _count_inversions(composed)


def spearman_footrule(p: Permutation, q: Permutation) -> int:
    """Sum over elements of the absolute rank difference."""
    _require_permutations(p, q, "spearman_footrule")
    _check_sizes(p, q)
    return sum(abs(a - b) for a, b in zip(p.ranks, q.ranks))


def kemeny(p: Ranking, q: Ranking) -> Fraction:
    """Kendall tau on partial rankings; tied-in-one pairs count 1/2.

    Permutations are promoted to singleton-bucket partial rankings, so on
    total orders this equals ``kendall_tau`` exactly.
    """
    _check_sizes(p, q)
    pp, qq = as_partial(p), as_partial(q)
    n = pp.n
    pb = [0] * n
    qb = [0] * n
    for x in range(1, n + 1):
        pb[x - 1] = pp.bucket_of(x)
        qb[x - 1] = qq.bucket_of(x)
    opposite = 0
    tied_in_one = 0
    for x in range(n):
        for y in range(x + 1, n):
            dp = pb[x] - pb[y]
            dq = qb[x] - qb[y]
            if dp * dq < 0:
                opposite += 1
            elif (dp == 0) != (dq == 0):
                tied_in_one += 1
    return Fraction(2 * opposite + tied_in_one, 2)


def partial_footrule(p: Ranking, q: Ranking) -> Fraction:
    """Footrule over fractional positions; permutations auto-promote."""
    _check_sizes(p, q)
    pp, qq = as_partial(p), as_partial(q)
    total = sum(
        abs(a - b) for a, b in zip(pp._twice_positions, qq._twice_positions)
    )
    return Fraction(total, 2)


def distance(p: Ranking, q: Ranking, kind: DistanceKind):
    """Dispatch on DistanceKind; see the individual distance functions."""
    if kind is DistanceKind.KENDALL_TAU:
        return kendall_tau(p, q)
    if kind is DistanceKind.SPEARMAN_FOOTRULE:
        return spearman_footrule(p, q)
    if kind is DistanceKind.KEMENY:
        return kemeny(p, q)
    if kind is DistanceKind.PARTIAL_FOOTRULE:
        return partial_footrule(p, q)
    raise KindMismatch(f"unknown distance kind {kind!r}")


def set_distance(
    p: Ranking,
    cls: RankingClass,
    kind: DistanceKind,
    set_kind: SetDistanceKind,
) -> Fraction:
    """Distance from a ranking to a class: mean or minimum over members."""
    values = [distance(p, member, kind) for member in cls.members]
    if set_kind is SetDistanceKind.MEDIAN:
        return Fraction(sum(values), cls.m)
    return Fraction(min(values))


def minmax_objective(
    p: Ranking,
    inst: Instance,
    kind: DistanceKind,
    set_kind: SetDistanceKind,
) -> Fraction:
    """max over classes of weight * set_distance -- the quantity minimized."""
    return max(
        cls.weight * set_distance(p, cls, kind, set_kind) for cls in inst.classes
    )


def effective_kind(inst: Instance, kind: DistanceKind) -> DistanceKind:
    """Promote a permutation-only distance when the instance carries ties."""
    if not inst.has_ties:
        return kind
    if kind is DistanceKind.KENDALL_TAU:
        return DistanceKind.KEMENY
    if kind is DistanceKind.SPEARMAN_FOOTRULE:
        return DistanceKind.PARTIAL_FOOTRULE
    return kind
