"""Core ordinal data types: permutations, partial rankings, classes, instances.

Elements are the integers ``1..n``.  A permutation assigns each element a
rank in ``1..n`` (rank 1 is best).  A partial ranking is an ordered list of
tie buckets; tied elements share the fractional position

    position(x) = #{ranked strictly higher} + (bucket size + 1) / 2,

which coincides with the rank on total orders.  Positions are kept as exact
half-integers (``Fraction`` with denominator 1 or 2) so comparisons never
hit floating-point ties.

All types are immutable after construction and validate their invariants in
``__post_init__``; they are safe to share across threads or processes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union


class RankingError(ValueError):
    """Base class for ranking construction/lookup errors."""


class DuplicateRank(RankingError):
    """A rank value appears more than once in a permutation."""


class RankOutOfRange(RankingError):
    """A rank value lies outside 1..n."""


class ElementOutOfRange(RankingError):
    """An element id lies outside 1..n."""


@dataclass(frozen=True)
class Permutation:
    """A bijection from elements 1..n to ranks 1..n.

    ``ranks[i]`` is the rank of element ``i + 1`` (storage is 0-based,
    elements are 1-based).
    """

    ranks: tuple[int, ...]

    def __post_init__(self):
        n = len(self.ranks)
        if n < 1:
            raise RankingError("permutation must have at least one element")
        seen = [False] * n
        for r in self.ranks:
            if not isinstance(r, int):
                raise RankingError(f"rank {r!r} is not an integer")
            if r < 1 or r > n:
                raise RankOutOfRange(f"rank {r} outside 1..{n}")
            if seen[r - 1]:
                raise DuplicateRank(f"rank {r} appears more than once")
            seen[r - 1] = True

    @property
    def n(self) -> int:
        return len(self.ranks)

    def rank_of(self, x: int) -> int:
        """Rank of element x (1-based)."""
        if not 1 <= x <= self.n:
            raise ElementOutOfRange(f"element {x} outside 1..{self.n}")
        return self.ranks[x - 1]

    __call__ = rank_of

    def inverse(self) -> "Permutation":
        """The inverse permutation: entry t holds the element ranked t."""
        inv = [0] * self.n
        for x, r in enumerate(self.ranks, start=1):
            inv[r - 1] = x
        return Permutation(tuple(inv))

    def order(self) -> tuple[int, ...]:
        """Elements listed best-to-worst (the inverse as a sequence)."""
        return self.inverse().ranks

    def to_partial(self) -> "PartialRanking":
        """Equivalent partial ranking with one element per bucket."""
        return PartialRanking(tuple(frozenset((x,)) for x in self.order()))

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def from_order(cls, order: Sequence[int]) -> "Permutation":
        """Build from a best-to-worst listing of the elements."""
        n = len(order)
        ranks = [0] * n
        for pos, x in enumerate(order, start=1):
            if not isinstance(x, int) or not 1 <= x <= n:
                raise ElementOutOfRange(f"element {x!r} outside 1..{n}")
            if ranks[x - 1] != 0:
                raise DuplicateRank(f"element {x} listed more than once")
            ranks[x - 1] = pos
        return cls(tuple(ranks))


def make_permutation(ranks: Iterable[int]) -> Permutation:
    """Validate an array of ranks and return the Permutation it defines."""
    return Permutation(tuple(ranks))


def inverse(p: Permutation) -> Permutation:
    return p.inverse()


@dataclass(frozen=True)
class PartialRanking:
    """An ordered partition of 1..n into nonempty tie buckets."""

    buckets: tuple[frozenset[int], ...]
    # 2 * position(x), indexed by element - 1; half-integers stay exact.
    _twice_positions: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = sum(len(b) for b in self.buckets)
        if n < 1:
            raise RankingError("partial ranking must have at least one element")
        twice = [0] * n
        higher = 0
        for b in self.buckets:
            if not b:
                raise RankingError("empty bucket")
            for x in b:
                if not isinstance(x, int) or not 1 <= x <= n:
                    raise ElementOutOfRange(f"element {x!r} outside 1..{n}")
                if twice[x - 1] != 0:
                    raise RankingError(f"element {x} appears in more than one bucket")
                twice[x - 1] = 2 * higher + len(b) + 1
            higher += len(b)
        object.__setattr__(self, "_twice_positions", tuple(twice))

    @property
    def n(self) -> int:
        return len(self._twice_positions)

    def position(self, x: int) -> Fraction:
        """Fractional position of element x; half-integer valued."""
        if not 1 <= x <= self.n:
            raise ElementOutOfRange(f"element {x} outside 1..{self.n}")
        return Fraction(self._twice_positions[x - 1], 2)

    def positions(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(t, 2) for t in self._twice_positions)

    def bucket_of(self, x: int) -> int:
        """0-based index of the bucket containing x."""
        if not 1 <= x <= self.n:
            raise ElementOutOfRange(f"element {x} outside 1..{self.n}")
        for i, b in enumerate(self.buckets):
            if x in b:
                return i
        raise AssertionError("unreachable: validated partition")

    def tied_pair_count(self) -> int:
        """Number of unordered pairs sharing a bucket."""
        return sum(len(b) * (len(b) - 1) // 2 for b in self.buckets)

    def is_total_order(self) -> bool:
        return all(len(b) == 1 for b in self.buckets)

    def to_permutation(self) -> Permutation:
        """Lossless conversion; requires every bucket to be a singleton."""
        if not self.is_total_order():
            raise RankingError("partial ranking has ties; no equivalent permutation")
        return Permutation.from_order([next(iter(b)) for b in self.buckets])

    @classmethod
    def from_buckets(cls, buckets: Iterable[Iterable[int]]) -> "PartialRanking":
        return cls(tuple(frozenset(b) for b in buckets))


def make_partial_ranking(buckets: Iterable[Iterable[int]]) -> PartialRanking:
    return PartialRanking.from_buckets(buckets)


Ranking = Union[Permutation, PartialRanking]


def as_partial(r: Ranking) -> PartialRanking:
    """Promote a permutation to a singleton-bucket partial ranking."""
    return r.to_partial() if isinstance(r, Permutation) else r


def position(r: Ranking, x: int) -> Fraction:
    """Fractional position of element x in a ranking of either kind."""
    if isinstance(r, Permutation):
        return Fraction(r.rank_of(x))
    return r.position(x)


@dataclass(frozen=True)
class RankingClass:
    """A set of rankings sharing a violation cost weight.

    Members must be all permutations or all partial rankings, over a common
    ground set.  The weight is kept as an exact Fraction.
    """

    members: tuple[Ranking, ...]
    weight: Fraction = Fraction(1)

    def __post_init__(self):
        if not self.members:
            raise RankingError("ranking class must have at least one member")
        object.__setattr__(self, "weight", Fraction(self.weight))
        if self.weight <= 0:
            raise RankingError(f"class weight must be positive, got {self.weight}")
        n = self.members[0].n
        kind = type(self.members[0])
        for m in self.members:
            if m.n != n:
                raise RankingError("members have differing ground-set sizes")
            if type(m) is not kind:
                raise RankingError("members mix permutations and partial rankings")
        object.__setattr__(self, "members", tuple(self.members))

    @property
    def m(self) -> int:
        return len(self.members)

    @property
    def n(self) -> int:
        return self.members[0].n

    @property
    def has_ties(self) -> bool:
        return isinstance(self.members[0], PartialRanking)


@dataclass(frozen=True)
class Instance:
    """A multiclass aggregation input: C weighted classes over 1..n."""

    n: int
    classes: tuple[RankingClass, ...]

    def __post_init__(self):
        if not self.classes:
            raise RankingError("instance must have at least one class")
        for cls in self.classes:
            if cls.n != self.n:
                raise RankingError(
                    f"class over {cls.n} elements in an instance over {self.n}"
                )
        object.__setattr__(self, "classes", tuple(self.classes))

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    def max_weight(self) -> Fraction:
        return max(cls.weight for cls in self.classes)

    def max_weight_classes(self) -> tuple[int, ...]:
        """0-based indices of the classes attaining the maximum weight."""
        top = self.max_weight()
        return tuple(k for k, cls in enumerate(self.classes) if cls.weight == top)

    @property
    def has_ties(self) -> bool:
        return any(cls.has_ties for cls in self.classes)

    def iter_members(self) -> Iterator[tuple[int, int, Ranking]]:
        """Yield (class index, member index, ranking) over all members."""
        for k, cls in enumerate(self.classes):
            for i, member in enumerate(cls.members):
                yield k, i, member


def make_instance(classes: Iterable[RankingClass]) -> Instance:
    classes = tuple(classes)
    if not classes:
        raise RankingError("instance must have at least one class")
    return Instance(classes[0].n, classes)
