"""Finite outcome spaces, measurements as partitions, and coarse-graining relations.

An outcome context is the finite integer-indexed set {0..d-1}; continuous
outcome spaces are modelled as d discrete detector cells so that every claim
stays brute-force checkable. A measurement is a labelled partition of its
context; a singleton block is an atomic outcome, a multi-element block a
coarse-grained (non-atomic) one.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from .errors import ContextMismatchError, EmptyBlockError, PartitionError

__all__ = [
    "Outcome",
    "Measurement",
    "CoarseGraining",
    "make_measurement",
    "atomic_measurement",
    "coarse_measurement",
    "is_atomic",
    "refinements",
    "coarse_graining",
]


@dataclass(frozen=True)
class Outcome:
    """A block of a measurement partition: a nonempty set of atomic ids.

    The outcome is atomic exactly when it has a single member. Members index
    the atomic outcomes of a context of size ``context_size``; outcomes from
    different context sizes never compare equal and are rejected by set
    operations rather than coerced.
    """

    members: frozenset[int]
    context_size: int

    def __post_init__(self) -> None:
        members = frozenset(int(m) for m in self.members)
        object.__setattr__(self, "members", members)
        if not members:
            raise EmptyBlockError("outcome must have at least one member")
        if self.context_size < 1:
            raise ValueError(f"context size must be >= 1, got {self.context_size}")
        bad = [m for m in members if m < 0 or m >= self.context_size]
        if bad:
            raise ValueError(f"member ids {sorted(bad)} outside context of size {self.context_size}")

    @property
    def is_atomic(self) -> bool:
        return len(self.members) == 1

    @property
    def is_full(self) -> bool:
        return len(self.members) == self.context_size

    @property
    def atomic_id(self) -> int:
        """The single member of an atomic outcome."""
        if not self.is_atomic:
            raise ValueError(f"{self} is not atomic")
        return next(iter(self.members))

    def sort_key(self) -> tuple:
        return (len(self.members), tuple(sorted(self.members)))

    def __repr__(self) -> str:
        ids = ",".join(str(m) for m in sorted(self.members))
        return f"Outcome({{{ids}}} in d={self.context_size})"


def is_atomic(o: Outcome) -> bool:
    """True iff the outcome cannot be refined, i.e. has exactly one member."""
    return o.is_atomic


def refinements(o: Outcome, include_improper: bool = False) -> list[Outcome]:
    """All nonempty strict subsets of ``o``, smallest first, lexicographic within a size.

    With ``include_improper`` the outcome itself is appended after the strict
    subsets. An atomic outcome has no strict refinement.
    """
    ids = sorted(o.members)
    out = [
        Outcome(frozenset(combo), o.context_size)
        for size in range(1, len(ids))
        for combo in combinations(ids, size)
    ]
    if include_improper:
        out.append(Outcome(frozenset(ids), o.context_size))
    return out


@dataclass(frozen=True)
class Measurement:
    """A labelled partition of an outcome context into outcome blocks.

    Blocks are stored sorted by (size, members) so equal partitions compare
    equal regardless of declaration order. The partition law (pairwise
    disjoint, union complete) is enforced on every construction.
    """

    label: str
    context_size: int
    outcomes: tuple[Outcome, ...]

    def __post_init__(self) -> None:
        outcomes = tuple(sorted(self.outcomes, key=Outcome.sort_key))
        object.__setattr__(self, "outcomes", outcomes)
        if not outcomes:
            raise PartitionError(f"measurement {self.label!r} declares no outcomes")
        d = self.context_size
        for o in outcomes:
            if o.context_size != d:
                raise ContextMismatchError(
                    f"measurement {self.label!r} has context size {d} "
                    f"but block {o} lives in d={o.context_size}"
                )
        total = sum(len(o.members) for o in outcomes)
        union = frozenset().union(*(o.members for o in outcomes))
        if total > len(union):
            raise PartitionError(f"measurement {self.label!r}: blocks overlap")
        if union != frozenset(range(d)):
            missing = sorted(set(range(d)) - union)
            raise PartitionError(f"measurement {self.label!r}: blocks leave gaps at {missing}")

    @property
    def is_atomic(self) -> bool:
        return all(o.is_atomic for o in self.outcomes)

    def __contains__(self, outcome: Outcome) -> bool:
        return outcome in self.outcomes

    def outcome_containing(self, atomic_id: int) -> Outcome:
        for o in self.outcomes:
            if atomic_id in o.members:
                return o
        raise KeyError(f"no block of {self.label!r} contains atomic id {atomic_id}")

    def block(self, members: Iterable[int]) -> Outcome:
        """The block equal to ``members``; KeyError if it is not a block."""
        wanted = frozenset(int(m) for m in members)
        for o in self.outcomes:
            if o.members == wanted:
                return o
        raise KeyError(f"{sorted(wanted)} is not a block of measurement {self.label!r}")


def make_measurement(label: str, d: int, blocks: Iterable[Iterable[int]]) -> Measurement:
    """Build a measurement from raw blocks, enforcing the partition law."""
    if d < 1:
        raise ValueError(f"context size must be >= 1, got {d}")
    blocks = list(blocks)
    if not blocks:
        raise PartitionError(f"measurement {label!r} declares no outcomes")
    return Measurement(label, d, tuple(Outcome(frozenset(b), d) for b in blocks))


def atomic_measurement(label: str, d: int) -> Measurement:
    """The fully atomic measurement of a context: one singleton block per id."""
    return make_measurement(label, d, [{i} for i in range(d)])


def coarse_measurement(label: str, d: int, block: Iterable[int]) -> Measurement:
    """The canonical coarse-graining holding ``block`` whole and everything else atomic.

    Degenerates to the fully atomic measurement when ``block`` is a singleton.
    """
    merged = frozenset(int(m) for m in block)
    rest = [{i} for i in range(d) if i not in merged]
    return make_measurement(label, d, [merged, *rest])


@dataclass(frozen=True)
class CoarseGraining:
    """Relates a fully atomic measurement to a coarse-graining of it.

    ``mapping`` pairs each atomic source block with the target block containing
    it; every target block is the union of its mapped source blocks.
    """

    source: Measurement
    target: Measurement
    mapping: tuple[tuple[Outcome, Outcome], ...]

    def apply(self, o: Outcome) -> Outcome:
        for src, tgt in self.mapping:
            if src == o:
                return tgt
        raise KeyError(f"{o} is not a block of the source measurement {self.source.label!r}")

    def refine_target(self, t: Outcome) -> list[Outcome]:
        """The atomic source blocks that coarse-grain to target block ``t``."""
        return [src for src, tgt in self.mapping if tgt == t]


def coarse_graining(source: Measurement, target: Measurement) -> CoarseGraining:
    """Build the coarse-graining map from an atomic source onto ``target``."""
    if not source.is_atomic:
        raise ValueError(f"source measurement {source.label!r} must be fully atomic")
    if source.context_size != target.context_size:
        raise ContextMismatchError(
            f"source d={source.context_size} and target d={target.context_size} differ"
        )
    mapping = tuple(
        (src, target.outcome_containing(src.atomic_id)) for src in source.outcomes
    )
    return CoarseGraining(source, target, mapping)
