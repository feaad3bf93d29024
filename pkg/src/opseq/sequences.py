"""Timed outcome sequences and their series/parallel combination operators.

A sequence records the outcomes obtained in one experimental run. The series
operator concatenates two runs sharing an atomic boundary record; the parallel
operator merges two runs that differ in one interior outcome into the run with
the coarse-grained outcome. Construction is deliberately permissive so that
malformed sequences can be represented and diagnosed; ``validate`` reports
violations and the operators reject offending inputs.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable

from .errors import (
    BoundaryPositionError,
    JoinMismatchError,
    NonAtomicJoinError,
    OverlapError,
    SequenceValidationError,
    ShapeMismatchError,
)
from .outcomes import Measurement, Outcome, coarse_measurement

__all__ = [
    "SequenceRecord",
    "Sequence",
    "Violation",
    "record",
    "sequence",
    "validate",
    "require_valid",
    "series",
    "parallel",
    "atomic_branches",
    "parallel_all",
]

ANCHOR_NOT_ATOMIC = "anchor-not-atomic"
TIMES_NOT_INCREASING = "times-not-increasing"
OUTCOME_NOT_IN_MEASUREMENT = "outcome-not-in-measurement"
FINAL_NOT_ATOMIC = "final-not-atomic"
TOO_FEW_RECORDS = "too-few-records"

# Advisory: a non-atomic final is legal for attribution-only use and is only
# rejected by probability/amplitude queries.
_ADVISORY_RULES = frozenset({FINAL_NOT_ATOMIC})


@dataclass(frozen=True)
class Violation:
    rule: str
    index: int

    def __str__(self) -> str:
        return f"{self.rule}@{self.index}"


@dataclass(frozen=True)
class SequenceRecord:
    """One timed measurement outcome."""

    time: int
    measurement: Measurement
    outcome: Outcome


@dataclass(frozen=True)
class Sequence:
    """Time-ordered outcome records; the first record anchors the run."""

    records: tuple[SequenceRecord, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "records", tuple(self.records))

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i: int) -> SequenceRecord:
        return self.records[i]

    @property
    def anchor(self) -> SequenceRecord:
        return self.records[0]

    @property
    def final(self) -> SequenceRecord:
        return self.records[-1]

    @property
    def ticks(self) -> tuple[int, ...]:
        return tuple(r.time for r in self.records)


def record(time: int, measurement: Measurement, members: int | Iterable[int]) -> SequenceRecord:
    """Build a record; ``members`` may be a single atomic id or an iterable of ids."""
    if isinstance(members, int):
        members = {members}
    outcome = Outcome(frozenset(members), measurement.context_size)
    return SequenceRecord(int(time), measurement, outcome)


def sequence(*specs) -> Sequence:
    """Build a sequence from records or ``(time, measurement, members)`` tuples."""
    recs = [s if isinstance(s, SequenceRecord) else record(*s) for s in specs]
    return Sequence(tuple(recs))


def validate(s: Sequence) -> list[Violation]:
    """Diagnose well-formedness; empty list iff all sequence invariants hold.

    Violations name the offending record index and rule. They are returned,
    never thrown.
    """
    out: list[Violation] = []
    for i, r in enumerate(s.records):
        if r.outcome.context_size != r.measurement.context_size or r.outcome not in r.measurement:
            out.append(Violation(OUTCOME_NOT_IN_MEASUREMENT, i))
        if i and r.time <= s.records[i - 1].time:
            out.append(Violation(TIMES_NOT_INCREASING, i))
    if s.records and not s.records[0].outcome.is_atomic:
        out.append(Violation(ANCHOR_NOT_ATOMIC, 0))
    if len(s.records) >= 2 and not s.records[-1].outcome.is_atomic:
        out.append(Violation(FINAL_NOT_ATOMIC, len(s.records) - 1))
    return sorted(out, key=lambda v: (v.index, v.rule))


def require_valid(
    s: Sequence,
    *,
    strict_final: bool = False,
    min_records: int = 1,
    ignore: frozenset[str] = frozenset(),
) -> None:
    """Raise SequenceValidationError unless ``s`` is well-formed.

    Advisory rules are ignored unless ``strict_final`` is set (probability and
    amplitude queries additionally require an atomic final outcome and at
    least two records). ``ignore`` drops further rules that the caller checks
    itself.
    """
    violations = [
        v
        for v in validate(s)
        if (strict_final or v.rule not in _ADVISORY_RULES) and v.rule not in ignore
    ]
    if len(s.records) < min_records:
        violations.append(Violation(TOO_FEW_RECORDS, len(s.records)))
    if violations:
        raise SequenceValidationError(violations)


def series(a: Sequence, b: Sequence) -> Sequence:
    """Concatenate two runs sharing an atomic boundary record.

    The last record of ``a`` must equal the first record of ``b``; the shared
    record appears once in the result. The join outcome must be atomic, since
    only an atomic outcome re-anchors the second run.
    """
    require_valid(a)
    # The anchor of b is the join record; its atomicity is this operator's own
    # precondition, reported as NonAtomicJoinError below.
    require_valid(b, ignore=frozenset({ANCHOR_NOT_ATOMIC}))
    if not a.records or not b.records:
        raise JoinMismatchError("an empty sequence cannot be joined")
    join, head = a.records[-1], b.records[0]
    if join != head:
        raise JoinMismatchError(f"boundary records differ: {join} vs {head}")
    if not join.outcome.is_atomic:
        raise NonAtomicJoinError(f"join outcome {join.outcome} is not atomic")
    return Sequence(a.records + b.records[1:])


def parallel(c: Sequence, d: Sequence) -> Sequence:
    """Merge two runs differing at one interior record into the coarse-grained run.

    The differing records must share time, measurement label and context size,
    and their outcomes must be disjoint. The merged record carries the union
    outcome under the canonical coarse measurement (union block plus atomic
    blocks), which keeps iterated merges associative and commutative.
    """
    require_valid(c)
    require_valid(d)
    if len(c) != len(d):
        raise ShapeMismatchError(f"sequences have lengths {len(c)} and {len(d)}")
    candidates: list[int] = []
    for k, (rc, rd) in enumerate(zip(c.records, d.records)):
        if rc == rd:
            continue
        if (
            rc.time != rd.time
            or rc.measurement.label != rd.measurement.label
            or rc.measurement.context_size != rd.measurement.context_size
        ):
            raise ShapeMismatchError(f"records at position {k} differ beyond the combining outcome")
        candidates.append(k)
    if not candidates:
        raise OverlapError("sequences are identical; no disjoint outcomes to combine")
    if len(candidates) > 1:
        raise ShapeMismatchError(
            f"sequences differ at positions {candidates}; exactly one combining position is allowed"
        )
    i = candidates[0]
    if i == 0 or i == len(c) - 1:
        raise BoundaryPositionError(f"combining position {i} must be interior")
    rc, rd = c.records[i], d.records[i]
    if rc.outcome.members & rd.outcome.members:
        raise OverlapError(f"outcomes {rc.outcome} and {rd.outcome} overlap")
    ctx = rc.measurement.context_size
    union = rc.outcome.members | rd.outcome.members
    merged = SequenceRecord(
        rc.time,
        coarse_measurement(rc.measurement.label, ctx, union),
        Outcome(frozenset(union), ctx),
    )
    return Sequence(c.records[:i] + (merged,) + c.records[i + 1 :])


def atomic_branches(s: Sequence, index: int) -> list[Sequence]:
    """Runs with the record at ``index`` replaced by each atomic member of its outcome.

    Parallel-combining the branches of an interior record reproduces ``s`` when
    its measurement at that position is the canonical coarse-graining.
    """
    rec = s.records[index]
    ctx = rec.measurement.context_size
    branches = []
    for m in sorted(rec.outcome.members):
        meas = coarse_measurement(rec.measurement.label, ctx, {m})
        branch = SequenceRecord(rec.time, meas, Outcome(frozenset({m}), ctx))
        branches.append(Sequence(s.records[:index] + (branch,) + s.records[index + 1 :]))
    return branches


def parallel_all(branches: Iterable[Sequence]) -> Sequence:
    """Fold a family of runs with ``parallel``; inverse of ``atomic_branches``."""
    return reduce(parallel, branches)
