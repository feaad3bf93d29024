"""Rule engine emitting timestamped actual/potential property ascriptions.

The rules differ sharply between regimes. In the quantum regime an atomic
outcome grounds a single actual instantaneous ascription and nothing else: no
evolutive property co-exists with an exactly valued instantaneous one, and no
retrodictive (pre-measurement) ascription is licensed. A non-atomic outcome
grounds the coarse value actually, every refinement potentially, and an
evolutive property whose existence is asserted but whose magnitude is not. In
the classical regime registrativity licenses matching pre-measurement
ascriptions, passivity licenses evolutive ones, a non-atomic outcome is read
existentially (the value is some member of the block), and an adjacent pair of
atomic readings fixes the evolutive value as a finite difference.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping

from .errors import SequenceValidationError, UnlabeledMeasurementError, ZeroIntervalError
from .outcomes import Outcome, refinements
from .sequences import ANCHOR_NOT_ATOMIC, FINAL_NOT_ATOMIC, Sequence, validate

__all__ = [
    "Modality",
    "Kind",
    "Side",
    "TimeTag",
    "ExistentialWithin",
    "Unvalued",
    "UNVALUED",
    "PropertyAscription",
    "AttributionInput",
    "EffectiveSpeed",
    "attribute",
    "attribute_composite",
    "effective_speed",
    "determinism_verdict",
    "ascription_record",
    "CLASSICAL",
    "QUANTUM",
    "ALL_SUBSETS",
    "ATOMIC_ONLY",
    "DETERMINISTIC_POSSIBLE",
    "INDETERMINISTIC",
]

CLASSICAL = "classical"
QUANTUM = "quantum"

ALL_SUBSETS = "all-subsets"
ATOMIC_ONLY = "atomic-only"

DETERMINISTIC_POSSIBLE = "deterministic_possible"
INDETERMINISTIC = "indeterministic"

EXTENDED_SIMPLE = "extended_simple"
EXTENDED_COMPLEX = "extended_complex"


class Modality(str, enum.Enum):
    ACTUAL = "actual"
    POTENTIAL = "potential"


class Kind(str, enum.Enum):
    ICP = "ICP"
    EVOLUTIVE = "evolutive"


class Side(str, enum.Enum):
    MINUS = "minus"
    PLUS = "plus"


@dataclass(frozen=True)
class TimeTag:
    tick: int
    side: Side


@dataclass(frozen=True)
class ExistentialWithin:
    """Classical reading of a non-atomic outcome: the value is some member of the block."""

    within: Outcome


class Unvalued:
    """Marker for a property asserted to exist without an assigned magnitude."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Unvalued"


UNVALUED = Unvalued()


@dataclass(frozen=True)
class PropertyAscription:
    subject: str
    time_tag: TimeTag
    property_type: str
    value: object
    modality: Modality
    kind: Kind
    tag: str | None = None


@dataclass(frozen=True)
class AttributionInput:
    """What the engine needs: regime, the run, and per-label property kinds.

    ``measurement_kinds`` maps each measurement label to the instantaneous
    property it measures (e.g. "position"). The registrative/passive flags
    apply in the classical regime only; the quantum rules ignore them.
    """

    regime: str
    sequence: Sequence
    measurement_kinds: Mapping[str, str]
    registrative: bool = True
    passive: bool = True


@dataclass(frozen=True)
class EffectiveSpeed:
    value: float


def _value_sort_key(value) -> tuple:
    if isinstance(value, Outcome):
        return (0, len(value.members), tuple(sorted(value.members)))
    if isinstance(value, ExistentialWithin):
        return (1, len(value.within.members), tuple(sorted(value.within.members)))
    if isinstance(value, (int, float)):
        return (2, float(value))
    return (3,)  # Unvalued


def _sort_key(a: PropertyAscription) -> tuple:
    return (
        a.time_tag.tick,
        a.time_tag.side.value,  # "minus" < "plus"
        a.kind.value,  # "ICP" < "evolutive"
        a.modality.value,  # "actual" < "potential"
        _value_sort_key(a.value),
    )


def _check_input(inp: AttributionInput) -> None:
    if inp.regime not in (CLASSICAL, QUANTUM):
        raise ValueError(f"unknown regime {inp.regime!r}")
    # Anchor and final atomicity are probability-query concerns; attribution
    # applies to any structurally sound run.
    structural = [
        v
        for v in validate(inp.sequence)
        if v.rule not in (ANCHOR_NOT_ATOMIC, FINAL_NOT_ATOMIC)
    ]
    if structural:
        raise SequenceValidationError(structural)
    for rec in inp.sequence:
        if rec.measurement.label not in inp.measurement_kinds:
            raise UnlabeledMeasurementError(
                f"measurement {rec.measurement.label!r} has no property kind"
            )


def _potential_values(o: Outcome, potentials: str) -> list[Outcome]:
    refined = refinements(o, include_improper=False)
    if potentials == ATOMIC_ONLY:
        return [r for r in refined if r.is_atomic]
    if potentials == ALL_SUBSETS:
        return refined
    raise ValueError(f"unknown potentials mode {potentials!r}")


def attribute(
    inp: AttributionInput,
    *,
    subject: str = "system",
    potentials: str = ALL_SUBSETS,
) -> list[PropertyAscription]:
    """Apply the attribution rules to every record; deterministic output order."""
    _check_input(inp)
    out: list[PropertyAscription] = []

    def emit(tick, side, ptype, value, modality, kind, tag=None):
        out.append(
            PropertyAscription(subject, TimeTag(tick, side), ptype, value, modality, kind, tag)
        )

    prev = None
    for rec in inp.sequence:
        ptype = inp.measurement_kinds[rec.measurement.label]
        o, t = rec.outcome, rec.time
        if inp.regime == QUANTUM:
            if o.is_atomic:
                emit(t, Side.PLUS, ptype, o, Modality.ACTUAL, Kind.ICP)
            else:
                emit(t, Side.PLUS, ptype, o, Modality.ACTUAL, Kind.ICP)
                for sub in _potential_values(o, potentials):
                    emit(t, Side.PLUS, ptype, sub, Modality.POTENTIAL, Kind.ICP)
                emit(t, Side.PLUS, ptype, UNVALUED, Modality.ACTUAL, Kind.EVOLUTIVE)
        else:
            icp_value = o if o.is_atomic else ExistentialWithin(o)
            emit(t, Side.PLUS, ptype, icp_value, Modality.ACTUAL, Kind.ICP)
            if inp.registrative:
                emit(t, Side.MINUS, ptype, icp_value, Modality.ACTUAL, Kind.ICP)
            if o.is_atomic:
                if (
                    inp.registrative
                    and inp.passive
                    and prev is not None
                    and prev.outcome.is_atomic
                    and inp.measurement_kinds[prev.measurement.label] == ptype
                    and t - prev.time == 1
                ):
                    rate = float(o.atomic_id - prev.outcome.atomic_id)
                    emit(t, Side.PLUS, ptype, rate, Modality.ACTUAL, Kind.EVOLUTIVE)
            elif inp.passive:
                emit(t, Side.PLUS, ptype, UNVALUED, Modality.ACTUAL, Kind.EVOLUTIVE)
        prev = rec
    return sorted(out, key=_sort_key)


def attribute_composite(
    inp: AttributionInput,
    *,
    dims: tuple[int, ...],
    subjects: tuple[str, ...] = ("A", "B"),
    potentials: str = ALL_SUBSETS,
) -> list[PropertyAscription]:
    """Attribution over a joint outcome context of one or two subjects.

    A non-atomic joint outcome is ascribed actually with a classification tag:
    a single subject extended over its context is an extended simple, two
    subjects jointly extended over the product context form an extended
    complex. Every nonempty strict subset of the outcome is ascribed
    potentially. Atomic joint outcomes are definite configurations and carry
    no tag and no potentials.
    """
    if len(dims) != len(subjects) or len(dims) not in (1, 2):
        raise ValueError("dims and subjects must both describe one or two subsystems")
    if inp.regime != QUANTUM:
        raise ValueError("composite attribution is defined for the quantum regime")
    _check_input(inp)
    joint_dim = 1
    for d in dims:
        joint_dim *= d
    subject = "+".join(subjects)
    tag = EXTENDED_SIMPLE if len(subjects) == 1 else EXTENDED_COMPLEX
    out: list[PropertyAscription] = []
    for rec in inp.sequence:
        if rec.outcome.context_size != joint_dim:
            raise ValueError(
                f"outcome context d={rec.outcome.context_size} does not match joint size {joint_dim}"
            )
        ptype = inp.measurement_kinds[rec.measurement.label]
        o, t = rec.outcome, rec.time
        if o.is_atomic:
            out.append(
                PropertyAscription(
                    subject, TimeTag(t, Side.PLUS), ptype, o, Modality.ACTUAL, Kind.ICP
                )
            )
        else:
            out.append(
                PropertyAscription(
                    subject, TimeTag(t, Side.PLUS), ptype, o, Modality.ACTUAL, Kind.ICP, tag
                )
            )
            for sub in _potential_values(o, potentials):
                out.append(
                    PropertyAscription(
                        subject, TimeTag(t, Side.PLUS), ptype, sub, Modality.POTENTIAL, Kind.ICP
                    )
                )
    return sorted(out, key=_sort_key)


def effective_speed(
    x: int | Outcome, x_prime: int | Outcome, dt_ticks: int, regime: str
) -> tuple[EffectiveSpeed, str]:
    """Displacement per tick between two exact localizations, with its reading.

    Classically the value measures the object's motion (an actual speed); in
    the quantum regime no evolutive property backs it, so it is only an
    effective speed.
    """
    if regime not in (CLASSICAL, QUANTUM):
        raise ValueError(f"unknown regime {regime!r}")
    if dt_ticks < 1:
        raise ZeroIntervalError(f"interval must be >= 1 tick, got {dt_ticks}")
    a = x.atomic_id if isinstance(x, Outcome) else int(x)
    b = x_prime.atomic_id if isinstance(x_prime, Outcome) else int(x_prime)
    value = (b - a) / dt_ticks
    reading = "actual_speed" if regime == CLASSICAL else "effective_speed"
    return EffectiveSpeed(float(value)), reading


def determinism_verdict(inp: AttributionInput) -> str:
    """Whether the run's initial data leaves room for deterministic prediction.

    A classical run containing an adjacent pair of atomic passive registrative
    readings of one property fixes both the value and its rate of change; a
    quantum run anchored in an exact reading severs that causal thread.
    """
    _check_input(inp)
    if inp.regime == QUANTUM:
        return INDETERMINISTIC
    if inp.registrative and inp.passive:
        recs = inp.sequence.records
        for prev, cur in zip(recs, recs[1:]):
            if (
                prev.outcome.is_atomic
                and cur.outcome.is_atomic
                and cur.time - prev.time == 1
                and inp.measurement_kinds[prev.measurement.label]
                == inp.measurement_kinds[cur.measurement.label]
            ):
                return DETERMINISTIC_POSSIBLE
    return INDETERMINISTIC


def _value_record(value) -> object:
    if isinstance(value, Outcome):
        return {"members": sorted(value.members)}
    if isinstance(value, ExistentialWithin):
        return {"existential_within": sorted(value.within.members)}
    if isinstance(value, Unvalued):
        return "unvalued"
    return float(value)


def ascription_record(a: PropertyAscription) -> dict:
    """Canonical JSON-able form of an ascription (stable across runs)."""
    rec = {
        "subject": a.subject,
        "tick": a.time_tag.tick,
        "side": a.time_tag.side.value,
        "property_type": a.property_type,
        "value": _value_record(a.value),
        "modality": a.modality.value,
        "kind": a.kind.value,
    }
    if a.tag is not None:
        rec["tag"] = a.tag
    return rec
