"""Predictive models assigning probabilities or amplitudes to outcome sequences.

Two families are provided. A classical model carries column-stochastic
transition matrices over the atomic outcomes, one per tick; non-atomic
outcomes are always evaluated by summing over their atomic refinements. A
quantum model is a finite Hilbert-space oracle: an orthonormal basis per
measurement label and a unitary step per tick. A sequence's amplitude is

    z = <final| U ... P ... U |anchor>

where each intermediate outcome contributes the projector onto the span of its
members' basis vectors. Representing a non-atomic outcome as the sum of its
members' rank-1 projectors makes amplitude additivity over parallel
combination a theorem of the oracle; the test suite demonstrates rather than
assumes it.

Evolution over multi-tick gaps is applied stepwise (one factor per tick), and
full-context outcome blocks short-circuit to the identity projector without a
basis lookup, so trivial single-outcome measurements need no bound basis and
their insertion leaves probabilities bit-identical.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import (
    BoundaryPositionError,
    DimensionMismatchError,
    StochasticityError,
    UnboundMeasurementError,
    UnitarityError,
)
from .outcomes import Measurement, Outcome, atomic_measurement
from .sequences import Sequence, SequenceRecord, parallel, require_valid, series

__all__ = [
    "Amplitude",
    "QuantumModel",
    "ClassicalModel",
    "CompositeModel",
    "amplitude",
    "probability",
    "series_product_check",
    "amplitude_sum_check",
    "composite_amplitude",
    "trivial_insertion_check",
    "split_joint_sequence",
    "TRIVIAL_LABEL",
]

ALGEBRAIC_ATOL = 1e-12
ACCUMULATED_ATOL = 1e-9

TRIVIAL_LABEL = "trivial"


@dataclass(frozen=True)
class Amplitude:
    """Complex number attached to a sequence; its squared modulus is the probability."""

    value: complex

    @property
    def probability(self) -> float:
        return abs(self.value) ** 2

    def __complex__(self) -> complex:
        return complex(self.value)


def _as_matrix(m, dim: int, what: str) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.shape != (dim, dim):
        raise DimensionMismatchError(f"{what}: expected shape ({dim}, {dim}), got {a.shape}")
    return a


def _check_unitary(u: np.ndarray, atol: float, what: str) -> None:
    gram = u.conj().T @ u
    dev = float(np.max(np.abs(gram - np.eye(u.shape[0]))))
    if dev > atol:
        raise UnitarityError(f"{what}: Gram deviation from identity {dev:.3e} exceeds {atol:g}")


class QuantumModel:
    """Hilbert-space oracle: per-label orthonormal bases and per-tick unitary steps.

    ``bases`` maps a measurement label to a (dim x dim) complex matrix whose
    columns are the basis vectors; ``unitaries`` maps tick k to the step
    applied between ticks k and k+1 (identity when absent). Immutable after
    construction; evaluation is pure.
    """

    def __init__(
        self,
        dim: int,
        bases: Mapping[str, np.ndarray],
        unitaries: Mapping[int, np.ndarray] | None = None,
        *,
        atol: float = ALGEBRAIC_ATOL,
    ) -> None:
        self.dim = int(dim)
        if self.dim < 1:
            raise ValueError(f"dimension must be >= 1, got {dim}")
        self.atol = float(atol)
        self.bases: dict[str, np.ndarray] = {}
        for label, b in bases.items():
            mat = _as_matrix(b, self.dim, f"basis {label!r}")
            _check_unitary(mat, self.atol, f"basis {label!r}")
            mat.setflags(write=False)
            self.bases[str(label)] = mat
        self.unitaries: dict[int, np.ndarray] = {}
        for tick, u in (unitaries or {}).items():
            mat = _as_matrix(u, self.dim, f"unitary at tick {tick}")
            _check_unitary(mat, self.atol, f"unitary at tick {tick}")
            mat.setflags(write=False)
            self.unitaries[int(tick)] = mat

    def basis_for(self, measurement: Measurement | str) -> np.ndarray:
        label = measurement if isinstance(measurement, str) else measurement.label
        if isinstance(measurement, Measurement) and measurement.context_size != self.dim:
            raise DimensionMismatchError(
                f"measurement {label!r} has context d={measurement.context_size}, model has d={self.dim}"
            )
        if label not in self.bases:
            raise UnboundMeasurementError(f"no basis bound for measurement {label!r}")
        return self.bases[label]

    def step(self, tick: int) -> np.ndarray:
        return self.unitaries.get(tick, np.eye(self.dim, dtype=complex))

    def evolve(self, psi: np.ndarray, t_from: int, t_to: int) -> np.ndarray:
        for k in range(t_from, t_to):
            if k in self.unitaries:
                psi = self.unitaries[k] @ psi
        return psi

    def _project(self, psi: np.ndarray, rec: SequenceRecord) -> np.ndarray:
        if rec.outcome.context_size != self.dim:
            raise DimensionMismatchError(
                f"outcome {rec.outcome} does not fit model dimension {self.dim}"
            )
        if rec.outcome.is_full:
            return psi  # identity projector, basis-independent
        b = self.basis_for(rec.measurement)
        cols = b[:, sorted(rec.outcome.members)]
        return cols @ (cols.conj().T @ psi)

    def amplitude(self, seq: Sequence) -> Amplitude:
        require_valid(seq, strict_final=True, min_records=2)
        recs = seq.records
        first = recs[0]
        if first.outcome.context_size != self.dim:
            raise DimensionMismatchError(
                f"anchor context d={first.outcome.context_size}, model has d={self.dim}"
            )
        psi = self.basis_for(first.measurement)[:, first.outcome.atomic_id].copy()
        for i in range(1, len(recs)):
            rec = recs[i]
            psi = self.evolve(psi, recs[i - 1].time, rec.time)
            if i < len(recs) - 1:
                psi = self._project(psi, rec)
            else:
                final_vec = self.basis_for(rec.measurement)[:, rec.outcome.atomic_id]
                return Amplitude(complex(np.vdot(final_vec, psi)))
        raise AssertionError("unreachable")

    def probability(self, seq: Sequence) -> float:
        return abs(self.amplitude(seq).value) ** 2


class ClassicalModel:
    """Stochastic model over atomic outcomes: one column-stochastic step per tick.

    ``transitions`` maps tick k to the matrix carrying the state distribution
    from tick k to k+1 (identity when absent). The probability of a sequence
    is the product of transition entries along its path, summed over the
    atomic refinements of every non-atomic intermediate outcome.
    """

    def __init__(
        self,
        dim: int,
        transitions: Mapping[int, np.ndarray] | None = None,
        *,
        atol: float = ALGEBRAIC_ATOL,
    ) -> None:
        self.dim = int(dim)
        if self.dim < 1:
            raise ValueError(f"dimension must be >= 1, got {dim}")
        self.atol = float(atol)
        self.transitions: dict[int, np.ndarray] = {}
        for tick, t in (transitions or {}).items():
            mat = np.asarray(t, dtype=float)
            if mat.shape != (self.dim, self.dim):
                raise DimensionMismatchError(
                    f"transition at tick {tick}: expected shape ({self.dim}, {self.dim}), got {mat.shape}"
                )
            if np.any(mat < -self.atol):
                raise StochasticityError(f"transition at tick {tick} has negative entries")
            sums = mat.sum(axis=0)
            dev = float(np.max(np.abs(sums - 1.0)))
            if dev > self.atol:
                raise StochasticityError(
                    f"transition at tick {tick}: column sums deviate from 1 by {dev:.3e}"
                )
            mat.setflags(write=False)
            self.transitions[int(tick)] = mat

    def step(self, tick: int) -> np.ndarray:
        return self.transitions.get(tick, np.eye(self.dim))

    def evolve(self, p: np.ndarray, t_from: int, t_to: int) -> np.ndarray:
        for k in range(t_from, t_to):
            if k in self.transitions:
                p = self.transitions[k] @ p
        return p

    def probability(self, seq: Sequence) -> float:
        require_valid(seq, strict_final=True, min_records=2)
        recs = seq.records
        if recs[0].outcome.context_size != self.dim:
            raise DimensionMismatchError(
                f"anchor context d={recs[0].outcome.context_size}, model has d={self.dim}"
            )
        p = np.zeros(self.dim)
        p[recs[0].outcome.atomic_id] = 1.0
        for i in range(1, len(recs)):
            rec = recs[i]
            if rec.outcome.context_size != self.dim:
                raise DimensionMismatchError(
                    f"outcome {rec.outcome} does not fit model dimension {self.dim}"
                )
            p = self.evolve(p, recs[i - 1].time, rec.time)
            if i < len(recs) - 1:
                if not rec.outcome.is_full:
                    keep = sorted(rec.outcome.members)
                    masked = np.zeros_like(p)
                    masked[keep] = p[keep]
                    p = masked
            else:
                return float(p[rec.outcome.atomic_id])
        raise AssertionError("unreachable")


class CompositeModel:
    """Two non-identical subsystems; joint evolution defaults to the tensor product.

    Joint outcome ids flatten subsystem pairs row-major: (i, j) -> i * d_B + j.
    Joint bases are tensor products of the subsystem bases sharing a label.
    Explicit ``joint_unitaries`` override the product step for their tick and
    mark the composite as interacting; the amplitude product rule is expected
    to hold only in the non-interacting case.
    """

    def __init__(
        self,
        part_a: QuantumModel,
        part_b: QuantumModel,
        joint_unitaries: Mapping[int, np.ndarray] | None = None,
        *,
        atol: float = ALGEBRAIC_ATOL,
    ) -> None:
        self.part_a = part_a
        self.part_b = part_b
        self.dim = part_a.dim * part_b.dim
        self.atol = float(atol)
        self.joint_unitaries: dict[int, np.ndarray] = {}
        for tick, u in (joint_unitaries or {}).items():
            mat = _as_matrix(u, self.dim, f"joint unitary at tick {tick}")
            _check_unitary(mat, self.atol, f"joint unitary at tick {tick}")
            mat.setflags(write=False)
            self.joint_unitaries[int(tick)] = mat
        self._joint: QuantumModel | None = None

    @property
    def dims(self) -> tuple[int, int]:
        return (self.part_a.dim, self.part_b.dim)

    @property
    def interacting(self) -> bool:
        return bool(self.joint_unitaries)

    def joint_model(self) -> QuantumModel:
        if self._joint is None:
            labels = sorted(set(self.part_a.bases) & set(self.part_b.bases))
            bases = {
                label: np.kron(self.part_a.bases[label], self.part_b.bases[label])
                for label in labels
            }
            ticks = (
                set(self.part_a.unitaries)
                | set(self.part_b.unitaries)
                | set(self.joint_unitaries)
            )
            unitaries = {
                k: self.joint_unitaries.get(
                    k, np.kron(self.part_a.step(k), self.part_b.step(k))
                )
                for k in ticks
            }
            self._joint = QuantumModel(self.dim, bases, unitaries, atol=self.atol)
        return self._joint

    def amplitude(self, seq: Sequence) -> Amplitude:
        return self.joint_model().amplitude(seq)

    def probability(self, seq: Sequence) -> float:
        return self.joint_model().probability(seq)


def amplitude(model: QuantumModel | CompositeModel, seq: Sequence) -> Amplitude:
    """Amplitude of ``seq`` under a quantum or composite model."""
    if not isinstance(model, (QuantumModel, CompositeModel)):
        raise TypeError(f"amplitudes are quantum; got {type(model).__name__}")
    return model.amplitude(seq)


def probability(model, seq: Sequence) -> float:
    """Probability of ``seq`` under any model; Born rule for quantum models."""
    if not isinstance(model, (QuantumModel, ClassicalModel, CompositeModel)):
        raise TypeError(f"unsupported model type {type(model).__name__}")
    return model.probability(seq)


def series_product_check(model, a: Sequence, b: Sequence) -> tuple[float, float]:
    """(P(a . b), P(a) * P(b)); the caller asserts the two agree."""
    lhs = probability(model, series(a, b))
    rhs = probability(model, a) * probability(model, b)
    return lhs, rhs


def amplitude_sum_check(
    model: QuantumModel | CompositeModel, c: Sequence, d: Sequence
) -> tuple[complex, complex]:
    """(z(c v d), z(c) + z(d)); the caller asserts the two agree."""
    z_parallel = complex(amplitude(model, parallel(c, d)).value)
    z_sum = complex(amplitude(model, c).value) + complex(amplitude(model, d).value)
    return z_parallel, z_sum


def composite_amplitude(cm: CompositeModel, seq: Sequence) -> Amplitude:
    """Amplitude of a joint-context sequence on the d_A * d_B dimensional oracle."""
    return cm.amplitude(seq)


def trivial_insertion_check(model, seq: Sequence, position: int) -> tuple[float, float]:
    """Probability before and after inserting a single-outcome measurement at ``position``.

    ``position`` must lie strictly between two existing ticks. The inserted
    measurement has the full context as its only block, so its projector is the
    identity and the caller expects both probabilities to agree.
    """
    p_before = probability(model, seq)
    ticks = seq.ticks
    if not any(lo < position < hi for lo, hi in zip(ticks, ticks[1:])):
        raise BoundaryPositionError(
            f"position {position} is not strictly between two ticks of {ticks}"
        )
    dim = model.dim
    trivial = Measurement(
        TRIVIAL_LABEL, dim, (Outcome(frozenset(range(dim)), dim),)
    )
    inserted = SequenceRecord(position, trivial, trivial.outcomes[0])
    recs = list(seq.records)
    at = next(i for i, r in enumerate(recs) if r.time > position)
    recs.insert(at, inserted)
    p_after = probability(model, Sequence(tuple(recs)))
    return p_before, p_after


def split_joint_sequence(seq: Sequence, dims: tuple[int, int]) -> tuple[Sequence, Sequence]:
    """Split a fully atomic joint sequence into its subsystem sequences.

    Each joint atomic id decodes row-major as (i, j) = divmod(id, d_B). Raises
    ValueError on non-atomic outcomes; the product rule only factorizes atomic
    joint outcomes.
    """
    d_a, d_b = dims
    recs_a, recs_b = [], []
    for rec in seq.records:
        if rec.outcome.context_size != d_a * d_b:
            raise DimensionMismatchError(
                f"joint outcome context d={rec.outcome.context_size}, expected {d_a * d_b}"
            )
        if not rec.outcome.is_atomic:
            raise ValueError(f"cannot split non-atomic joint outcome {rec.outcome}")
        i, j = divmod(rec.outcome.atomic_id, d_b)
        label = rec.measurement.label
        recs_a.append(
            SequenceRecord(rec.time, atomic_measurement(label, d_a), Outcome(frozenset({i}), d_a))
        )
        recs_b.append(
            SequenceRecord(rec.time, atomic_measurement(label, d_b), Outcome(frozenset({j}), d_b))
        )
    return Sequence(tuple(recs_a)), Sequence(tuple(recs_b))
