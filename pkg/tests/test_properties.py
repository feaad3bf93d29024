import json
import pathlib

import numpy as np
import pytest

from opseq import Outcome, atomic_measurement, coarse_measurement, sequence
from opseq.errors import SequenceValidationError, UnlabeledMeasurementError, ZeroIntervalError
from opseq.properties import (
    ALL_SUBSETS,
    ATOMIC_ONLY,
    CLASSICAL,
    DETERMINISTIC_POSSIBLE,
    INDETERMINISTIC,
    QUANTUM,
    AttributionInput,
    Kind,
    Modality,
    Side,
    ascription_record,
    attribute,
    attribute_composite,
    determinism_verdict,
    effective_speed,
)

GOLDENS = pathlib.Path(__file__).parent / "goldens"

CELL = atomic_measurement("cell", 12)
KINDS = {"cell": "position"}


def golden(name):
    return json.loads((GOLDENS / f"{name}.json").read_text())["expected"]


def records(ascriptions):
    return [ascription_record(a) for a in ascriptions]


class TestGoldens:
    def test_classical_atomic_pair(self):
        inp = AttributionInput(CLASSICAL, sequence((1, CELL, 2), (2, CELL, 5)), KINDS)
        assert records(attribute(inp)) == golden("classical_atomic_pair")

    def test_classical_nonatomic(self):
        region = coarse_measurement("cell", 12, {4, 5, 6})
        inp = AttributionInput(CLASSICAL, sequence((1, region, {4, 5, 6})), KINDS)
        assert records(attribute(inp)) == golden("classical_nonatomic")

    def test_quantum_atomic(self):
        inp = AttributionInput(QUANTUM, sequence((1, CELL, 4)), KINDS)
        assert records(attribute(inp)) == golden("quantum_atomic")

    def test_quantum_nonatomic(self):
        region = coarse_measurement("cell", 12, {4, 5})
        inp = AttributionInput(QUANTUM, sequence((1, region, {4, 5})), KINDS)
        assert records(attribute(inp)) == golden("quantum_nonatomic")

    def test_composite_antisym(self):
        joint = coarse_measurement("jointpos", 4, {1, 2})
        inp = AttributionInput(QUANTUM, sequence((1, joint, {1, 2})), {"jointpos": "position"})
        got = attribute_composite(inp, dims=(2, 2), subjects=("A", "B"))
        assert records(got) == golden("composite_antisym")

    def test_composite_single_region(self):
        region = coarse_measurement("region", 12, {4, 5})
        inp = AttributionInput(QUANTUM, sequence((1, region, {4, 5})), {"region": "position"})
        got = attribute_composite(inp, dims=(12,), subjects=("A",))
        assert records(got) == golden("composite_single_region")


class TestQuantumRules:
    def test_no_retrodiction(self):
        inp = AttributionInput(QUANTUM, sequence((1, CELL, 3), (2, CELL, 4)), KINDS)
        assert all(a.time_tag.side is Side.PLUS for a in attribute(inp))

    def test_exclusivity_by_construction(self):
        region = coarse_measurement("cell", 12, {2, 3, 4})
        seq = sequence((1, CELL, 2), (2, region, {2, 3, 4}), (3, CELL, 4))
        out = attribute(AttributionInput(QUANTUM, seq, KINDS))
        evolutive_tags = {a.time_tag for a in out if a.kind is Kind.EVOLUTIVE}
        exact_tags = {
            a.time_tag
            for a in out
            if a.kind is Kind.ICP and a.modality is Modality.ACTUAL and a.value.is_atomic
        }
        assert not (evolutive_tags & exact_tags)

    def test_potential_set_is_all_refinements(self):
        region = coarse_measurement("cell", 12, {1, 2, 3})
        out = attribute(AttributionInput(QUANTUM, sequence((1, region, {1, 2, 3})), KINDS))
        potentials = [a for a in out if a.modality is Modality.POTENTIAL]
        assert len(potentials) == 2**3 - 2
        assert {frozenset(a.value.members) for a in potentials} == {
            frozenset(s) for s in ({1}, {2}, {3}, {1, 2}, {1, 3}, {2, 3})
        }

    def test_atomic_only_mode(self):
        region = coarse_measurement("cell", 12, {1, 2, 3})
        out = attribute(
            AttributionInput(QUANTUM, sequence((1, region, {1, 2, 3})), KINDS),
            potentials=ATOMIC_ONLY,
        )
        potentials = [a for a in out if a.modality is Modality.POTENTIAL]
        assert [sorted(a.value.members) for a in potentials] == [[1], [2], [3]]

    def test_flags_ignored(self):
        seq = sequence((1, CELL, 3))
        base = attribute(AttributionInput(QUANTUM, seq, KINDS))
        off = attribute(AttributionInput(QUANTUM, seq, KINDS, registrative=False, passive=False))
        assert base == off


class TestClassicalRules:
    def test_never_potential(self):
        region = coarse_measurement("cell", 12, {2, 3})
        seq = sequence((1, CELL, 2), (2, region, {2, 3}), (3, CELL, 3))
        out = attribute(AttributionInput(CLASSICAL, seq, KINDS))
        assert all(a.modality is Modality.ACTUAL for a in out)

    def test_registrative_gives_matching_sides(self):
        seq = sequence((1, CELL, 2), (2, CELL, 5))
        out = attribute(AttributionInput(CLASSICAL, seq, KINDS))
        icp = [a for a in out if a.kind is Kind.ICP]
        minus = {(a.time_tag.tick, str(a.value)) for a in icp if a.time_tag.side is Side.MINUS}
        plus = {(a.time_tag.tick, str(a.value)) for a in icp if a.time_tag.side is Side.PLUS}
        assert minus == plus

    def test_non_registrative_drops_retrodiction_and_rate(self):
        seq = sequence((1, CELL, 2), (2, CELL, 5))
        out = attribute(AttributionInput(CLASSICAL, seq, KINDS, registrative=False))
        assert all(a.time_tag.side is Side.PLUS for a in out)
        assert all(a.kind is Kind.ICP for a in out)

    def test_rate_requires_adjacent_ticks(self):
        seq = sequence((1, CELL, 2), (3, CELL, 5))
        out = attribute(AttributionInput(CLASSICAL, seq, KINDS))
        assert all(a.kind is Kind.ICP for a in out)

    def test_rate_requires_same_property(self):
        other = atomic_measurement("gauge", 12)
        seq = sequence((1, CELL, 2), (2, other, 5))
        out = attribute(
            AttributionInput(CLASSICAL, seq, {"cell": "position", "gauge": "charge"})
        )
        assert all(a.kind is Kind.ICP for a in out)

    def test_rate_sign(self):
        seq = sequence((1, CELL, 7), (2, CELL, 4))
        out = attribute(AttributionInput(CLASSICAL, seq, KINDS))
        rates = [a.value for a in out if a.kind is Kind.EVOLUTIVE]
        assert rates == [-3.0]


class TestCompositeRules:
    def test_atomic_joint_outcome_actual_only(self):
        joint = atomic_measurement("jointpos", 4)
        inp = AttributionInput(QUANTUM, sequence((1, joint, 1)), {"jointpos": "position"})
        out = attribute_composite(inp, dims=(2, 2))
        assert len(out) == 1
        assert out[0].modality is Modality.ACTUAL
        assert out[0].tag is None

    def test_classical_regime_rejected(self):
        joint = atomic_measurement("jointpos", 4)
        inp = AttributionInput(CLASSICAL, sequence((1, joint, 1)), {"jointpos": "position"})
        with pytest.raises(ValueError):
            attribute_composite(inp, dims=(2, 2))

    def test_dims_must_match_context(self):
        joint = atomic_measurement("jointpos", 4)
        inp = AttributionInput(QUANTUM, sequence((1, joint, 1)), {"jointpos": "position"})
        with pytest.raises(ValueError):
            attribute_composite(inp, dims=(2, 3))


class TestEffectiveSpeed:
    def test_classical_reading(self):
        speed, reading = effective_speed(0, 3, 1, CLASSICAL)
        assert (speed.value, reading) == (3.0, "actual_speed")

    def test_quantum_reading(self):
        speed, reading = effective_speed(0, 3, 1, QUANTUM)
        assert (speed.value, reading) == (3.0, "effective_speed")

    def test_no_displacement(self):
        speed, reading = effective_speed(2, 2, 2, QUANTUM)
        assert speed.value == 0.0

    def test_outcome_arguments(self):
        speed, _ = effective_speed(Outcome(frozenset({1}), 12), Outcome(frozenset({7}), 12), 2, CLASSICAL)
        assert speed.value == 3.0

    def test_zero_interval(self):
        with pytest.raises(ZeroIntervalError):
            effective_speed(0, 3, 0, CLASSICAL)


class TestDeterminismVerdict:
    def test_classical_paired_readings(self):
        inp = AttributionInput(CLASSICAL, sequence((1, CELL, 2), (2, CELL, 5)), KINDS)
        assert determinism_verdict(inp) == DETERMINISTIC_POSSIBLE

    def test_quantum_always_indeterministic(self):
        inp = AttributionInput(QUANTUM, sequence((1, CELL, 2), (2, CELL, 5)), KINDS)
        assert determinism_verdict(inp) == INDETERMINISTIC

    def test_classical_single_reading(self):
        inp = AttributionInput(CLASSICAL, sequence((1, CELL, 2)), KINDS)
        assert determinism_verdict(inp) == INDETERMINISTIC

    def test_classical_gap_insufficient(self):
        inp = AttributionInput(CLASSICAL, sequence((1, CELL, 2), (4, CELL, 5)), KINDS)
        assert determinism_verdict(inp) == INDETERMINISTIC


class TestInputChecking:
    def test_unlabeled_measurement(self):
        with pytest.raises(UnlabeledMeasurementError):
            attribute(AttributionInput(QUANTUM, sequence((1, CELL, 2)), {}))

    def test_unknown_regime(self):
        with pytest.raises(ValueError):
            attribute(AttributionInput("romantic", sequence((1, CELL, 2)), KINDS))

    def test_structural_violations_rejected(self):
        bad = sequence((2, CELL, 0), (1, CELL, 1))
        with pytest.raises(SequenceValidationError):
            attribute(AttributionInput(QUANTUM, bad, KINDS))

    def test_non_atomic_anchor_allowed_for_attribution(self):
        region = coarse_measurement("cell", 12, {4, 5})
        out = attribute(AttributionInput(QUANTUM, sequence((1, region, {4, 5})), KINDS))
        assert out  # no exception raised


class TestRandomizedInvariants:
    def test_exclusivity_and_completeness_over_random_inputs(self):
        rng = np.random.default_rng(987)
        for _ in range(300):
            d = int(rng.integers(2, 7))
            length = int(rng.integers(1, 5))
            meas = atomic_measurement("m", d)
            recs = []
            tick = 1
            for _ in range(length):
                size = int(rng.integers(1, d + 1))
                members = set(rng.permutation(d)[:size].tolist())
                recs.append((tick, coarse_measurement("m", d, members), members))
                tick += int(rng.integers(1, 3))
            seq = sequence(*recs)
            out = attribute(AttributionInput(QUANTUM, seq, {"m": "position"}))
            evolutive_tags = {a.time_tag for a in out if a.kind is Kind.EVOLUTIVE}
            exact_tags = {
                a.time_tag
                for a in out
                if a.kind is Kind.ICP and a.modality is Modality.ACTUAL and a.value.is_atomic
            }
            assert not (evolutive_tags & exact_tags)
            for rec in seq:
                if not rec.outcome.is_atomic:
                    n = len(rec.outcome.members)
                    count = sum(
                        1
                        for a in out
                        if a.modality is Modality.POTENTIAL and a.time_tag.tick == rec.time
                    )
                    assert count == 2**n - 2
