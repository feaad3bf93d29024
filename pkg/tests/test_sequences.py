import pytest
from hypothesis import given
from hypothesis import strategies as st

from opseq import (
    atomic_branches,
    atomic_measurement,
    coarse_measurement,
    parallel,
    parallel_all,
    record,
    sequence,
    series,
    validate,
)
from opseq.errors import (
    BoundaryPositionError,
    JoinMismatchError,
    NonAtomicJoinError,
    OverlapError,
    SequenceValidationError,
    ShapeMismatchError,
)

D = 3
M = atomic_measurement("M", D)
COARSE = coarse_measurement("M", D, {0, 1})


class TestSeries:
    def test_concatenates_on_shared_record(self):
        a = sequence((1, M, 0), (2, M, 1))
        b = sequence((2, M, 1), (3, M, 2))
        c = series(a, b)
        assert c.ticks == (1, 2, 3)
        assert [r.outcome.atomic_id for r in c] == [0, 1, 2]

    def test_single_record_tail_is_identity(self):
        a = sequence((1, M, 0), (2, M, 1))
        b = sequence((2, M, 1))
        assert series(a, b) == a

    def test_non_atomic_join_rejected(self):
        a = sequence((1, M, 0), (2, COARSE, {0, 1}))
        b = sequence((2, COARSE, {0, 1}), (3, M, 2))
        with pytest.raises(NonAtomicJoinError):
            series(a, b)

    def test_mismatched_boundary_rejected(self):
        a = sequence((1, M, 0), (2, M, 1))
        b = sequence((2, M, 2), (3, M, 0))
        with pytest.raises(JoinMismatchError):
            series(a, b)

    def test_invalid_input_rejected(self):
        bad = sequence((1, COARSE, {0, 1}), (2, M, 0))  # non-atomic anchor
        with pytest.raises(SequenceValidationError):
            series(bad, sequence((2, M, 0)))

    def test_associativity(self):
        a = sequence((1, M, 0), (2, M, 1))
        b = sequence((2, M, 1), (3, M, 0))
        c = sequence((3, M, 0), (4, M, 2))
        assert series(series(a, b), c) == series(a, series(b, c))


class TestParallel:
    def test_merges_disjoint_intermediate(self):
        c = sequence((1, M, 0), (2, M, 0), (3, M, 2))
        d = sequence((1, M, 0), (2, M, 1), (3, M, 2))
        e = parallel(c, d)
        assert e.records[1].outcome.members == frozenset({0, 1})
        assert e.records[1].measurement == coarse_measurement("M", D, {0, 1})
        assert e.records[0] == c.records[0]
        assert e.records[2] == c.records[2]

    def test_overlapping_outcomes_rejected(self):
        c = sequence((1, M, 0), (2, coarse_measurement("M", D, {0}), 0), (3, M, 2))
        d = sequence((1, M, 0), (2, COARSE, {0, 1}), (3, M, 2))
        with pytest.raises(OverlapError):
            parallel(c, d)

    def test_differing_anchor_rejected(self):
        c = sequence((1, M, 0), (2, M, 1), (3, M, 2))
        d = sequence((1, M, 1), (2, M, 0), (3, M, 2))
        with pytest.raises(ShapeMismatchError):
            parallel(c, d)

    def test_identical_sequences_rejected(self):
        c = sequence((1, M, 0), (2, M, 1), (3, M, 2))
        with pytest.raises(OverlapError):
            parallel(c, c)

    def test_boundary_difference_rejected(self):
        c = sequence((1, M, 0), (2, M, 1))
        d = sequence((1, M, 2), (2, M, 1))
        with pytest.raises(BoundaryPositionError):
            parallel(c, d)

    def test_length_mismatch_rejected(self):
        c = sequence((1, M, 0), (2, M, 1), (3, M, 2))
        d = sequence((1, M, 0), (2, M, 1))
        with pytest.raises(ShapeMismatchError):
            parallel(c, d)

    def test_commutativity(self):
        c = sequence((1, M, 0), (2, M, 0), (3, M, 2))
        d = sequence((1, M, 0), (2, M, 1), (3, M, 2))
        assert parallel(c, d) == parallel(d, c)

    def test_associativity_of_iterated_merges(self):
        base = [sequence((1, M, 0), (2, M, k), (3, M, 2)) for k in range(D)]
        left = parallel(parallel(base[0], base[1]), base[2])
        right = parallel(base[0], parallel(base[1], base[2]))
        assert left == right
        assert left.records[1].outcome.members == frozenset(range(D))

    def test_roundtrip_through_atomic_branches(self):
        coarse_seq = sequence((1, M, 0), (2, COARSE, {0, 1}), (3, M, 2))
        branches = atomic_branches(coarse_seq, 1)
        assert [b.records[1].outcome.atomic_id for b in branches] == [0, 1]
        assert parallel_all(branches) == coarse_seq


class TestValidate:
    def test_well_formed_is_clean(self):
        assert validate(sequence((1, M, 0), (2, M, 1), (3, M, 2))) == []

    def test_non_atomic_anchor_flagged(self):
        violations = validate(sequence((1, COARSE, {0, 1}), (2, M, 1)))
        assert [str(v) for v in violations] == ["anchor-not-atomic@0"]

    def test_times_not_increasing_flagged(self):
        violations = validate(sequence((2, M, 0), (1, M, 1)))
        assert [str(v) for v in violations] == ["times-not-increasing@1"]

    def test_outcome_not_in_measurement_flagged(self):
        # An outcome from another context is not a block of the measurement.
        from opseq import Outcome, Sequence, SequenceRecord

        mixed = Sequence(
            (record(1, M, 0), SequenceRecord(2, M, Outcome(frozenset({1}), 4)))
        )
        violations = validate(mixed)
        assert [str(v) for v in violations] == ["outcome-not-in-measurement@1"]

    def test_non_atomic_final_flagged_but_advisory(self):
        violations = validate(sequence((1, M, 0), (2, COARSE, {0, 1})))
        assert [str(v) for v in violations] == ["final-not-atomic@1"]


@st.composite
def chains(draw):
    length = draw(st.integers(min_value=2, max_value=4))
    ids = draw(st.lists(st.integers(0, D - 1), min_size=length, max_size=length))
    return sequence(*((t + 1, M, i) for t, i in enumerate(ids)))


class TestProperties:
    @given(chains(), st.integers(0, D - 1))
    def test_series_with_extension_preserves_prefix(self, chain, nxt):
        tail = sequence(chain.records[-1], (chain.records[-1].time + 1, M, nxt))
        combined = series(chain, tail)
        assert combined.records[: len(chain)] == chain.records
        assert combined.records[-1].outcome.atomic_id == nxt

    @given(chains())
    def test_roundtrip_any_interior_position(self, chain):
        if len(chain) < 3:
            return
        coarse_seq = sequence(
            chain.records[0],
            (chain.records[1].time, coarse_measurement("M", D, set(range(D))), set(range(D))),
            *chain.records[2:],
        )
        assert parallel_all(atomic_branches(coarse_seq, 1)) == coarse_seq
