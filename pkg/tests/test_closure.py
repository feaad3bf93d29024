import math

import numpy as np
import pytest

from helpers import random_classical_model, random_quantum_model

from opseq import ClassicalModel, Outcome, QuantumModel, atomic_measurement, coarse_measurement
from opseq.closure import (
    ClosureReport,
    check_closure,
    check_refinement_condition,
    check_repeatability,
    forbidden_interaction_demo,
    random_prior_stochastics,
    random_prior_unitaries,
)
from opseq.errors import DimensionMismatchError, SubsetError, UnboundMeasurementError
from opseq.generators import sg_basis


def o(members, d):
    return Outcome(frozenset(members), d)


class TestRepeatability:
    def test_quantum_atomic_immediate(self):
        q = QuantumModel(2, {"SG": sg_basis(0.4, 1.1)})
        assert check_repeatability(q, atomic_measurement("SG", 2)) >= 1 - 1e-12

    def test_quantum_coarse_projector_idempotent(self):
        rng = np.random.default_rng(5)
        for d in (3, 4, 5):
            q = random_quantum_model(rng, d, labels=("M",), ticks=())
            m = coarse_measurement("M", d, {0, 1})
            assert check_repeatability(q, m) >= 1 - 1e-12

    def test_classical_identity_transition(self):
        c = ClassicalModel(4)
        m = coarse_measurement("state", 4, {1, 2})
        assert check_repeatability(c, m) >= 1 - 1e-12

    def test_delta_ticks_with_identity_evolution(self):
        q = QuantumModel(2, {"SG": sg_basis(0.9)})
        assert check_repeatability(q, atomic_measurement("SG", 2), delta_ticks=3) >= 1 - 1e-12
        with pytest.raises(ValueError):
            check_repeatability(q, atomic_measurement("SG", 2), delta_ticks=-1)

    def test_dimension_mismatch(self):
        q = QuantumModel(2, {"SG": np.eye(2)})
        with pytest.raises(DimensionMismatchError):
            check_repeatability(q, atomic_measurement("SG", 3))


class TestRefinementCondition:
    def test_atomic_within_pair(self):
        q = QuantumModel(3, {"pos": np.eye(3)})
        assert check_refinement_condition(q, o({0, 1}, 3), o({0}, 3))

    def test_subset_violation(self):
        q = QuantumModel(3, {"pos": np.eye(3)})
        with pytest.raises(SubsetError):
            check_refinement_condition(q, o({1}, 3), o({0}, 3))

    def test_full_context_absorbs(self):
        q = QuantumModel(3, {"pos": np.eye(3)})
        assert check_refinement_condition(q, o({0, 1, 2}, 3), o({2}, 3))

    def test_classical(self):
        c = ClassicalModel(4)
        assert check_refinement_condition(c, o({1, 2, 3}, 4), o({2}, 4))

    def test_fine_must_be_atomic(self):
        q = QuantumModel(3, {"pos": np.eye(3)})
        with pytest.raises(ValueError):
            check_refinement_condition(q, o({0, 1, 2}, 3), o({0, 1}, 3))

    def test_label_required_when_ambiguous(self):
        q = QuantumModel(3, {"a": np.eye(3), "b": np.eye(3)})
        with pytest.raises(UnboundMeasurementError):
            check_refinement_condition(q, o({0, 1}, 3), o({0}, 3))
        assert check_refinement_condition(q, o({0, 1}, 3), o({0}, 3), label="b")


class TestCheckClosure:
    def test_atomic_preparation_is_prior_independent(self):
        rng = np.random.default_rng(7)
        for d in (2, 3, 4):
            q = random_quantum_model(rng, d, labels=("prep", "probe"), ticks=(0,))
            prep_meas = atomic_measurement("prep", d)
            probe = atomic_measurement("probe", d)
            priors = random_prior_unitaries(d, 25, seed=13 + d)
            report = check_closure(q, (prep_meas, prep_meas.outcomes[0]), probe, priors, seed=13 + d)
            assert report.max_deviation <= 1e-12
            assert report.maintained()
            assert report.seed == 13 + d
            assert len(report.witnesses) == 25

    def test_non_atomic_preparation_fails_closure(self):
        # d=3, prepare on the {0,1} pair, probe in a basis mixing those axes;
        # a swap of the first two axes before preparation shifts the probe
        # statistics by |cos(pi/4)| in total variation.
        theta = math.pi / 8
        probe_basis = np.eye(3, dtype=complex)
        probe_basis[:2, :2] = [[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]]
        q = QuantumModel(3, {"pos": np.eye(3), "probe": probe_basis})
        prep = coarse_measurement("pos", 3, {0, 1})
        swap = np.eye(3)[[1, 0, 2]]
        report = check_closure(
            q, (prep, o({0, 1}, 3)), atomic_measurement("probe", 3), [swap]
        )
        assert report.max_deviation > 0.01

    def test_classical_atomic_preparation_exact(self):
        rng = np.random.default_rng(8)
        c = random_classical_model(rng, 4, ticks=(0,))
        prep = atomic_measurement("state", 4)
        priors = random_prior_stochastics(4, 20, seed=3)
        report = check_closure(c, (prep, prep.outcomes[0]), prep, priors)
        assert report.max_deviation == 0.0

    def test_witnesses_sorted_descending(self):
        report = ClosureReport(
            preparation=(atomic_measurement("m", 2), o({0}, 2)),
            probe=atomic_measurement("m", 2),
            max_deviation=0.5,
            witnesses=(("a", 0.1), ("b", 0.5), ("c", 0.3)),
        )
        assert [w[0] for w in report.witnesses] == ["b", "c", "a"]

    def test_named_priors(self):
        q = QuantumModel(2, {"m": np.eye(2)})
        prep = atomic_measurement("m", 2)
        report = check_closure(
            q, (prep, prep.outcomes[0]), prep, {"flip": np.array([[0, 1], [1, 0]])}
        )
        assert report.witnesses[0][0] == "flip"


class TestForbiddenInteractionDemo:
    def test_basis_rotation_maintains_closure(self):
        q = QuantumModel(2, {"SG": np.eye(2)})
        report = forbidden_interaction_demo(q, sg_basis(0.8), trials=40, seed=2)
        assert report.maintained(1e-12)

    def test_identity_maintains_closure(self):
        q = QuantumModel(2, {"SG": np.eye(2)})
        report = forbidden_interaction_demo(q, np.eye(2), trials=40, seed=2)
        assert report.maintained(1e-12)

    def test_ancilla_coupling_breaks_closure(self):
        q = QuantumModel(2, {"SG": np.eye(2)})
        # Ancilla-controlled flip of the system: joint index = sys * 2 + anc,
        # swapping (0,1) <-> (1,1).
        coupling = np.eye(4)[[0, 3, 2, 1]]
        report = forbidden_interaction_demo(q, coupling, trials=60, seed=4)
        assert report.max_deviation > 0.01

    def test_classical_interaction(self):
        c = ClassicalModel(2)
        mixer = np.array([[0.5, 0.5], [0.5, 0.5]])
        report = forbidden_interaction_demo(c, mixer, trials=20, seed=9)
        assert report.maintained(1e-12)

    def test_shape_checked(self):
        q = QuantumModel(2, {"SG": np.eye(2)})
        with pytest.raises(DimensionMismatchError):
            forbidden_interaction_demo(q, np.eye(3))


class TestRandomPriors:
    def test_unitaries_are_unitary_and_seeded(self):
        a = random_prior_unitaries(4, 5, seed=42)
        b = random_prior_unitaries(4, 5, seed=42)
        for u, v in zip(a, b):
            assert np.array_equal(u, v)
            assert np.max(np.abs(u.conj().T @ u - np.eye(4))) < 1e-12

    def test_stochastics_are_stochastic(self):
        for t in random_prior_stochastics(4, 5, seed=42):
            assert np.allclose(t.sum(axis=0), 1.0)
            assert np.all(t >= 0)
