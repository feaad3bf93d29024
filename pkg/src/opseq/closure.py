"""Empirical checkers for repeatability, refinement conditions, and causal closure.

Closure of a preparation means that all post-preparation outcome statistics
are independent of interactions with the system before the preparation. The
paper-level quantifier "for all pre-preparation interactions" is
operationalized here as a sweep: a fixed fiducial input state is transformed
by a family of prior interactions (explicit matrices or a seeded Haar-random
sample), and the worst-case total-variation distance of the probe distribution
from the unperturbed baseline is reported. All checks run on exact model
probabilities, never on sampled data.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, SubsetError, UnboundMeasurementError
from .models import ClassicalModel, QuantumModel
from .outcomes import Measurement, Outcome, atomic_measurement, coarse_measurement
from .sequences import sequence

__all__ = [
    "ClosureReport",
    "check_repeatability",
    "check_refinement_condition",
    "check_closure",
    "forbidden_interaction_demo",
    "random_prior_unitaries",
    "random_prior_stochastics",
]

DEFAULT_CLOSURE_TOL = 1e-9


@dataclass(frozen=True)
class ClosureReport:
    """Worst-case deviation of post-preparation statistics across prior interactions.

    ``witnesses`` pairs each prior interaction id with its total-variation
    distance from the unperturbed baseline, sorted by descending distance.
    """

    preparation: tuple[Measurement, Outcome]
    probe: Measurement
    max_deviation: float
    witnesses: tuple[tuple[str, float], ...]
    seed: int | None = None

    def maintained(self, tol: float = DEFAULT_CLOSURE_TOL) -> bool:
        return self.max_deviation <= tol

    def __post_init__(self) -> None:
        ordered = tuple(sorted(self.witnesses, key=lambda w: (-w[1], w[0])))
        object.__setattr__(self, "witnesses", ordered)


def random_prior_unitaries(dim: int, count: int, seed: int) -> list[np.ndarray]:
    """Seeded Haar-random unitaries (QR of a complex Gaussian with phase fixing)."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        q, r = np.linalg.qr(z)
        phases = np.diag(r).copy()
        phases /= np.abs(phases)
        out.append(q * phases)
    return out


def random_prior_stochastics(dim: int, count: int, seed: int) -> list[np.ndarray]:
    """Seeded random column-stochastic matrices (Dirichlet columns)."""
    rng = np.random.default_rng(seed)
    return [rng.dirichlet(np.ones(dim), size=dim).T for _ in range(count)]


def _fiducial_state(model: QuantumModel, prep_measurement: Measurement) -> np.ndarray:
    # Fixed reference state with nonzero overlap with every basis vector of the
    # preparation, so the preparation filter never annihilates it.
    b = model.basis_for(prep_measurement)
    weights = 1.0 + np.arange(model.dim) / model.dim
    psi = b @ weights.astype(complex)
    return psi / np.linalg.norm(psi)


def _quantum_probe_distribution(
    model: QuantumModel, psi: np.ndarray, probe: Measurement
) -> np.ndarray:
    b = model.basis_for(probe)
    per_vector = np.abs(b.conj().T @ psi) ** 2
    return np.array([per_vector[sorted(o.members)].sum() for o in probe.outcomes])


def _classical_probe_distribution(p: np.ndarray, probe: Measurement) -> np.ndarray:
    return np.array([p[sorted(o.members)].sum() for o in probe.outcomes])


def _total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(p - q).sum())


def check_repeatability(model, m: Measurement, delta_ticks: int = 0) -> float:
    """Minimum over outcomes of P(same outcome on repetition after ``delta_ticks``).

    Identity evolution is inserted over the gap, so the result is 1 for every
    valid model regardless of ``delta_ticks``; the parameter exists to make the
    limiting statement explicit.
    """
    if delta_ticks < 0:
        raise ValueError("delta_ticks must be >= 0")
    worst = 1.0
    if isinstance(model, ClassicalModel):
        if m.context_size != model.dim:
            raise DimensionMismatchError(
                f"measurement {m.label!r} has d={m.context_size}, model has d={model.dim}"
            )
        uniform = np.full(model.dim, 1.0 / model.dim)
        for o in m.outcomes:
            keep = sorted(o.members)
            masked = np.zeros(model.dim)
            masked[keep] = uniform[keep]
            masked /= masked.sum()
            worst = min(worst, float(masked[keep].sum()))
        return worst
    if not isinstance(model, QuantumModel):
        raise TypeError(f"unsupported model type {type(model).__name__}")
    if m.context_size != model.dim:
        raise DimensionMismatchError(
            f"measurement {m.label!r} has d={m.context_size}, model has d={model.dim}"
        )
    psi0 = _fiducial_state(model, m)
    b = model.basis_for(m)
    for o in m.outcomes:
        cols = b[:, sorted(o.members)]
        projected = cols @ (cols.conj().T @ psi0)
        projected /= np.linalg.norm(projected)
        repeat = float(np.linalg.norm(cols.conj().T @ projected) ** 2)
        worst = min(worst, repeat)
    return worst


def check_refinement_condition(
    model,
    coarse: Outcome,
    fine: Outcome,
    label: str | None = None,
    tol: float = DEFAULT_CLOSURE_TOL,
) -> bool:
    """True iff obtaining ``coarse`` in between leaves the repetition of ``fine`` intact.

    Compares P(fine -> coarse -> fine) with P(fine -> fine) under identity
    evolution. ``fine`` must be an atomic subset of ``coarse``. For quantum
    models the measurement context is picked by ``label`` (defaulting to the
    model's sole bound basis).
    """
    if not fine.is_atomic:
        raise ValueError(f"fine outcome {fine} must be atomic")
    if not fine.members <= coarse.members:
        raise SubsetError(f"{fine} is not a subset of {coarse}")
    d = coarse.context_size
    if fine.context_size != d:
        raise SubsetError(f"{fine} and {coarse} live in different contexts")
    if isinstance(model, QuantumModel):
        if label is None:
            if len(model.bases) != 1:
                raise UnboundMeasurementError(
                    "several bases are bound; pass the measurement label explicitly"
                )
            label = next(iter(model.bases))
        fine_meas = atomic_measurement(label, d)
        coarse_meas = coarse_measurement(label, d, coarse.members)
    else:
        fine_meas = atomic_measurement("state", d)
        coarse_meas = coarse_measurement("state", d, coarse.members)
    fid = fine.atomic_id
    with_coarse = sequence(
        (0, fine_meas, fid), (1, coarse_meas, set(coarse.members)), (2, fine_meas, fid)
    )
    without = sequence((0, fine_meas, fid), (2, fine_meas, fid))
    p_with = model.probability(with_coarse)
    p_without = model.probability(without)
    return abs(p_with - p_without) <= tol


def check_closure(
    model,
    prep: tuple[Measurement, Outcome],
    probe: Measurement,
    priors,
    *,
    seed: int | None = None,
) -> ClosureReport:
    """Sweep prior interactions and report the worst probe-distribution deviation.

    The fiducial input is transformed by each prior, filtered on the
    preparation outcome, evolved by the model's step at tick 0, and measured by
    ``probe``; deviations are total-variation distances from the identity-prior
    baseline. ``priors`` is a list of matrices or a mapping id -> matrix.
    """
    prep_meas, prep_outcome = prep
    named = list(priors.items()) if hasattr(priors, "items") else [
        (str(i), m) for i, m in enumerate(priors)
    ]
    if isinstance(model, QuantumModel):
        distribution = _make_quantum_closure_distribution(model, prep_meas, prep_outcome, probe)
    elif isinstance(model, ClassicalModel):
        distribution = _make_classical_closure_distribution(model, prep_meas, prep_outcome, probe)
    else:
        raise TypeError(f"unsupported model type {type(model).__name__}")
    baseline = distribution(None)
    witnesses = []
    for name, prior in named:
        dist = distribution(np.asarray(prior))
        if dist is None:
            continue  # preparation cannot succeed under this prior
        witnesses.append((name, _total_variation(dist, baseline)))
    max_dev = max((w[1] for w in witnesses), default=0.0)
    return ClosureReport(
        preparation=(prep_meas, prep_outcome),
        probe=probe,
        max_deviation=max_dev,
        witnesses=tuple(witnesses),
        seed=seed,
    )


def _make_quantum_closure_distribution(model, prep_meas, prep_outcome, probe):
    b_prep = model.basis_for(prep_meas)
    cols = b_prep[:, sorted(prep_outcome.members)]
    psi0 = _fiducial_state(model, prep_meas)
    step = model.step(0)

    def distribution(prior):
        psi = psi0 if prior is None else prior @ psi0
        filtered = cols @ (cols.conj().T @ psi)
        norm = np.linalg.norm(filtered)
        if norm < 1e-15:
            return None
        return _quantum_probe_distribution(model, step @ (filtered / norm), probe)

    return distribution


def _make_classical_closure_distribution(model, prep_meas, prep_outcome, probe):
    keep = sorted(prep_outcome.members)
    uniform = np.full(model.dim, 1.0 / model.dim)
    step = model.step(0)

    def distribution(prior):
        p = uniform if prior is None else prior @ uniform
        masked = np.zeros(model.dim)
        masked[keep] = p[keep]
        total = masked.sum()
        if total < 1e-15:
            return None
        return _classical_probe_distribution(step @ (masked / total), probe)

    return distribution


def forbidden_interaction_demo(
    model,
    interaction: np.ndarray,
    *,
    prep: tuple[Measurement, Outcome] | None = None,
    probe: Measurement | None = None,
    trials: int = 100,
    seed: int = 7,
) -> ClosureReport:
    """Report whether inserting ``interaction`` between a measurement pair breaks closure.

    The interaction acts either on the system alone (a dim x dim matrix, e.g. a
    basis rotation standing in for a uniform field) or on system x ancilla (a
    (dim*a) x (dim*a) matrix). Priors are a seeded Haar/stochastic sample acting
    on the full space before the preparation; a coupling to the ancilla lets
    them leak into post-preparation statistics, which shows up as a nonzero
    deviation.
    """
    inter = np.asarray(interaction)
    dim = model.dim
    if inter.shape[0] % dim != 0 or inter.shape[0] != inter.shape[1]:
        raise DimensionMismatchError(
            f"interaction shape {inter.shape} is not a square multiple of model dimension {dim}"
        )
    anc = inter.shape[0] // dim
    if prep is None or probe is None:
        if isinstance(model, QuantumModel):
            if not model.bases:
                raise UnboundMeasurementError("model binds no measurement to prepare with")
            label = sorted(model.bases)[0]
        else:
            label = "state"
        default_meas = atomic_measurement(label, dim)
        prep = prep or (default_meas, default_meas.outcomes[0])
        probe = probe or default_meas
    prep_meas, prep_outcome = prep

    if isinstance(model, QuantumModel):
        priors = random_prior_unitaries(dim * anc, trials, seed)
        b_prep = model.basis_for(prep_meas)
        prep_proj = np.kron(
            b_prep[:, sorted(prep_outcome.members)] @ b_prep[:, sorted(prep_outcome.members)].conj().T,
            np.eye(anc),
        )
        b_probe = model.basis_for(probe)
        probe_projs = [
            np.kron(
                b_probe[:, sorted(o.members)] @ b_probe[:, sorted(o.members)].conj().T,
                np.eye(anc),
            )
            for o in probe.outcomes
        ]
        psi0 = np.kron(_fiducial_state(model, prep_meas), np.eye(anc)[:, 0].astype(complex))

        def distribution(prior):
            psi = psi0 if prior is None else prior @ psi0
            filtered = prep_proj @ psi
            norm = np.linalg.norm(filtered)
            if norm < 1e-15:
                return None
            after = inter @ (filtered / norm)
            return np.array([float(np.vdot(after, p @ after).real) for p in probe_projs])

    elif isinstance(model, ClassicalModel):
        priors = random_prior_stochastics(dim * anc, trials, seed)
        keep = sorted(prep_outcome.members)
        mask = np.zeros(dim * anc)
        for k in keep:
            mask[k * anc : (k + 1) * anc] = 1.0
        blocks = [sorted(o.members) for o in probe.outcomes]
        p0 = np.kron(np.full(dim, 1.0 / dim), np.eye(anc)[:, 0] if anc > 1 else np.ones(1))

        def distribution(prior):
            p = p0 if prior is None else prior @ p0
            masked = p * mask
            total = masked.sum()
            if total < 1e-15:
                return None
            after = inter @ (masked / total)
            marginal = after.reshape(dim, anc).sum(axis=1)
            return np.array([marginal[b].sum() for b in blocks])

    else:
        raise TypeError(f"unsupported model type {type(model).__name__}")

    baseline = distribution(None)
    witnesses = []
    for i, prior in enumerate(priors):
        dist = distribution(prior)
        if dist is None:
            continue
        witnesses.append((str(i), _total_variation(dist, baseline)))
    max_dev = max((w[1] for w in witnesses), default=0.0)
    return ClosureReport(
        preparation=(prep_meas, prep_outcome),
        probe=probe,
        max_deviation=max_dev,
        witnesses=tuple(witnesses),
        seed=seed,
    )
