"""Shared random-model builders for the numeric sweeps (all seeded)."""
from __future__ import annotations

import numpy as np

from opseq import ClassicalModel, QuantumModel


def haar_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    phases = np.diag(r).copy()
    phases /= np.abs(phases)
    return q * phases


def random_quantum_model(
    rng: np.random.Generator, dim: int, labels=("L", "M", "N"), ticks=(1, 2)
) -> QuantumModel:
    bases = {label: haar_unitary(rng, dim) for label in labels}
    unitaries = {t: haar_unitary(rng, dim) for t in ticks}
    return QuantumModel(dim, bases, unitaries)


def random_stochastic(rng: np.random.Generator, dim: int) -> np.ndarray:
    return rng.dirichlet(np.ones(dim), size=dim).T


def random_classical_model(rng: np.random.Generator, dim: int, ticks=(1, 2)) -> ClassicalModel:
    return ClassicalModel(dim, {t: random_stochastic(rng, dim) for t in ticks})


def disjoint_subsets(rng: np.random.Generator, dim: int) -> tuple[set[int], set[int]]:
    """Two disjoint nonempty subsets of {0..dim-1} (dim >= 2)."""
    perm = rng.permutation(dim)
    a = int(rng.integers(1, dim))
    b = int(rng.integers(1, dim - a + 1))
    return set(perm[:a].tolist()), set(perm[a : a + b].tolist())
