"""Brute-force oracles, independent of the library's evaluation path.

The library computes sequence values by propagating a state vector through
projectors; these oracles instead enumerate every atomic path explicitly and
sum per-path contributions, so agreement between the two routes is evidence,
not tautology.
"""
from __future__ import annotations

from itertools import product

import numpy as np


def _step_product(steps: dict, dim: int, t_from: int, t_to: int) -> np.ndarray:
    u = np.eye(dim, dtype=complex)
    for k in range(t_from, t_to):
        u = np.asarray(steps.get(k, np.eye(dim)), dtype=complex) @ u
    return u


def _basis_for_record(bases: dict, rec, dim: int) -> np.ndarray:
    basis = bases.get(rec.measurement.label)
    if basis is None:
        # Unbound labels only as full-context blocks; any orthonormal basis
        # resolves the identity, so take the computational one.
        assert len(rec.outcome.members) == dim
        return np.eye(dim, dtype=complex)
    return np.asarray(basis, dtype=complex)


def path_sum_amplitude(model, seq) -> complex:
    """Sum over every atomic path compatible with the sequence's outcomes."""
    recs = seq.records
    dim = model.dim
    choices = [sorted(r.outcome.members) for r in recs]
    bases = [_basis_for_record(model.bases, r, dim) for r in recs]
    total = 0j
    for path in product(*choices):
        amp = 1 + 0j
        for k in range(1, len(recs)):
            u = _step_product(model.unitaries, dim, recs[k - 1].time, recs[k].time)
            bra = bases[k][:, path[k]]
            ket = bases[k - 1][:, path[k - 1]]
            amp *= np.vdot(bra, u @ ket)
        total += amp
    return complex(total)


def path_product_probability(model, seq) -> float:
    """Sum over atomic paths of the product of transition entries."""
    recs = seq.records
    dim = model.dim
    choices = [sorted(r.outcome.members) for r in recs]
    total = 0.0
    for path in product(*choices):
        p = 1.0
        for k in range(1, len(recs)):
            t = _step_product_real(model.transitions, dim, recs[k - 1].time, recs[k].time)
            p *= t[path[k], path[k - 1]]
        total += p
    return total


def _step_product_real(steps: dict, dim: int, t_from: int, t_to: int) -> np.ndarray:
    t = np.eye(dim)
    for k in range(t_from, t_to):
        t = np.asarray(steps.get(k, np.eye(dim)), dtype=float) @ t
    return t
