"""Operational calculus of measurement-outcome sequences.

Finite outcome algebra, series/parallel sequence combination, classical and
quantum predictive models, causal-closure checkers, a property-ascription rule
engine, built-in worked scenarios and an experiment-file CLI.
"""
from __future__ import annotations

from . import errors
from .outcomes import (
    CoarseGraining,
    Measurement,
    Outcome,
    atomic_measurement,
    coarse_graining,
    coarse_measurement,
    is_atomic,
    make_measurement,
    refinements,
)
from .sequences import (
    Sequence,
    SequenceRecord,
    Violation,
    atomic_branches,
    parallel,
    parallel_all,
    record,
    sequence,
    series,
    validate,
)
from .models import (
    Amplitude,
    ClassicalModel,
    CompositeModel,
    QuantumModel,
    amplitude,
    amplitude_sum_check,
    composite_amplitude,
    probability,
    series_product_check,
    split_joint_sequence,
    trivial_insertion_check,
)

__version__ = "0.1.0"

__all__ = [
    "errors",
    "Outcome",
    "Measurement",
    "CoarseGraining",
    "make_measurement",
    "atomic_measurement",
    "coarse_measurement",
    "is_atomic",
    "refinements",
    "coarse_graining",
    "Sequence",
    "SequenceRecord",
    "Violation",
    "record",
    "sequence",
    "series",
    "parallel",
    "parallel_all",
    "atomic_branches",
    "validate",
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
    "__version__",
]
