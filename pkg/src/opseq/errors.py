"""Exception types shared across the package."""
from __future__ import annotations


class OpseqError(Exception):
    """Base class for all package-specific errors."""


class PartitionError(OpseqError):
    """Measurement blocks overlap or fail to cover the outcome context."""


class EmptyBlockError(OpseqError):
    """An outcome was declared with no members."""


class ContextMismatchError(OpseqError):
    """Operation attempted across two different outcome contexts."""


class JoinMismatchError(OpseqError):
    """Series combination requires the boundary records to be identical."""


class NonAtomicJoinError(OpseqError):
    """Series combination requires an atomic join outcome."""


class ShapeMismatchError(OpseqError):
    """Parallel combination requires runs differing at exactly one record."""


class OverlapError(OpseqError):
    """Parallel combination requires disjoint outcomes at the combining position."""


class BoundaryPositionError(OpseqError):
    """Position refers to the boundary of a run where only interior positions are allowed."""


class SequenceValidationError(OpseqError):
    """A sequence violating well-formedness rules was passed to an operator."""

    def __init__(self, violations):
        self.violations = tuple(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class UnboundMeasurementError(OpseqError):
    """A model has no basis bound for the measurement label."""


class DimensionMismatchError(OpseqError):
    """Outcome context or matrix shape does not match the model dimension."""


class StochasticityError(OpseqError):
    """Transition matrix is not column-stochastic."""


class UnitarityError(OpseqError):
    """Matrix is not unitary (or basis not orthonormal) within tolerance."""


class SubsetError(OpseqError):
    """Refinement check requires the fine outcome to be a subset of the coarse one."""


class UnlabeledMeasurementError(OpseqError):
    """Attribution requires every measurement label to carry a property kind."""


class ZeroIntervalError(OpseqError):
    """Speed computation requires a positive time interval."""


class UnknownScenarioError(OpseqError):
    """Requested scenario name is not registered."""


class UnknownGeneratorError(OpseqError):
    """Matrix generator expression is unknown or malformed."""


class CrossRefError(OpseqError):
    """A named reference in an experiment file cannot be resolved."""
