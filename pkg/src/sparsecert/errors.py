"""Exception hierarchy.

Every error carries a short machine-readable ``code`` (the class name) so the
CLI can report it verbatim. Errors that describe a numerical breakdown derive
from :class:`NumericalFailure`; errors that describe a violated mathematical
precondition usually carry a ``witness``.
"""

from __future__ import annotations

from typing import Any


class SparsecertError(Exception):
    """Base class for all library errors."""

    def __init__(self, message: str = "", **details: Any):
        super().__init__(message)
        self.details = details

    @property
    def code(self) -> str:
        return type(self).__name__


class InputError(SparsecertError, ValueError):
    """Malformed or inadmissible input (bad shapes, domains, configs)."""


class DomainError(InputError):
    pass


class ShapeError(InputError):
    pass


class UnsupportedOrder(InputError):
    pass


class ConfigError(InputError):
    pass


class ExponentMismatch(InputError):
    pass


class NotDense(InputError):
    pass


class BadLeadingCoefficient(InputError):
    pass


class IndexTooLarge(InputError):
    pass


class TooManyZeros(InputError):
    pass


class IdenticallyZero(InputError):
    pass


class NotStrictlyPositive(SparsecertError):
    """The polynomial is not strictly positive; ``witness`` is a point where f <= 0."""

    def __init__(self, message: str = "", witness: float | None = None, **details: Any):
        super().__init__(message, witness=witness, **details)
        self.witness = witness


class TailNegative(NotStrictlyPositive):
    pass


class NegativeSomewhere(NotStrictlyPositive):
    pass


class InfeasibleSequence(SparsecertError):
    """The moment sequence is not a truncated moment sequence; ``witness`` is a
    nonnegative polynomial with negative Riesz value."""

    def __init__(self, message: str = "", witness: Any = None, **details: Any):
        super().__init__(message, witness=witness, **details)
        self.witness = witness


class NumericalFailure(SparsecertError):
    pass


class SingularSystem(NumericalFailure):
    pass


class DegenerateDeterminant(NumericalFailure):
    pass


class ConstructionFailed(NumericalFailure):
    pass


class NewtonDivergence(NumericalFailure):
    pass


class RecoveryFailed(NumericalFailure):
    pass
