"""Exception hierarchy.

Every error carries the CLI exit code it maps to: 2 for malformed input
(parse, schema, unresolved references), 3 for input that is well formed but
violates a mathematical invariant.
"""

from __future__ import annotations


class MeasureChuError(Exception):
    exit_code = 3


class ValidationError(MeasureChuError):
    exit_code = 2


class InvariantError(MeasureChuError):
    exit_code = 3


class ExprSyntaxError(ValidationError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownIdentifier(ExprSyntaxError):
    pass


class VariableOutOfRange(ExprSyntaxError):
    pass


class DuplicateLabel(InvariantError):
    pass


class RaggedCoordinates(InvariantError):
    pass


class UnknownLabel(InvariantError):
    pass


class SpaceMismatch(InvariantError):
    pass


class DimensionMismatch(InvariantError):
    pass


class BackendMismatch(InvariantError):
    pass


class DivisionByZero(InvariantError, ZeroDivisionError):
    pass


class SingularPairing(InvariantError):
    pass


class AdjointMismatch(InvariantError):
    pass


class InvalidParameter(InvariantError):
    pass


class EmptySequence(InvariantError):
    pass


class DuplicatePoints(InvariantError):
    pass


class MissingCoordinates(InvariantError):
    pass
