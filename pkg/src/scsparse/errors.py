"""Exception hierarchy.

Every error raised by the package derives from :class:`ScsparseError`; the CLI
maps the three families below onto exit codes.
"""


class ScsparseError(Exception):
    """Base class for all package errors."""


class ValidationError(ScsparseError, ValueError):
    """Malformed input or configuration (CLI exit code 2)."""


class SizeGuard(ScsparseError):
    """A dense computation was requested above the allowed dimension (exit code 3)."""


class NumericFailure(ScsparseError, ArithmeticError):
    """A numerical routine could not produce a meaningful result (exit code 4)."""


class DuplicateVertex(ValidationError):
    pass


class EmptySimplex(ValidationError):
    pass


class ClosureViolation(ValidationError):
    pass


class NonpositiveWeight(ValidationError):
    pass


class ConflictingWeight(ValidationError):
    pass


class NotFound(ValidationError, KeyError):
    pass


class OrderOutOfRange(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class LevelMismatch(ValidationError):
    pass


class OddCount(ValidationError):
    pass


class EmptyInput(ValidationError):
    pass


class InvalidEps(ValidationError):
    pass


class ParseError(ValidationError):
    def __init__(self, message, path=None, line=None):
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(where + message)
        self.path = path
        self.line = line


class NoSimplices(NumericFailure):
    pass


class ZeroOperator(NumericFailure):
    pass


class DegenerateMeasure(NumericFailure):
    pass
