"""Exception types raised across the package."""


class InterlacingError(Exception):
    """Base class for all errors raised by this package."""


class IterationFailure(InterlacingError, ArithmeticError):
    """An eigensolver or root finder failed to converge."""


class PreconditionError(InterlacingError, ValueError):
    """Input violates an operation's precondition."""


class NotPSD(PreconditionError):
    pass


class NotHermitian(PreconditionError):
    pass


class NormTooLarge(PreconditionError):
    pass


class NonzeroDiagonal(PreconditionError):
    pass


class DimensionMismatch(PreconditionError):
    pass


class DegreeMismatch(PreconditionError):
    pass


class NonPositiveLeading(PreconditionError):
    pass


class BadWeights(PreconditionError):
    pass


class NotRealRooted(PreconditionError):
    pass


class GridTooLarge(PreconditionError):
    pass


class BadIndex(PreconditionError, IndexError):
    pass


class LengthMismatch(PreconditionError):
    pass


class TooManyVectors(PreconditionError):
    pass


class SupportTooLarge(PreconditionError):
    pass


class BudgetExceeded(PreconditionError):
    pass


class NotAboveRoots(PreconditionError):
    pass


class ZeroDenominator(PreconditionError, ZeroDivisionError):
    pass


class HypothesisViolated(PreconditionError):
    pass


class PreconditionFailed(PreconditionError):
    pass


class NotDecomposition(PreconditionError):
    pass


class NotIsotropic(PreconditionError):
    pass


class BadParameters(PreconditionError):
    pass


class InvalidSpec(PreconditionError):
    """A random vector specification has bad probabilities or dimensions."""


class ParseError(InterlacingError, ValueError):
    """Instance file is not valid JSON."""


class SchemaError(InterlacingError, ValueError):
    """Instance file is JSON but does not follow schema version 1."""


class UnknownSuite(InterlacingError, ValueError):
    pass
