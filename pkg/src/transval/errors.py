"""Exception hierarchy shared by every transval module."""


class TransvalError(Exception):
    """Base class of all typed library errors."""


class DivisionByZero(TransvalError, ZeroDivisionError):
    pass


class CharacteristicOne(TransvalError):
    """Digit combinatorics requested with characteristic exponent 1."""


class DenominatorVanishes(TransvalError):
    pass


class NotOmegaIncreasing(TransvalError):
    pass


class MixedCoefficientRings(TransvalError):
    pass


class NonUnitScale(TransvalError):
    pass


class ZeroPolynomial(TransvalError):
    pass


class SupportCollision(TransvalError):
    """Specialization sigma -> q identifies two exponents of the support."""


class PrecisionLoss(TransvalError):
    """A result is indistinguishable from zero at the available precision."""


class BudgetExceeded(TransvalError):
    """An explicit iteration, support or depth budget ran out.

    ``report`` carries the partial result when one exists.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NonNegativeValuation(TransvalError):
    pass


class PreconditionFailed(TransvalError):
    pass


class ResidueSearchExhausted(TransvalError):
    pass


class SymbolicResidueUnsupported(TransvalError):
    pass


class LimitNotRational(TransvalError):
    pass


class ParseError(TransvalError):
    """Syntax error in an expression, with 1-based line and 0-based column."""

    def __init__(self, message, line=1, col=0):
        super().__init__(f"{message} (line {line}, col {col})")
        self.line = line
        self.col = col


class ExprTypeError(ParseError):
    """A sigma-expression or field literal appeared where it is not allowed."""
