"""Exception hierarchy shared by every module."""


class TspGapError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(TspGapError, ValueError):
    """An argument lies outside the domain an operation is defined on."""


class ParityError(DomainError):
    """k even with c odd in the k-cycle construction."""


class NotSymmetric(DomainError):
    pass


class NonSymmetricCirculant(DomainError):
    pass


class NotMetric(DomainError):
    pass


class NonzeroDiagonal(DomainError):
    pass


class DimensionMismatch(TspGapError, ValueError):
    pass


class TooLarge(DomainError):
    """Exhaustive enumeration requested beyond its hard size cap."""


class RowSumError(DomainError):
    pass


class NoConvergence(TspGapError, ArithmeticError):
    pass


class IterationLimit(TspGapError, ArithmeticError):
    pass


# The following signal implementation bugs rather than bad input.

class IdentityViolation(TspGapError, AssertionError):
    pass


class InfeasibleWitness(TspGapError, AssertionError):
    pass


class VerdictMismatch(TspGapError, AssertionError):
    pass


class VerificationFailed(TspGapError, AssertionError):
    pass
