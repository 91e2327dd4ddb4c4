"""Exception hierarchy shared by every module."""


class ModelError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(ModelError, ValueError):
    """Input data does not describe a valid model object."""


class NegativePrize(ValidationError):
    pass


class ProbSumInvalid(ValidationError):
    pass


class EmptySupport(ValidationError):
    pass


class OutOfRange(ValidationError):
    pass


class LimitedLiabilityViolation(ValidationError):
    pass


class ZOutOfRange(ValidationError):
    pass


class KTooLarge(ValidationError):
    pass


class NotDoublyMonotone(ValidationError):
    pass


class Infeasible(ModelError):
    """The requested design admits no contract (e.g. participation fails)."""


class NeverSampled(Infeasible):
    """The known project has a negative index, so no contract can make it worth opening."""


class NeverStops(ModelError):
    pass


class BudgetExceeded(ModelError):
    """The exact evaluator would exceed its enumeration budget."""
