"""Exception hierarchy.

Two families matter to callers (and to the CLI exit codes): bad input
(``ValidationError``) and numerical breakdown (``ConditioningError``).
"""


class MuntzError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(MuntzError, ValueError):
    pass


class ConditioningError(MuntzError, ArithmeticError):
    pass


class ExponentOutOfRange(ValidationError):
    pass


class DuplicateExponent(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class InvalidGrid(ValidationError):
    pass


class NodeSingularity(ValidationError):
    pass


class NormalizationPole(ValidationError):
    pass


class DivergentProduct(ValidationError):
    pass


class InconclusiveClassification(MuntzError):
    pass


class CoefficientOverflow(ConditioningError):
    pass


class SingularSystem(ConditioningError):
    pass


class IllConditioned(ConditioningError):
    pass
