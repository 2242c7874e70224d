"""Exception hierarchy.  ``exit_code`` follows the CLI contract."""


class CongboxError(Exception):
    exit_code = 1


class ValidationError(CongboxError, ValueError):
    exit_code = 2


class NotPrime(ValidationError):
    pass


class IndexOutOfRange(ValidationError, IndexError):
    pass


class IntervalOutOfRange(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class ResourceGuard(CongboxError):
    exit_code = 3


class TooLarge(ResourceGuard):
    pass


class SizeGuard(ResourceGuard):
    pass


class CostGuard(ResourceGuard):
    pass


class PrecisionLoss(CongboxError):
    exit_code = 1
