class HyperscatterError(Exception):
    """Base class for all library errors."""


class DomainError(HyperscatterError, ValueError):
    pass


class PoleError(HyperscatterError, ValueError):
    pass


class UnsupportedDimensionError(HyperscatterError, ValueError):
    pass


class AccuracyError(HyperscatterError, ArithmeticError):
    """A numerical routine could not reach its requested accuracy.

    ``partial`` carries the best value obtained and ``error`` its estimate.
    """

    def __init__(self, message, partial=None, error=None):
        super().__init__(message)
        self.partial = partial
        self.error = error


class ConditioningError(HyperscatterError, ArithmeticError):
    def __init__(self, message, sigma_min=None):
        super().__init__(message)
        self.sigma_min = sigma_min
