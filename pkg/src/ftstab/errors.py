"""Exception hierarchy shared by all modules."""


class FtstabError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(FtstabError, ValueError):
    """Fields of incompatible length were combined."""


class ConfigurationError(FtstabError, ValueError):
    """A scenario, grid or scheme setting is invalid."""


class GainError(ConfigurationError):
    """The switching gain does not clear the rejection threshold."""

    def __init__(self, message, threshold=None):
        super().__init__(message)
        self.threshold = threshold


class ModelError(FtstabError, ValueError):
    """Operator data violates a modelling assumption (e.g. a(x) <= 0)."""


class NumericalError(FtstabError, ArithmeticError):
    """A time step or scalar solve produced a non-finite or unconverged value."""


class ProxConvergenceError(NumericalError):
    """Bisection for a prox scalar equation did not converge."""

    def __init__(self, message, bracket=None, iterations=None):
        super().__init__(message)
        self.bracket = bracket
        self.iterations = iterations
