"""Exception hierarchy shared by all modules."""


class NopoError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(NopoError, ValueError):
    """Physical parameters violate a precondition (bad rates, wrong regime)."""


class DomainError(NopoError, ValueError):
    """A requested solution does not exist for the given parameters."""


class ThresholdProximityError(NopoError, ArithmeticError):
    """Linearized quantities are ill-conditioned close to the oscillation threshold."""


class MonteCarloError(NopoError, RuntimeError):
    """Stochastic run rejected: step-size guard violated or too many divergences."""
