"""Exception hierarchy shared by every netsift module."""


class NetsiftError(Exception):
    """Base class for all errors raised by netsift."""


class ValidationError(NetsiftError, ValueError):
    """Input data violates a documented precondition."""


class DisconnectedNetworkError(ValidationError):
    """No spanning tree exists over the nonzero-weight pairs."""


class NotPositiveSemidefiniteError(ValidationError):
    """Matrix has an eigenvalue below the tolerated rounding band."""


class ConfigError(NetsiftError, ValueError):
    """An experiment configuration field is invalid.

    ``field`` carries the dotted path of the offending field.
    """

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class SolverBudgetExceeded(NetsiftError, RuntimeError):
    """The exact clique solver ran out of nodes or wall-clock time.

    ``trial`` is filled in when the failure happens inside a Monte Carlo trial.
    """

    def __init__(self, message, trial=None):
        if trial is not None:
            message = f"trial {trial}: {message}"
        super().__init__(message)
        self.trial = trial
