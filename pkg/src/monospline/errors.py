"""Exception types raised by the solver."""


class MonosplineError(Exception):
    """Base class; ``step`` is filled in when the failure happens inside a time loop."""

    step = None


class SingularSystemError(MonosplineError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class DegenerateEliminationError(MonosplineError):
    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval


class MonotonicityError(MonosplineError):
    pass


class NumericalFailure(MonosplineError):
    pass


class ConfigError(MonosplineError):
    pass
