"""Exception hierarchy. The CLI maps these onto exit codes."""


class FracLabError(Exception):
    """Base class for all library errors."""


class ConfigError(FracLabError, ValueError):
    """Invalid configuration or arguments."""


class PreconditionError(FracLabError):
    """Input does not satisfy the hypotheses of a check.

    Distinct from a failed verdict: a violated precondition says nothing
    about the statement being checked.
    """


class NumericalError(FracLabError):
    """A numerical procedure could not deliver its accuracy contract."""


class QuadratureError(NumericalError):
    def __init__(self, message: str, estimate: float | None = None):
        super().__init__(message)
        self.estimate = estimate


class ConvergenceError(NumericalError):
    def __init__(self, message: str, history: list[float] | None = None):
        super().__init__(message)
        self.history = list(history or [])


class SingularSystemError(NumericalError):
    def __init__(self, message: str, condition: float):
        super().__init__(message)
        self.condition = condition
