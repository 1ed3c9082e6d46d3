"""Exception hierarchy. The CLI maps the three families to exit codes 2/3/4."""


class QnmUscError(Exception):
    pass


class ConfigError(QnmUscError, ValueError):
    """Bad scenario config or parameter file."""

    def __init__(self, message, problems=None):
        super().__init__(message)
        self.problems = list(problems or [])


class PhysicsError(QnmUscError, ValueError):
    pass


class NegativeRateError(PhysicsError):
    """Spectral density went negative at a retained transition frequency."""

    def __init__(self, message, omegas=()):
        super().__init__(message)
        self.omegas = tuple(omegas)


class NumericalError(QnmUscError, ArithmeticError):
    pass


class InvalidDimensionError(NumericalError, ValueError):
    pass


class NonHermitianError(NumericalError, ValueError):
    def __init__(self, message, violation=float("nan")):
        super().__init__(message)
        self.violation = violation


class DegenerateSteadyStateError(NumericalError):
    def __init__(self, message, dimension):
        super().__init__(message)
        self.dimension = dimension


class SingularResolventError(NumericalError):
    pass


class PeaksUnresolvedError(NumericalError):
    pass


class FitConvergenceError(NumericalError):
    def __init__(self, message, residual=float("nan")):
        super().__init__(message)
        self.residual = residual
