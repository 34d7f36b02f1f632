"""Exception types raised across the package."""


class InvalidInputError(ValueError):
    """Non-finite or out-of-domain argument."""


class InfeasibleDesignError(ValueError):
    """A gain-design step has no admissible solution for the given parameters."""


class SingularSurfaceError(ValueError):
    """G·B vanishes, so the equivalent control is undefined."""


class OracleFailure(AssertionError):
    """The brute-force inclusion solver found zero or several solutions."""


class DivergenceError(RuntimeError):
    """Simulation state became non-finite or exceeded the divergence guard."""

    def __init__(self, message, t=None, last_row=None):
        super().__init__(message)
        self.t = t
        self.last_row = last_row
