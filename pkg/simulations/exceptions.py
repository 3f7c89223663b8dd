"""
Errors raised by the simulation layer.

The management command maps ConfigurationError to exit status 2 and
NumericalError to exit status 3.
"""


class SimulationError(Exception):
    """Base class for simulation failures"""


class ConfigurationError(SimulationError):
    """Unknown scenario or invalid scenario configuration"""

    def __init__(self, message, errors=None):
        super().__init__(message)
        self.errors = errors or {}


class NumericalError(SimulationError):
    """The integration itself failed or produced an invalid state"""


class IntegrationError(NumericalError):
    """The integrator stopped before t_max (step size underflow)"""

    def __init__(self, message, t_reached):
        super().__init__(f"{message} (integration stopped at t={t_reached:.6g})")
        self.t_reached = t_reached


class InvariantViolation(NumericalError):
    """Trace, Hermiticity or positivity drift beyond threshold"""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report or {}


class RealizationError(NumericalError):
    """A single disorder realization failed"""

    def __init__(self, k, cause):
        super().__init__(f"realization {k} failed: {cause}")
        self.k = k
        self.cause = cause
