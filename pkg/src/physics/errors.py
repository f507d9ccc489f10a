"""
Simulation Errors

Exception hierarchy shared by the solvers, the configuration layer and the CLI.
Every error carries a short ``category`` that the CLI prints verbatim.
"""


class SimulationError(Exception):
    """Base class for all errors raised by the simulator"""

    category = "simulation"


class InputValidationError(SimulationError, ValueError):
    """An input violates a documented precondition"""

    category = "validation"


class DomainError(SimulationError, ValueError):
    """An argument lies outside the mathematical domain of an operation"""

    category = "domain"


class ExistenceError(DomainError):
    """The requested stationary state does not exist for these parameters"""

    category = "existence"


class JumpLogicError(SimulationError, RuntimeError):
    """A quantum jump was requested that cannot occur"""

    category = "jump-logic"


class CapOverflowError(SimulationError):
    """Probability reached the highest sector kept by the exact solver"""

    category = "cap-overflow"


class GridMismatchError(SimulationError, ValueError):
    """Time series that should share one sample grid do not"""

    category = "grid-mismatch"


class ConfigError(SimulationError, ValueError):
    """An experiment configuration cannot be parsed or is invalid"""

    category = "config"


class UsageError(SimulationError):
    """The command line could not be parsed"""

    category = "usage"
