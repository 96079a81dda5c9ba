"""Exception types shared across the package."""


class ProserveError(Exception):
    """Base class for package-specific errors."""


class DegenerateChain(ProserveError):
    """Two-state chain with epsilon + delta == 0 has no unique stationary law."""


class StateSpaceTooLarge(ProserveError):
    """Joint demand/resource enumeration would exceed the configured cap."""


class UndefinedEstimate(ProserveError):
    """A transition rate could not be estimated because a state was never visited."""


class InfeasibleBudget(ProserveError):
    """No feasible policy can keep the average cost within the budget rate."""


class InsufficientHorizon(ProserveError):
    """Trace is too short for the requested statistic."""


class ConfigError(ProserveError):
    """Experiment configuration failed validation."""
