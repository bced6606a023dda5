"""Error types raised across the package."""


class GroupProxError(Exception):
    """Base class for all library-specific errors."""


class InvalidPartitionError(GroupProxError, ValueError):
    """A group partition violates disjointness, bounds, or non-emptiness."""


class StepSizeError(GroupProxError, ValueError):
    """A step size breaks a solver precondition (e.g. alpha >= beta * d_min)."""


class NotInteriorError(GroupProxError, ValueError):
    """Theta bounds requested for an input outside the interior branch."""


class BadBracketError(GroupProxError, ValueError):
    """Bisection bracket whose endpoint residuals have the same sign."""


class SolverFailedError(GroupProxError, RuntimeError):
    """Root solve did not converge, including the bisection fallback."""


class DegenerateLayerError(GroupProxError, ValueError):
    """Pruning would remove every unit of a hidden layer."""


class ConfigError(GroupProxError, ValueError):
    """Experiment configuration is malformed."""


class CheckpointError(GroupProxError, ValueError):
    """Checkpoint file is malformed or of the wrong kind."""
