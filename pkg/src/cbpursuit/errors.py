"""Exception types shared across the package."""


class CBPursuitError(Exception):
    """Base class for all package errors."""


class GraphError(CBPursuitError):
    """Invalid pursuit graph topology."""


class SelfLoopError(GraphError):
    pass


class DisconnectedError(GraphError):
    """More than one cycle, or agents unreachable from the cycle."""


class MultiTierBranchError(GraphError):
    """Branch agent whose target is itself a branch (unsupported)."""


class CollisionError(CBPursuitError):
    """Arc separation at or below the singularity floor."""


class NotPeriodicError(CBPursuitError):
    """No section return found within the scanned trajectory."""


class NonMonotonicTimeError(CBPursuitError):
    pass


class InvalidConfigError(CBPursuitError):
    pass


class ConfigParseError(CBPursuitError):
    """Scenario document failed to parse or validate."""


class InadmissibleEquilibriumError(CBPursuitError):
    pass
