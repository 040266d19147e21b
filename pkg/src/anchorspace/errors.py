"""Exception types shared across the simulator."""


class SimulationError(Exception):
    """Base class for all anchorspace-specific errors."""


class GenerationError(SimulationError):
    """Topology generation could not satisfy its constraints."""


class ModeError(ValueError, SimulationError):
    """A distance mode was combined with an incompatible anchor kind."""


class UnreachableAnchorError(ValueError, SimulationError):
    """A coordinate carries the unreachable sentinel; the caller must
    exclude that anchor before measuring distances."""


class ConfigError(SimulationError):
    """A scenario configuration failed validation; the message names the
    offending field(s)."""
