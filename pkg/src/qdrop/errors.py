"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit codes: ConfigError -> 2,
PhysicsValidationError -> 3, NumericError -> 4.
"""


class QdropError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(QdropError):
    """Malformed or inconsistent configuration (bad keys, bad grids, bad cuts)."""


class PhysicsValidationError(QdropError):
    """Configuration is well-formed but physically invalid (e.g. droplet
    overlapping the well at t=0, non-positive norm)."""


class NumericError(QdropError):
    """Runtime numerical failure: blow-up, non-convergence, eigensolver failure."""
