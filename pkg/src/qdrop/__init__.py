"""1D quantum-droplet scattering on a reflectionless Poschl-Teller well."""

__version__ = "0.1.0"

from .errors import ConfigError, NumericError, PhysicsValidationError
from .family import DropletSpec, boost, droplet_profile, stationary_energy
from .grid import Grid, WaveField, integrate
from .potential import PotentialSpec
from .propagate import StepConfig, evolve

__all__ = [
    "__version__",
    "ConfigError",
    "NumericError",
    "PhysicsValidationError",
    "DropletSpec",
    "boost",
    "droplet_profile",
    "stationary_energy",
    "Grid",
    "WaveField",
    "integrate",
    "PotentialSpec",
    "StepConfig",
    "evolve",
]
