"""Poschl-Teller attractive well, V(x) = -U0 sech^2(alpha (x - center))."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .grid import Grid


@dataclass(frozen=True)
class PotentialSpec:
    """Well depth U0 >= 0 and inverse width alpha (default sqrt(U0)).

    alpha = sqrt(U0) makes the well reflectionless for linear matter waves.
    """

    U0: float
    alpha: float | None = None
    center: float = 0.0

    def __post_init__(self):
        if self.U0 < 0:
            raise ConfigError(f"need U0 >= 0, got {self.U0}")
        if self.alpha is None:
            object.__setattr__(self, "alpha", math.sqrt(self.U0))
        elif self.alpha <= 0 and self.U0 > 0:
            raise ConfigError(f"need alpha > 0, got {self.alpha}")

    @property
    def reflectionless(self) -> bool:
        return abs(self.alpha - math.sqrt(self.U0)) < 1e-12

    def values(self, grid: Grid) -> np.ndarray:
        if self.U0 == 0.0:
            return np.zeros(grid.n_points)
        arg = np.abs(self.alpha * (grid.x - self.center))
        # sech^2 via exponentials; cosh(arg)**2 overflows for wide boxes
        sech = 2.0 * np.exp(-arg) / (1.0 + np.exp(-2.0 * arg))
        return -self.U0 * sech**2

    def effective_half_width(self, threshold: float = 1e-6) -> float:
        """Half-width beyond which sech^2(alpha x) < threshold."""
        if self.U0 == 0.0:
            return 0.0
        return math.acosh(1.0 / math.sqrt(threshold)) / self.alpha
