"""Uniform periodic spatial grid and complex fields sampled on it."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, PhysicsValidationError


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [x_min, x_max) with a power-of-two point count."""

    x_min: float = -128.0
    x_max: float = 128.0
    n_points: int = 4096

    def __post_init__(self):
        if self.x_max <= self.x_min:
            raise ConfigError(f"need x_max > x_min, got [{self.x_min}, {self.x_max})")
        n = self.n_points
        if n < 2 or (n & (n - 1)) != 0:
            raise ConfigError(f"n_points must be a power of two >= 2, got {n}")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_points

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_points)

    @property
    def wavenumbers(self) -> np.ndarray:
        """Fourier-conjugate grid in standard FFT ordering."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)

    @property
    def length(self) -> float:
        return self.x_max - self.x_min


@dataclass
class WaveField:
    """Complex amplitude psi sampled on a Grid."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.shape != (self.grid.n_points,):
            raise ConfigError(
                f"values shape {vals.shape} != ({self.grid.n_points},)"
            )
        if not np.all(np.isfinite(vals.view(np.float64))):
            raise PhysicsValidationError("field contains NaN/Inf")
        self.values = vals

    def norm(self) -> float:
        """Discrete norm  sum |psi_j|^2 dx  (trapezoid on the periodic grid)."""
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.dx)

    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def copy(self) -> "WaveField":
        return WaveField(self.grid, self.values.copy())


def integrate(grid: Grid, samples: np.ndarray) -> float:
    """Quadrature of a sample array over the periodic grid.

    The rectangle rule on a periodic grid coincides with the trapezoid rule
    and is spectrally accurate for smooth fields that decay at the edges.
    """
    return float(np.sum(samples) * grid.dx)
