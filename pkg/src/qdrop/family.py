"""Analytic ground-state family of the free-space droplet.

The family is parametrized by the mean-field coupling g and either the
chemical potential mu < 0 or the rescaled norm N > 0.  Closed forms exist
for the profile and for N(mu); mu(N) is inverted by bracketed bisection.

For g > 0 the distance to the saturation potential, delta = 1 - mu/mu0,
shrinks exponentially with N (delta ~ 4 exp(-3 g N / 2)), so large flat-top
droplets are resolved in delta rather than in mu directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericError, PhysicsValidationError
from .grid import Grid, WaveField, integrate


def saturation_mu(g: float) -> float:
    """Chemical potential of the uniform liquid, -2/(9g) (g != 0)."""
    return -2.0 / (9.0 * g)


def saturation_density(g: float) -> float:
    """Density of the uniform liquid, 4/(9 g^2) (g != 0)."""
    return 4.0 / (9.0 * g * g)


def _norm_from_delta(g: float, delta: float) -> float:
    """N as a function of delta = 1 - mu/mu0, g > 0.

    Equivalent to the g > 0 closed form for N(mu) but stays accurate in the
    flat-top limit delta -> 0.
    """
    y = math.sqrt(1.0 - delta)
    # log((1+y)/sqrt(delta)) without forming 1 - y
    return saturation_density(g) * 3.0 * math.sqrt(g) * (
        math.log1p(y) - 0.5 * math.log(delta) - y
    )


def norm_from_mu(g: float, mu: float) -> float:
    """Closed-form N(mu); the branch depends on the sign of g."""
    if mu >= 0.0:
        raise PhysicsValidationError(f"need mu < 0, got {mu}")
    if g == 0.0:
        return 3.0 * math.sqrt(2.0) * (-mu) ** 1.5
    mu0 = saturation_mu(g)
    if g > 0.0:
        delta = 1.0 - mu / mu0
        if not 0.0 < delta < 1.0:
            raise PhysicsValidationError(
                f"mu={mu} outside (mu0, 0) = ({mu0}, 0) for g={g}"
            )
        return _norm_from_delta(g, delta)
    # g < 0: mu0 > 0, -mu/mu0 > 0
    n0 = saturation_density(g)
    s = math.sqrt(-mu / mu0)
    return n0 * math.sqrt(2.0 / mu0) * (s - math.atan(s))


def _delta_from_norm(g: float, N: float) -> float:
    """Invert N(delta) for g > 0 by bisection in log(delta)."""
    lo, hi = -745.0, math.log(1.0 - 1e-15)  # delta in (5e-324, 1)
    if _norm_from_delta(g, math.exp(lo)) < N:
        raise NumericError(f"N={N} too large to bracket in delta for g={g}")
    # N is decreasing in delta
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _norm_from_delta(g, math.exp(mid)) > N:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15 * max(1.0, abs(mid)):
            break
    return math.exp(0.5 * (lo + hi))


def mu_from_norm(g: float, N: float) -> float:
    """Invert N(mu) for the matching sign of g by bracketed bisection."""
    if N <= 0.0:
        raise PhysicsValidationError(f"need N > 0, got {N}")
    if g == 0.0:
        return -((N / (3.0 * math.sqrt(2.0))) ** (2.0 / 3.0))
    if g > 0.0:
        return saturation_mu(g) * (1.0 - _delta_from_norm(g, N))
    # g < 0: expand the bracket toward -inf until N is enclosed
    hi = -1e-14
    lo = -1.0
    while norm_from_mu(g, lo) < N:
        lo *= 2.0
        if lo < -1e12:
            raise NumericError(f"failed to bracket N={N} for g={g}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if norm_from_mu(g, mid) > N:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15 * abs(mid):
            break
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class DropletSpec:
    """One member of the droplet family: coupling g, norm N, and derived scalars.

    delta = 1 - mu/mu0 is carried explicitly for g > 0; it controls the
    profile shape and loses all precision if recomputed from mu at large N.
    """

    g: float
    N: float
    mu: float
    delta: float | None = None

    @classmethod
    def from_norm(cls, g: float, N: float) -> "DropletSpec":
        if N <= 0.0:
            raise PhysicsValidationError(f"need N > 0, got {N}")
        if g > 0.0:
            delta = _delta_from_norm(g, N)
            mu = saturation_mu(g) * (1.0 - delta)
            return cls(g=g, N=N, mu=mu, delta=delta)
        return cls(g=g, N=N, mu=mu_from_norm(g, N))

    @classmethod
    def from_mu(cls, g: float, mu: float) -> "DropletSpec":
        return cls(g=g, N=norm_from_mu(g, mu), mu=mu)

    def __post_init__(self):
        if self.N <= 0 or self.mu >= 0:
            raise PhysicsValidationError(
                f"inconsistent droplet spec: N={self.N}, mu={self.mu}"
            )
        if self.g > 0.0 and self.delta is None:
            object.__setattr__(self, "delta", 1.0 - self.mu / saturation_mu(self.g))
        if self.g > 0.0:
            nref = _norm_from_delta(self.g, self.delta)
        else:
            nref = norm_from_mu(self.g, self.mu)
        if abs(nref - self.N) > 1e-10 * self.N:
            raise PhysicsValidationError(
                f"N={self.N} inconsistent with mu={self.mu} (closed form gives {nref})"
            )

    @property
    def A(self) -> float:
        """Amplitude parameter -mu/(2g) (g != 0)."""
        if self.g == 0.0:
            raise PhysicsValidationError("A undefined at g=0")
        return -self.mu / (2.0 * self.g)

    @property
    def a(self) -> float:
        """Half separation of the kink/anti-kink pair (g > 0)."""
        if self.g <= 0.0:
            raise PhysicsValidationError("a defined only for g > 0")
        y = math.sqrt(1.0 - self.delta)
        # artanh(y) with 1 - y = delta / (1 + y) to avoid cancellation
        return 0.25 * (2.0 * math.log1p(y) - math.log(self.delta))

    @property
    def mu0(self) -> float:
        return saturation_mu(self.g)

    @property
    def n0(self) -> float:
        return saturation_density(self.g)

    def half_width(self, tail_log: float = 20.0) -> float:
        """Distance from the center at which the profile is ~e^-tail_log of peak."""
        kappa = math.sqrt(-2.0 * self.mu)
        core = 0.0 if self.g <= 0.0 else self.a / math.sqrt(-self.mu / 2.0)
        return core + tail_log / kappa

    def profile_at(self, x: np.ndarray | float, center: float = 0.0):
        """Pointwise stationary profile psi_0(x - center) (real, positive)."""
        mu = self.mu
        xi = np.asarray(x, dtype=float) - center
        root = math.sqrt(self.delta) if self.g > 0.0 else math.sqrt(
            1.0 + 4.5 * mu * self.g
        )
        arg = math.sqrt(-2.0 * mu) * np.abs(xi)
        # cosh overflows past ~710; the profile is below 1e-300 there already
        arg = np.minimum(arg, 700.0)
        return -3.0 * mu / (1.0 + root * np.cosh(arg))

    def profile_kink_form_at(self, x: np.ndarray | float, center: float = 0.0):
        """Equivalent kink/anti-kink form, defined for g > 0 only."""
        A, a = self.A, self.a
        xi = (np.asarray(x, dtype=float) - center) * math.sqrt(A * self.g)
        return math.sqrt(A) * (np.tanh(a + xi) + np.tanh(a - xi))


def droplet_profile(spec: DropletSpec, grid: Grid, center: float = 0.0) -> WaveField:
    """Sample the stationary droplet on the grid, centered at `center`."""
    half = spec.half_width()
    if center - half < grid.x_min or center + half > grid.x_max:
        raise ConfigError(
            f"droplet (half-width ~{half:.1f} at {center}) does not fit "
            f"inside [{grid.x_min}, {grid.x_max})"
        )
    vals = spec.profile_at(grid.x, center)
    return WaveField(grid, vals.astype(np.complex128))


def boost(field: WaveField, v: float, x0: float = 0.0) -> WaveField:
    """Galilean boost: multiply by the plane wave exp(i v (x - x0))."""
    phase = np.exp(1j * v * (field.grid.x - x0))
    return WaveField(field.grid, field.values * phase)


def momentum(field: WaveField) -> float:
    """Total momentum Im int psi* psi_x dx (spectral derivative)."""
    psi = field.values
    k = field.grid.wavenumbers
    dpsi = np.fft.ifft(1j * k * np.fft.fft(psi))
    return integrate(field.grid, np.imag(np.conj(psi) * dpsi))


def free_energy_density(grid: Grid, values: np.ndarray, g: float) -> np.ndarray:
    """Integrand of the free-space energy functional,
    1/2 |psi_x|^2 + g/2 |psi|^4 - 2/3 |psi|^3."""
    k = grid.wavenumbers
    dpsi = np.fft.ifft(1j * k * np.fft.fft(values))
    absv = np.abs(values)
    return 0.5 * np.abs(dpsi) ** 2 + 0.5 * g * absv**4 - (2.0 / 3.0) * absv**3


def stationary_energy(spec: DropletSpec, grid: Grid) -> float:
    """Energy of the stationary droplet (no external potential)."""
    field = droplet_profile(spec, grid)
    return integrate(grid, free_energy_density(grid, field.values, spec.g))
