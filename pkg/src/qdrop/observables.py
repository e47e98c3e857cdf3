"""Diagnostics over fields and recorded time series.

Includes the reflection/transmission bookkeeping, center-of-mass and width
moments, the kinetic/interaction/potential energy split, the effective
potential reconstructed from the center-of-mass trajectory, and spectral
extraction of the breathing frequency.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.fft import fft, ifft
from scipy.integrate import cumulative_trapezoid
from scipy.signal import savgol_filter

from .errors import ConfigError, PhysicsValidationError
from .grid import Grid, WaveField, integrate
from .potential import PotentialSpec


class Classification(enum.Enum):
    REFLECTED = "REFLECTED"
    TRANSMITTED = "TRANSMITTED"
    TRAPPED = "TRAPPED"
    MIXED = "MIXED"


@dataclass(frozen=True)
class ScatterOutcome:
    R: float
    T: float
    trapped: float
    classification: Classification
    t_final: float
    cut_length: float


def reflect_transmit(
    field: WaveField,
    l: float,
    N: float,
    t_final: float = 0.0,
    threshold: float = 0.95,
) -> ScatterOutcome:
    """R and T from the mass on the half-lines x < -l and x > l."""
    grid = field.grid
    if l >= min(-grid.x_min, grid.x_max):
        raise ConfigError(f"cut length l={l} exceeds the half-domain")
    if l < 0:
        raise ConfigError(f"need l >= 0, got {l}")
    x = grid.x
    dens = field.density()
    R = float(np.sum(dens[x < -l]) * grid.dx) / N
    T = float(np.sum(dens[x > l]) * grid.dx) / N
    trapped = 1.0 - R - T
    if R > threshold:
        cls = Classification.REFLECTED
    elif T > threshold:
        cls = Classification.TRANSMITTED
    elif trapped > threshold:
        cls = Classification.TRAPPED
    else:
        cls = Classification.MIXED
    return ScatterOutcome(R, T, trapped, cls, t_final, l)


def center_of_mass(field: WaveField) -> float:
    dens = field.density()
    n = float(np.sum(dens) * field.grid.dx)
    if n <= 0:
        raise PhysicsValidationError("zero-norm field has no center of mass")
    return float(np.sum(field.grid.x * dens) * field.grid.dx) / n


def width(field: WaveField) -> float:
    """Root-mean-square size X = sqrt(<(x - xbar)^2>)."""
    dens = field.density()
    n = float(np.sum(dens) * field.grid.dx)
    if n <= 0:
        raise PhysicsValidationError("zero-norm field has no width")
    x = field.grid.x
    xbar = float(np.sum(x * dens) * field.grid.dx) / n
    var = float(np.sum((x - xbar) ** 2 * dens) * field.grid.dx) / n
    return math.sqrt(var)


def energy_partition(
    field: WaveField, potential: PotentialSpec, g: float
) -> tuple[float, float, float]:
    """(kinetic, interaction, potential) energies; their sum is conserved."""
    grid = field.grid
    psi = field.values
    dpsi = ifft(1j * grid.wavenumbers * fft(psi))
    absv = np.abs(psi)
    e_kin = integrate(grid, 0.5 * np.abs(dpsi) ** 2)
    e_int = integrate(grid, 0.5 * g * absv**4 - (2.0 / 3.0) * absv**3)
    e_pot = integrate(grid, potential.values(grid) * absv**2)
    return e_kin, e_int, e_pot


@dataclass
class TrajectorySeries:
    """Per-frame diagnostics recorded during an evolution."""

    times: np.ndarray
    xbar: np.ndarray
    width: np.ndarray
    e_kin: np.ndarray
    e_int: np.ndarray
    e_pot: np.ndarray

    def __post_init__(self):
        n = len(self.times)
        for name in ("xbar", "width", "e_kin", "e_int", "e_pot"):
            if len(getattr(self, name)) != n:
                raise ConfigError(f"series length mismatch in {name}")

    @property
    def total_energy(self) -> np.ndarray:
        return self.e_kin + self.e_int + self.e_pot

    def dt(self) -> float:
        if len(self.times) < 2:
            raise ConfigError("need at least two frames")
        return float(self.times[1] - self.times[0])


class TrajectoryRecorder:
    """Observer collecting center of mass, width and the energy split."""

    def __init__(self, potential: PotentialSpec, g: float, energies: bool = True):
        self.potential = potential
        self.g = g
        self.energies = energies
        self._t: list[float] = []
        self._xbar: list[float] = []
        self._width: list[float] = []
        self._ek: list[float] = []
        self._ei: list[float] = []
        self._ep: list[float] = []
        self._V: np.ndarray | None = None

    def __call__(self, t: float, fld: WaveField) -> None:
        grid = fld.grid
        dens = fld.density()
        n = float(np.sum(dens) * grid.dx)
        x = grid.x
        xbar = float(np.sum(x * dens) * grid.dx) / n
        var = float(np.sum((x - xbar) ** 2 * dens) * grid.dx) / n
        self._t.append(t)
        self._xbar.append(xbar)
        self._width.append(math.sqrt(max(var, 0.0)))
        if self.energies:
            ek, ei, ep = energy_partition(fld, self.potential, self.g)
            self._ek.append(ek)
            self._ei.append(ei)
            self._ep.append(ep)

    def series(self) -> TrajectorySeries:
        n = len(self._t)
        zeros = np.zeros(n)
        return TrajectorySeries(
            times=np.asarray(self._t),
            xbar=np.asarray(self._xbar),
            width=np.asarray(self._width),
            e_kin=np.asarray(self._ek) if self.energies else zeros,
            e_int=np.asarray(self._ei) if self.energies else zeros.copy(),
            e_pot=np.asarray(self._ep) if self.energies else zeros.copy(),
        )


class FieldRecorder:
    """Observer storing field snapshots, optionally decimated in x."""

    def __init__(self, decimate: int = 1):
        self.decimate = decimate
        self.times: list[float] = []
        self.frames: list[np.ndarray] = []

    def __call__(self, t: float, fld: WaveField) -> None:
        self.times.append(t)
        self.frames.append(fld.values[:: self.decimate].copy())


@dataclass
class EffectivePotentialCurve:
    positions: np.ndarray  # xbar along the trajectory (parametric in t)
    values: np.ndarray  # V_eff[xbar(t)] from the force integral
    values_energy_form: np.ndarray  # cross-check, E_d - N xdot^2 / 2
    E_sd: float
    times: np.ndarray


def _smooth_window(times: np.ndarray, span: float) -> int:
    dt = float(times[1] - times[0])
    n = max(5, int(round(span / dt)) | 1)  # odd, at least 5 points
    if n >= len(times):
        raise ConfigError(
            f"trajectory too short for a {span}-time-unit smoothing window"
        )
    return n


def effective_potential(
    traj: TrajectorySeries,
    N: float,
    E_sd: float,
    smooth_span: float = 1.0,
) -> EffectivePotentialCurve:
    """Classical-particle potential from the center-of-mass trajectory.

    The acceleration comes from a moving least-squares quadratic fit (raw
    second differences of quadrature-level noise are unusable), and the
    force is integrated parametrically in t, so non-monotone xbar segments
    need no special casing.
    """
    t = traj.times
    win = _smooth_window(t, smooth_span)
    dt = traj.dt()
    xdot = savgol_filter(traj.xbar, win, 2, deriv=1, delta=dt)
    xddot = savgol_filter(traj.xbar, win, 2, deriv=2, delta=dt)
    # V_eff(t) = E_sd - N int xddot dxbar, with dxbar = xdot dt
    force_int = cumulative_trapezoid(xddot * xdot, t, initial=0.0)
    v_eff = E_sd - N * force_int
    E_d = E_sd + 0.5 * N * xdot[0] ** 2
    v_energy = E_d - 0.5 * N * xdot**2
    return EffectivePotentialCurve(
        positions=traj.xbar.copy(),
        values=v_eff,
        values_energy_form=v_energy,
        E_sd=E_sd,
        times=t.copy(),
    )


@dataclass(frozen=True)
class BreathingResult:
    omega: float
    amplitude: float
    detected: bool


def breathing_frequency(
    traj: TrajectorySeries,
    window: tuple[float, float],
    amplitude_floor: float = 1e-6,
) -> BreathingResult:
    """Dominant oscillation frequency of the width X(t) inside `window`.

    Linearly detrends, applies a Hann window, and refines the discrete
    spectral peak by quadratic interpolation of the magnitude.
    """
    t0, t1 = window
    sel = (traj.times >= t0) & (traj.times <= t1)
    if np.count_nonzero(sel) < 16:
        raise ConfigError("breathing window contains fewer than 16 frames")
    t = traj.times[sel]
    x = traj.width[sel]
    dt = float(t[1] - t[0])
    coef = np.polyfit(t, x, 1)
    resid = x - np.polyval(coef, t)
    amplitude = 0.5 * (resid.max() - resid.min())
    if amplitude < amplitude_floor:
        return BreathingResult(0.0, amplitude, False)
    n = len(resid)
    spec = np.abs(np.fft.rfft(resid * np.hanning(n)))
    j = int(np.argmax(spec[1:-1])) + 1
    m_minus, m0, m_plus = spec[j - 1], spec[j], spec[j + 1]
    denom = m_minus - 2.0 * m0 + m_plus
    shift = 0.0 if denom == 0 else 0.5 * (m_minus - m_plus) / denom
    freq = (j + shift) / (n * dt)
    return BreathingResult(2.0 * math.pi * freq, amplitude, True)
