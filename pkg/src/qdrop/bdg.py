"""Linear excitation spectrum of the free-space droplet.

Linearizing the equation of motion around the real ground state psi_0
gives the block eigenproblem with single-particle operator
T = -dxx/2 - mu + 2 g psi_0^2 - (3/2) psi_0 and coupling
M = g psi_0^2 - psi_0 / 2.  For real psi_0 it reduces to
(T - M)(T + M) f = omega^2 f, which avoids a non-Hermitian eigensolve of
twice the size; the full 2n form is kept as a cross-check path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.fft import fft, ifft

from .errors import ConfigError, NumericError
from .family import DropletSpec
from .grid import Grid

#: modes with |omega| below this are the symmetry-forced zero modes
ZERO_MODE_CUTOFF = 1e-6

#: default grid for spectra; the droplets used here decay far below 1e-15
#: at |x| = 64, and 1024 points keep the dense eigensolve cheap
DEFAULT_BDG_GRID = Grid(-64.0, 64.0, 1024)


@dataclass
class BdGSpectrum:
    omegas: np.ndarray  # sorted, nonnegative
    u: np.ndarray  # (n_modes, n_points)
    v: np.ndarray
    threshold: float  # particle-emission threshold -mu
    localized: np.ndarray  # bool per mode
    zero_mode: np.ndarray  # bool per mode (phase / translation null space)
    grid: Grid
    unstable: bool = False

    def localized_below_threshold(self) -> np.ndarray:
        """Frequencies of localized internal modes strictly inside (0, -mu)."""
        sel = self.localized & ~self.zero_mode & (self.omegas < self.threshold)
        return self.omegas[sel]


def _spectral_laplacian(grid: Grid) -> np.ndarray:
    """Dense Laplacian matrix, exact for band-limited periodic functions."""
    n = grid.n_points
    k2 = grid.wavenumbers**2
    eye = np.eye(n)
    return np.real(ifft(-k2[:, None] * fft(eye, axis=0), axis=0))


def _is_localized(f: np.ndarray, ratio: float = 1e-6) -> bool:
    peak = np.max(np.abs(f))
    if peak == 0:
        return False
    n = len(f)
    edge = max(np.max(np.abs(f[: n // 32])), np.max(np.abs(f[-n // 32 :])))
    if edge >= ratio * peak:
        return False
    # participation-ratio sanity check: continuum leftovers are extended
    p = np.abs(f) ** 2
    pr = np.sum(p) ** 2 / (np.sum(p**2) * n)
    return pr < 0.5


def _zero_subspace(grid: Grid, psi0: np.ndarray, Hp: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the reduced problem's analytic null space.

    (T-M) psi0 = 0 and (T+M) psi0' = 0, so the omega = 0 eigenvectors of
    (T-M)(T+M) are psi0' and the solution q of (T+M) q = psi0.
    """
    dpsi0 = ifft(1j * grid.wavenumbers * fft(psi0.astype(complex))).real
    q = np.linalg.lstsq(Hp, psi0, rcond=None)[0]
    basis = np.stack([dpsi0, q], axis=1)
    qmat, _ = np.linalg.qr(basis)
    return qmat


def bdg_spectrum(
    spec: DropletSpec,
    grid: Grid = DEFAULT_BDG_GRID,
    method: str = "reduced",
    boundary_ratio: float = 1e-6,
) -> BdGSpectrum:
    """Discrete excitation spectrum of the droplet on the given grid.

    ``boundary_ratio`` sets how small a mode's boundary amplitude must be
    (relative to its peak) to count as localized; modes just below the
    emission threshold decay slowly and may need a looser ratio or a
    wider grid.
    """
    half = spec.half_width()
    if half > 0.9 * min(-grid.x_min, grid.x_max):
        raise ConfigError(
            f"droplet half-width {half:.1f} too large for the BdG grid"
        )
    kappa = np.sqrt(-2.0 * spec.mu)
    if kappa * grid.dx > 0.5:
        raise ConfigError(
            f"grid too coarse for this droplet: dx={grid.dx} vs tail "
            f"scale {1.0 / kappa:.3f}; refine n_points"
        )
    psi0 = spec.profile_at(grid.x)
    mu = spec.mu
    g = spec.g
    lap = _spectral_laplacian(grid)
    T = -0.5 * lap + np.diag(-mu + 2.0 * g * psi0**2 - 1.5 * psi0)
    M = np.diag(g * psi0**2 - 0.5 * psi0)

    if method == "reduced":
        omega2, s_modes, artifact = _solve_reduced(T, M)
        omega2 = omega2[~artifact]
        s_modes = s_modes[:, ~artifact]
    elif method == "full":
        omega2, s_modes = _solve_full(T, M)
    else:
        raise ConfigError(f"unknown BdG method {method!r}")

    scale = float(np.max(np.abs(omega2)))
    unstable = bool(np.min(omega2) < -1e-10 * max(1.0, scale))
    omega = np.sqrt(np.clip(omega2, 0.0, None))
    order = np.argsort(omega)
    omega = omega[order]
    s_modes = s_modes[:, order]

    n = grid.n_points
    TpM = T + M
    zero_basis = _zero_subspace(grid, psi0, TpM)
    u = np.empty((n, len(omega)))
    v = np.empty_like(u)
    zero_flags = np.zeros(len(omega), dtype=bool)
    # the omega^2 eigensolve pins true zero modes only to ~eps * ||H||;
    # anything below that floor with dominant overlap on the analytic null
    # space (psi0' and (T+M)^+ psi0) is a symmetry mode, not an excitation
    zero_floor = np.sqrt(1e-10 * max(1.0, scale))
    for j, w in enumerate(omega):
        s = s_modes[:, j]
        s = s / np.linalg.norm(s)
        if w < zero_floor:
            proj = zero_basis.T @ s
            zero_flags[j] = float(proj @ proj) > 0.5
        if w > ZERO_MODE_CUTOFF and not zero_flags[j]:
            d = (TpM @ s) / w
        else:
            d = np.zeros_like(s)
        u[:, j] = 0.5 * (s + d)
        v[:, j] = 0.5 * (s - d)
    localized = np.array(
        [_is_localized(s_modes[:, j], boundary_ratio) for j in range(len(omega))]
    )
    return BdGSpectrum(
        omegas=omega,
        u=u.T,
        v=v.T,
        threshold=-mu,
        localized=localized,
        zero_mode=zero_flags,
        grid=grid,
        unstable=unstable,
    )


def _solve_reduced(T: np.ndarray, M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Solve (T-M)(T+M) s = omega^2 s via a symmetric similarity transform.

    T-M is positive semidefinite for a nodeless ground state (its kernel
    is the state itself), so A = (T-M)^(1/2) is well defined and
    A (T+M) A y = omega^2 y with s = A y is an equivalent symmetric
    problem.  A symmetric eigensolve keeps the zero modes pinned near
    machine precision and cannot mix them with a nearby soft excitation,
    which the non-symmetric product does for flat-top states.

    Returns (omega^2, s columns, artifact mask); masked columns are pure
    null-space artifacts of the transform (y in ker A), not physical modes.
    """
    from scipy.linalg import eigh

    lam, Q = eigh(T - M)
    if lam[0] < -1e-8 * max(1.0, lam[-1]):
        raise NumericError("T-M is not positive semidefinite; state is not a ground state")
    root = np.sqrt(np.clip(lam, 0.0, None))
    A = (Q * root) @ Q.T

    S = A @ (T + M) @ A
    S = 0.5 * (S + S.T)
    w, y = eigh(S)
    s = A @ y
    norms = np.linalg.norm(s, axis=0)
    artifact = norms < 1e-10
    if np.any(artifact):
        s[:, artifact] = y[:, artifact]
    return w, s, artifact


def _solve_full(T: np.ndarray, M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Direct eigensolve of the 2n block form; returns the omega >= 0 half."""
    from scipy.linalg import eig

    n = T.shape[0]
    big = np.block([[T, M], [-M, -T]])
    w, vecs = eig(big)
    if np.max(np.abs(w.imag)) > 1e-6:
        raise NumericError("full BdG problem produced complex frequencies")
    w = w.real
    keep = w > -ZERO_MODE_CUTOFF
    # deduplicate the +/- pairs: keep omega >= 0, plus one copy of each
    # zero mode (they appear twice)
    w_keep = w[keep]
    s = vecs[:n, keep].real + vecs[n:, keep].real  # u + v
    return w_keep**2 * np.sign(w_keep), s


def breathing_mode(spectrum: BdGSpectrum) -> float | None:
    """Frequency of the lowest localized mode above the zero modes.

    Returns None when no localized mode exists below the emission threshold
    (the soliton-like regime).
    """
    cands = spectrum.localized_below_threshold()
    if len(cands) == 0:
        return None
    return float(cands[0])
