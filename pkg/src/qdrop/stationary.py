"""Non-dynamical routes to the trapped mode and critical speed.

Two solvers live here: the position-dependent variational method (a nodal
trial profile whose energy is minimized over a slope and a width parameter
at each trial position), and a preconditioned squared-operator iteration
for exact nonlinear stationary states of the driven equation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.fft import fft, ifft
from scipy.optimize import minimize

from .errors import ConfigError, NumericError, PhysicsValidationError
from .family import DropletSpec, stationary_energy
from .grid import Grid, WaveField, integrate
from .potential import PotentialSpec


# ---------------------------------------------------------------------------
# variational method


@dataclass(frozen=True)
class VariationalResult:
    x0: float
    gamma: float
    beta: float
    A_norm: float
    E_z: float
    converged: bool
    interior: bool


def _trial_field(
    spec: DropletSpec,
    grid: Grid,
    x0: float,
    gamma: float,
    beta: float,
) -> tuple[np.ndarray, float]:
    """Normalized nodal trial A psi0[gamma (x - x0)] tanh(beta x)."""
    x = grid.x
    raw = spec.profile_at(gamma * (x - x0)) * np.tanh(beta * x)
    norm2 = integrate(grid, raw * raw)
    if norm2 < 1e-12:
        raise NumericError(
            f"degenerate trial (norm^2={norm2:.2e}) at x0={x0}, "
            f"gamma={gamma}, beta={beta}"
        )
    A = math.sqrt(spec.N / norm2)
    return A * raw, A


def _energy_of_real_field(
    grid: Grid, phi: np.ndarray, g: float, V: np.ndarray
) -> float:
    dphi = ifft(1j * grid.wavenumbers * fft(phi.astype(complex))).real
    absphi = np.abs(phi)
    dens = phi * phi
    return integrate(
        grid,
        0.5 * dphi * dphi + 0.5 * g * dens * dens - (2.0 / 3.0) * absphi**3 + V * dens,
    )


def variational_energy(
    spec: DropletSpec,
    potential: PotentialSpec,
    grid: Grid,
    x0: float,
    gamma: float,
    beta: float,
) -> float:
    """Energy functional of the normalized trial at (x0, gamma, beta)."""
    if gamma <= 0 or beta <= 0:
        raise ConfigError(f"need gamma, beta > 0, got {gamma}, {beta}")
    phi, _ = _trial_field(spec, grid, x0, gamma, beta)
    return _energy_of_real_field(grid, phi, spec.g, potential.values(grid))


_SCAN_LO, _SCAN_HI = 0.2, 5.0


def minimize_trial(
    spec: DropletSpec,
    potential: PotentialSpec,
    grid: Grid,
    x0: float,
    start: tuple[float, float] | None = None,
) -> VariationalResult:
    """Locate the (gamma, beta) local minimum of the trial energy at x0.

    A coarse log-spaced grid scan brackets the minimum unless a warm start
    is supplied; Nelder-Mead (in log parameters, keeping both positive)
    refines it until the simplex energy spread is below 1e-10.
    """
    V = potential.values(grid)

    def energy(log_gb: np.ndarray) -> float:
        gamma, beta = np.exp(log_gb)
        phi, _ = _trial_field(spec, grid, x0, gamma, beta)
        return _energy_of_real_field(grid, phi, spec.g, V)

    if start is None:
        vals = np.geomspace(_SCAN_LO, _SCAN_HI, 14)
        best, best_e = None, np.inf
        for gams in vals:
            for bets in vals:
                e = energy(np.log([gams, bets]))
                if e < best_e:
                    best, best_e = (gams, bets), e
        start = best
    res = minimize(
        energy,
        np.log(start),
        method="Nelder-Mead",
        options={"fatol": 1e-10, "xatol": 1e-9, "maxiter": 4000},
    )
    gamma, beta = np.exp(res.x)
    phi, A = _trial_field(spec, grid, x0, gamma, beta)
    interior = _SCAN_LO * 1.01 < gamma < _SCAN_HI * 0.99 and (
        _SCAN_LO * 1.01 < beta < _SCAN_HI * 0.99
    )
    return VariationalResult(
        x0=x0,
        gamma=float(gamma),
        beta=float(beta),
        A_norm=float(A),
        E_z=float(res.fun),
        converged=bool(res.success),
        interior=interior,
    )


@dataclass
class VariationalScan:
    x0: np.ndarray
    E_z: np.ndarray
    results: list[VariationalResult]
    v_c: float
    x0_star: float
    E_z_max: float
    E_sd: float
    barrier: bool  # False when E_z_max <= E_sd (no reflection barrier)


def variational_critical_speed(
    spec: DropletSpec,
    potential: PotentialSpec,
    grid: Grid,
    x0_range: tuple[float, float] = (-15.0, 0.0),
    coarse_step: float = 0.25,
    fine_step: float = 0.05,
) -> VariationalScan:
    """Scan the trial position, take the energy maximum, convert to speed.

    The scan exploits the left-right symmetry of the zero-speed-state
    energy and only covers x0 <= 0 by default.
    """
    lo, hi = x0_range
    coarse = np.arange(lo, hi + 0.5 * coarse_step, coarse_step)
    results: dict[float, VariationalResult] = {}
    warm: tuple[float, float] | None = None
    for x0 in coarse:
        r = minimize_trial(spec, potential, grid, float(x0), start=warm)
        warm = (r.gamma, r.beta)
        results[float(x0)] = r
    xs = sorted(results)
    best_x0 = max(xs, key=lambda x: results[x].E_z)
    fine = np.arange(
        max(lo, best_x0 - coarse_step),
        min(hi, best_x0 + coarse_step) + 0.5 * fine_step,
        fine_step,
    )
    warm = (results[best_x0].gamma, results[best_x0].beta)
    for x0 in fine:
        x0 = float(round(x0, 10))
        if x0 in results:
            continue
        r = minimize_trial(spec, potential, grid, x0, start=warm)
        warm = (r.gamma, r.beta)
        results[x0] = r
    xs = sorted(results)
    ez = np.array([results[x].E_z for x in xs])
    i_max = int(np.argmax(ez))
    E_z_max = float(ez[i_max])
    E_sd = stationary_energy(spec, grid)
    barrier = E_z_max > E_sd
    v_c = math.sqrt(2.0 * (E_z_max - E_sd) / spec.N) if barrier else 0.0
    return VariationalScan(
        x0=np.asarray(xs),
        E_z=ez,
        results=[results[x] for x in xs],
        v_c=v_c,
        x0_star=float(xs[i_max]),
        E_z_max=E_z_max,
        E_sd=E_sd,
        barrier=barrier,
    )


# ---------------------------------------------------------------------------
# squared-operator method


@dataclass
class StationaryState:
    field: WaveField
    mu: float
    norm: float
    residual: float
    symmetric: bool

    def real_values(self) -> np.ndarray:
        return self.field.values.real


def node_seed(
    spec: DropletSpec,
    grid: Grid,
    node_x: float = 0.0,
    center: float | None = None,
    steepness: float = 2.0,
) -> WaveField:
    """Single-node seed: displaced droplet profile times tanh(node), renormalized.

    center displaces the droplet body; node_x places the sign change.  The
    defaults give a density-symmetric seed with the node at the origin.
    """
    from .family import droplet_profile

    if center is None:
        center = node_x
    psi = droplet_profile(spec, grid, center=center).values.real * np.tanh(
        steepness * (grid.x - node_x)
    )
    psi *= math.sqrt(spec.N / integrate(grid, psi * psi))
    return WaveField(grid, psi.astype(complex))


def _node_count(psi: np.ndarray, floor_frac: float = 1e-3) -> int:
    """Sign changes of psi, ignoring segments below floor_frac of the peak."""
    floor = floor_frac * np.max(np.abs(psi))
    sig = psi[np.abs(psi) > floor]
    return int(np.count_nonzero(np.diff(np.sign(sig)) != 0))


def _som_inner(
    psi: np.ndarray,
    V: np.ndarray,
    g: float,
    mu: float,
    k2: np.ndarray,
    dtau: float,
    c: float,
    tol: float,
    max_iter: int,
    stall_window: int = 10_000,
    require_tol: bool = True,
) -> tuple[np.ndarray, float, list[float]]:
    """Preconditioned squared-operator descent at fixed mu."""
    minv = 1.0 / (c + 0.5 * k2)

    def precond(w: np.ndarray) -> np.ndarray:
        return ifft(minv * fft(w)).real

    def l0(p: np.ndarray) -> np.ndarray:
        lap = ifft(-k2 * fft(p)).real
        return -0.5 * lap + (g * p * p - np.abs(p) + V - mu) * p

    def l1(w: np.ndarray, p: np.ndarray) -> np.ndarray:
        lap = ifft(-k2 * fft(w)).real
        return -0.5 * lap + (3.0 * g * p * p - 2.0 * np.abs(p) + V - mu) * w

    history: list[float] = []
    best, best_iter = np.inf, 0
    for it in range(max_iter):
        r = l0(psi)
        res = float(np.max(np.abs(r)))
        history.append(res)
        if res < tol:
            return psi, res, history
        if res < best:
            best, best_iter = res, it
        elif it - best_iter > stall_window:
            if require_tol:
                raise NumericError(
                    f"squared-operator iteration stalled at residual {best:.2e} "
                    f"(iteration {it}); last residuals {history[-3:]}"
                )
            return psi, res, history
        psi = psi - dtau * precond(l1(precond(r), psi))
    if require_tol:
        raise NumericError(
            f"squared-operator iteration did not reach tol={tol} in "
            f"{max_iter} iterations (residual {history[-1]:.2e})"
        )
    return psi, float(np.max(np.abs(l0(psi)))), history


@lru_cache(maxsize=4)
def _dense_kinetic(grid: Grid) -> np.ndarray:
    """Dense matrix of -1/2 d^2/dx^2 under the grid's spectral derivative."""
    k2 = grid.wavenumbers**2
    return np.real(ifft(0.5 * k2[:, None] * fft(np.eye(grid.n_points), axis=0), axis=0))


def _newton_fixed_norm(
    psi: np.ndarray,
    mu: float,
    V: np.ndarray,
    g: float,
    target_norm: float,
    grid: Grid,
    tol: float,
    norm_rtol: float,
    max_iter: int,
) -> tuple[np.ndarray, float, float]:
    """Damped Newton on (psi, mu) with the norm held at target_norm.

    Flat-top states have a nearly singular direction at fixed mu (a tiny
    change in mu moves a lot of norm into the plateau), which makes
    fixed-mu descent crawl; bordering the Jacobian with the norm
    constraint removes exactly that direction.  Steps are capped at a
    trust radius because near-singular edge modes of wide states produce
    raw Newton steps far outside the quadratic neighbourhood.
    """
    from scipy.linalg import lu_factor, lu_solve

    dx = grid.dx
    kin = _dense_kinetic(grid)
    n = grid.n_points
    idx = np.arange(n)
    trust = 0.5

    def residuals(p: np.ndarray, m: float) -> np.ndarray:
        lap = np.real(ifft(-grid.wavenumbers**2 * fft(p)))
        f1 = -0.5 * lap + (V - m + g * p * p - np.abs(p)) * p
        return np.concatenate([f1, [dx * float(p @ p) - target_norm]])

    f = residuals(psi, mu)
    for _ in range(max_iter):
        if np.max(np.abs(f[:n])) < tol and abs(f[n]) <= norm_rtol * target_norm:
            return psi, mu, float(np.max(np.abs(f[:n])))
        big = np.empty((n + 1, n + 1))
        big[:n, :n] = kin
        big[idx, idx] += V - mu + 3.0 * g * psi * psi - 2.0 * np.abs(psi)
        big[:n, n] = -psi
        big[n, :n] = 2.0 * dx * psi
        big[n, n] = 0.0
        lu = lu_factor(big)
        step = lu_solve(lu, -f)
        step += lu_solve(lu, -f - big @ step)  # one round of refinement
        length = float(np.linalg.norm(step))
        if length > trust:
            step *= trust / length
        nrm = float(np.linalg.norm(f))
        scale = 1.0
        for _ in range(20):
            p_try = psi + scale * step[:n]
            mu_try = mu + scale * step[n]
            f_try = residuals(p_try, mu_try)
            nrm_try = float(np.linalg.norm(f_try))
            if nrm_try < nrm * (1.0 - 1e-4 * scale) or nrm_try < 1e-13:
                break
            scale *= 0.5
        else:
            raise NumericError(
                f"norm-constrained Newton stagnated at residual {nrm:.2e}"
            )
        psi, mu, f = p_try, mu_try, f_try
    raise NumericError(
        f"norm-constrained Newton did not converge in {max_iter} steps "
        f"(residual {np.max(np.abs(f[:n])):.2e})"
    )


def som_solve(
    seed: WaveField,
    potential: PotentialSpec,
    g: float,
    mu: float,
    target_norm: float,
    dtau: float = 0.9,
    c: float = 1.0,
    tol: float = 1e-10,
    norm_rtol: float = 1e-8,
    max_inner: int = 3_000,
    max_outer: int = 100,
) -> StationaryState:
    """Stationary state with the seed's node structure and a prescribed norm.

    First stage: squared-operator descent at the seed's mu, run for at most
    max_inner steps, to pull the seed into the attraction basin.  Second
    stage: norm-constrained Newton on (psi, mu), capped at max_outer steps,
    which converges where fixed-mu descent is slowed to a crawl by the
    soft plateau mode of flat-top states.
    """
    grid = seed.grid
    V = potential.values(grid)
    k2 = grid.wavenumbers**2
    psi = seed.values.real.copy()
    if np.max(np.abs(psi)) <= 0:
        raise PhysicsValidationError("seed field is identically zero")
    nodes0 = _node_count(psi)

    psi, _, _ = _som_inner(
        psi, V, g, mu, k2, dtau, c, tol, max_inner,
        stall_window=max(200, max_inner // 4), require_tol=False,
    )
    psi, mu_out, res = _newton_fixed_norm(
        psi, mu, V, g, target_norm, grid, tol, norm_rtol, max_outer
    )
    if _node_count(psi) != nodes0:
        raise NumericError(
            f"node count changed during iteration ({nodes0} -> "
            f"{_node_count(psi)}); bad seed or step size"
        )
    n_out = integrate(grid, psi * psi)
    return _pack_state(grid, psi, mu_out, n_out, res, potential)


def _pack_state(
    grid: Grid,
    psi: np.ndarray,
    mu: float,
    norm: float,
    residual: float,
    potential: PotentialSpec,
) -> StationaryState:
    mirrored = _mirror_about(grid, psi, potential.center)
    symmetric = bool(
        np.max(np.abs(psi - mirrored)) < 1e-6 * np.max(np.abs(psi))
    )
    return StationaryState(
        field=WaveField(grid, psi.astype(complex)),
        mu=mu,
        norm=norm,
        residual=residual,
        symmetric=symmetric,
    )


def _mirror_about(grid: Grid, psi: np.ndarray, center: float) -> np.ndarray:
    """Sample psi(2*center - x) by Fourier interpolation-free index flip.

    Valid when center sits on a grid point or half-point, which covers the
    well-at-origin setups used here.
    """
    x = grid.x
    j = np.argmin(np.abs(x - center))
    rolled = np.roll(psi, -j)
    flipped = np.roll(rolled[::-1], 1)  # psi(-x) on the periodic grid
    return np.roll(flipped, j)


def stationary_state_energy(state: StationaryState, potential: PotentialSpec, g: float) -> float:
    """Full energy functional (with the well) of a stationary state."""
    grid = state.field.grid
    return _energy_of_real_field(
        grid, state.real_values(), g, potential.values(grid)
    )


def critical_speed_from_energy(E_z: float, E_sd: float, N: float) -> float:
    if E_z <= E_sd:
        return 0.0
    return math.sqrt(2.0 * (E_z - E_sd) / N)
