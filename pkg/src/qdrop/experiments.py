"""Orchestration of the scattering experiments.

Single scattering runs, the dynamical critical-speed search, sweeps of the
critical speed over norm and well depth, the three-way trapped-mode
comparison, and two-droplet collisions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import ConfigError, NumericError, PhysicsValidationError
from .family import DropletSpec, boost, droplet_profile, stationary_energy
from .grid import Grid, WaveField, integrate
from .observables import (
    Classification,
    FieldRecorder,
    ScatterOutcome,
    TrajectoryRecorder,
    TrajectorySeries,
    reflect_transmit,
)
from .potential import PotentialSpec
from .propagate import StepConfig, absorbing_mask, evolve
from .stationary import (
    StationaryState,
    VariationalScan,
    critical_speed_from_energy,
    node_seed,
    som_solve,
    stationary_state_energy,
    variational_critical_speed,
)

DEFAULT_GRID = Grid()


@dataclass(frozen=True)
class ScatterConfig:
    spec: DropletSpec
    potential: PotentialSpec
    v: float
    x_start: float = -30.0
    dt: float = 5e-3
    t_max: float | None = None  # None: 3 |x_start| / v
    l_cut: float | None = None  # None: |x_start| / 2
    threshold: float = 0.95
    grid: Grid = DEFAULT_GRID
    snapshots: bool = False
    snapshot_decimate: int = 4
    absorber: bool = False
    exit_watch: bool = True  # stop once the droplet leaves the region

    def __post_init__(self):
        if self.v <= 0:
            raise ConfigError(f"need incident speed v > 0, got {self.v}")
        # half-width down to ~1e-6 of peak density: "no initial overlap"
        # in the sense of negligible cross density, not full tail support
        clear = self.spec.half_width(tail_log=7.0) + 3.0 / self.potential.alpha
        if abs(self.x_start - self.potential.center) <= clear:
            raise PhysicsValidationError(
                f"droplet at {self.x_start} overlaps the well: need "
                f"|x_start - center| > {clear:.1f}"
            )

    def resolved_t_max(self) -> float:
        if self.t_max is not None:
            return self.t_max
        return 3.0 * abs(self.x_start) / self.v

    def resolved_l(self) -> float:
        if self.l_cut is not None:
            return self.l_cut
        return abs(self.x_start) / 2.0


@dataclass
class ScatterResult:
    outcome: ScatterOutcome
    trajectory: TrajectorySeries
    field: WaveField
    t_final: float
    config: ScatterConfig
    snapshots: FieldRecorder | None = None

    @property
    def classification(self) -> Classification:
        return self.outcome.classification


class _ExitWatch:
    """Stops the evolution once the droplet has left the scattering region."""

    def __init__(self, x_limit: float):
        self.x_limit = x_limit

    def __call__(self, t: float, fld: WaveField) -> bool:
        grid = fld.grid
        dens = fld.density()
        n = float(np.sum(dens) * grid.dx)
        xbar = float(np.sum(grid.x * dens) * grid.dx) / n
        return t > 0.0 and abs(xbar) > self.x_limit


def run_scattering(cfg: ScatterConfig) -> ScatterResult:
    """Boost a droplet toward the well and classify the outcome."""
    fld = boost(
        droplet_profile(cfg.spec, cfg.grid, center=cfg.x_start), cfg.v
    )
    step = StepConfig(dt=cfg.dt, t_final=cfg.resolved_t_max())
    recorder = TrajectoryRecorder(cfg.potential, cfg.spec.g)
    observers: list = [recorder]
    if cfg.exit_watch:
        observers.append(_ExitWatch(abs(cfg.x_start)))
    snaps = None
    if cfg.snapshots:
        snaps = FieldRecorder(decimate=cfg.snapshot_decimate)
        observers.insert(1, snaps)
    mask = absorbing_mask(cfg.grid) if cfg.absorber else None
    res = evolve(
        fld, cfg.potential, cfg.spec.g, step, observers=observers, absorber=mask
    )
    outcome = reflect_transmit(
        res.field,
        cfg.resolved_l(),
        cfg.spec.N,
        t_final=res.t_final,
        threshold=cfg.threshold,
    )
    return ScatterResult(
        outcome=outcome,
        trajectory=recorder.series(),
        field=res.field,
        t_final=res.t_final,
        config=cfg,
        snapshots=snaps,
    )


@dataclass
class CriticalSpeedResult:
    v_c: float
    bracket: tuple[float, float]
    evaluations: list[tuple[float, Classification]]


def _scatter_class(
    spec: DropletSpec, potential: PotentialSpec, v: float, **kw
) -> Classification:
    cfg = ScatterConfig(spec=spec, potential=potential, v=v, **kw)
    return run_scattering(cfg).classification


def critical_speed_ssf(
    spec: DropletSpec,
    potential: PotentialSpec,
    tolerance: float = 1e-4,
    v_bracket: tuple[float, float] = (0.01, 0.2),
    coarse_points: int = 5,
    **run_kwargs,
) -> CriticalSpeedResult:
    """Reflection/transmission threshold speed by bisection.

    The bracket is first narrowed by a coarse scan; a run that ends
    TRAPPED or MIXED is pushed to whichever side its dominant channel
    (R vs T) indicates, which keeps the bisection deterministic.
    """
    if tolerance < 1e-5:
        raise ConfigError("critical-speed tolerance below 1e-5 is not supported")
    lo, hi = v_bracket
    if not (0 < lo < hi):
        raise ConfigError(f"bad speed bracket {v_bracket}")
    evals: list[tuple[float, Classification]] = []

    def classify(v: float) -> Classification:
        cfg = ScatterConfig(spec=spec, potential=potential, v=v, **run_kwargs)
        r = run_scattering(cfg)
        evals.append((v, r.classification))
        return r.classification

    def side(v: float) -> int:
        """-1: below the critical speed, +1: above."""
        cfg = ScatterConfig(spec=spec, potential=potential, v=v, **run_kwargs)
        r = run_scattering(cfg)
        evals.append((v, r.classification))
        if r.classification is Classification.REFLECTED:
            return -1
        if r.classification is Classification.TRANSMITTED:
            return +1
        return -1 if r.outcome.R > r.outcome.T else +1

    vs = np.linspace(lo, hi, coarse_points)
    sides = [side(float(v)) for v in vs]
    bracket = None
    for a, b, sa, sb in zip(vs, vs[1:], sides, sides[1:]):
        if sa < 0 and sb > 0:
            bracket = (float(a), float(b))
            break
    if bracket is None:
        raise ConfigError(
            f"no reflection/transmission crossover in v ∈ [{lo}, {hi}]; "
            "widen the bracket"
        )
    lo, hi = bracket
    while hi - lo > tolerance:
        mid = 0.5 * (lo + hi)
        if side(mid) < 0:
            lo = mid
        else:
            hi = mid
    return CriticalSpeedResult(
        v_c=0.5 * (lo + hi), bracket=(lo, hi), evaluations=evals
    )


@dataclass
class SweepPoint:
    N: float
    U0: float
    v_ssf: float | None
    v_vm: float | None
    error: str | None = None


def critical_speed_curves(
    specs: list[DropletSpec],
    potentials: list[PotentialSpec],
    tolerance: float = 2e-4,
    v_bracket: tuple[float, float] = (0.01, 0.2),
    methods: tuple[str, ...] = ("ssf", "vm"),
    **run_kwargs,
) -> list[SweepPoint]:
    """v_c over a family of (droplet, well) pairs, by SSF and/or VM.

    `specs` and `potentials` are broadcast against each other (either may
    have length 1).  Per-point failures are recorded and the sweep
    continues.
    """
    if len(specs) == 1:
        specs = list(specs) * len(potentials)
    if len(potentials) == 1:
        potentials = list(potentials) * len(specs)
    if len(specs) != len(potentials):
        raise ConfigError("specs and potentials must broadcast to equal length")
    out: list[SweepPoint] = []
    for sp, pot in zip(specs, potentials):
        v_ssf = v_vm = None
        err = None
        try:
            if "ssf" in methods:
                v_ssf = critical_speed_ssf(
                    sp, pot, tolerance=tolerance, v_bracket=v_bracket,
                    **run_kwargs,
                ).v_c
            if "vm" in methods:
                v_vm = variational_critical_speed(sp, pot, DEFAULT_GRID).v_c
        except (ConfigError, NumericError, PhysicsValidationError) as exc:
            err = f"{type(exc).__name__}: {exc}"
        out.append(SweepPoint(N=sp.N, U0=pot.U0, v_ssf=v_ssf, v_vm=v_vm, error=err))
    return out


# ---------------------------------------------------------------------------
# trapped-mode comparison


@dataclass
class TrappedModeComparison:
    profile_ssf: np.ndarray
    profile_vm: np.ndarray
    profile_som: np.ndarray
    x: np.ndarray
    v_ssf: float
    v_vm: float
    v_som: float
    diff_ssf_som: float  # max-norm difference / peak
    diff_ssf_vm: float
    som_state: StationaryState
    vm_scan: VariationalScan


def _align_profiles(a: np.ndarray, b: np.ndarray) -> float:
    """Max-norm difference between |a| and sign-aligned b, relative to peak."""
    a = np.abs(a)
    b = np.abs(b)
    return float(np.max(np.abs(a - b)) / np.max(a))


def trapped_mode_comparison(
    spec: DropletSpec,
    potential: PotentialSpec,
    v_ssf: float | None = None,
    tolerance: float = 1e-4,
    v_bracket: tuple[float, float] = (0.01, 0.2),
    grid: Grid = DEFAULT_GRID,
    x_start: float = -30.0,
) -> TrappedModeComparison:
    """Compare the trapped mode from dynamics (SSF), VM and the node state (SOM).

    The SSF profile is the snapshot of least center-of-mass speed while the
    droplet is still inside the cut region, taken from a run at the
    measured critical speed.
    """
    if v_ssf is None:
        v_ssf = critical_speed_ssf(
            spec, potential, tolerance=tolerance, v_bracket=v_bracket,
            x_start=x_start,
        ).v_c
    cfg = ScatterConfig(
        spec=spec, potential=potential, v=v_ssf, x_start=x_start,
        snapshots=True, snapshot_decimate=1,
    )
    run = run_scattering(cfg)
    traj = run.trajectory
    l_cut = cfg.resolved_l()
    xdot = np.gradient(traj.xbar, traj.times)
    inside = np.abs(traj.xbar) < l_cut
    # ignore the approach: only frames after the droplet enters the cut
    # region (wide droplets turn around before their center reaches the well)
    arrived = traj.xbar - potential.center > -l_cut
    if not np.any(arrived):
        raise NumericError("droplet never reached the well at v = v_c")
    t0 = traj.times[np.argmax(arrived)]
    usable = inside & (traj.times >= t0)
    if not np.any(usable):
        raise NumericError("no trapped frames found at v = v_c")
    cand = np.where(usable, np.abs(xdot), np.inf)
    k = int(np.argmin(cand))
    snaps = run.snapshots
    times = np.asarray(snaps.times)
    frame = snaps.frames[int(np.argmin(np.abs(times - traj.times[k])))]

    scan = variational_critical_speed(spec, potential, grid)
    vm_best = scan.results[int(np.argmax(scan.E_z))]
    from .stationary import _trial_field

    vm_profile, _ = _trial_field(
        spec, grid, vm_best.x0, vm_best.gamma, vm_best.beta
    )

    som = som_solve(
        node_seed(spec, grid, node_x=potential.center, center=scan.x0_star),
        potential, spec.g, spec.mu, spec.N,
    )
    if abs(scan.x0_star) > 1.0:
        # a displaced energy maximum means the metastable mode is the
        # unbalanced branch; a seed at x0_star can still relax into the
        # balanced basin, so push the seed further out if that happened
        dens = np.abs(som.real_values()) ** 2
        mirror = np.roll(dens[::-1], 1)
        if np.max(np.abs(dens - mirror)) / np.max(dens) < 1e-3:
            som = som_solve(
                node_seed(
                    spec, grid, node_x=potential.center,
                    center=math.copysign(abs(scan.x0_star) + 3.0, scan.x0_star),
                ),
                potential, spec.g, spec.mu, spec.N,
            )
    e1 = stationary_state_energy(som, potential, spec.g)
    e0 = stationary_energy(spec, grid)
    v_som = critical_speed_from_energy(e1, e0, spec.N)

    prof_ssf = np.abs(frame)
    return TrappedModeComparison(
        profile_ssf=prof_ssf,
        profile_vm=vm_profile,
        profile_som=som.real_values(),
        x=grid.x,
        v_ssf=v_ssf,
        v_vm=scan.v_c,
        v_som=v_som,
        diff_ssf_som=_align_profiles(prof_ssf, som.real_values()),
        diff_ssf_vm=_align_profiles(prof_ssf, vm_profile),
        som_state=som,
        vm_scan=scan,
    )


# ---------------------------------------------------------------------------
# two-droplet collisions


COLLISION_OUTCOMES = ("REPEL", "MERGE", "PASS", "MASS_TRANSFER", "FRAGMENT")


@dataclass(frozen=True)
class CollisionConfig:
    g: float
    N1: float
    N2: float
    v: float
    phi: float
    x0: float = 20.0  # droplets start at -x0 and +x0
    potential: PotentialSpec | None = None  # None: free space
    dt: float = 5e-3
    t_max: float | None = None  # None: 3 x0 / v
    grid: Grid = DEFAULT_GRID

    def __post_init__(self):
        if self.v <= 0:
            raise ConfigError(f"need speed v > 0, got {self.v}")
        if self.x0 <= 0:
            raise ConfigError(f"need separation x0 > 0, got {self.x0}")

    def resolved_t_max(self) -> float:
        return self.t_max if self.t_max is not None else 3.0 * self.x0 / self.v

    def resolved_potential(self) -> PotentialSpec:
        if self.potential is not None:
            return self.potential
        return PotentialSpec(U0=0.0, alpha=1.0)


@dataclass
class CollisionResult:
    outcome: str
    times: np.ndarray
    mass_left: np.ndarray
    mass_center: np.ndarray
    mass_right: np.ndarray
    field: WaveField
    config: CollisionConfig
    snapshots: FieldRecorder | None = None


def collision_initial_state(cfg: CollisionConfig) -> WaveField:
    """Two counter-propagating droplets with a relative phase on the left one."""
    grid = cfg.grid
    s1 = DropletSpec.from_norm(cfg.g, cfg.N1)
    s2 = DropletSpec.from_norm(cfg.g, cfg.N2)
    f1 = droplet_profile(s1, grid, center=-cfg.x0).values
    f2 = droplet_profile(s2, grid, center=+cfg.x0).values
    cross = float(np.max(np.abs(f1) * np.abs(f2)))
    if cross > 1e-8:
        raise PhysicsValidationError(
            f"droplets overlap initially (cross-density {cross:.1e}); "
            "increase the separation"
        )
    vals = (
        np.exp(1j * (cfg.v * grid.x + cfg.phi)) * f1
        + np.exp(-1j * cfg.v * grid.x) * f2
    )
    return WaveField(grid, vals)


def _classify_collision(
    times: np.ndarray,
    m_left: np.ndarray,
    m_center: np.ndarray,
    m_right: np.ndarray,
    dens_final: np.ndarray,
    N1: float,
    N2: float,
    min_gap: float,
    gap_threshold: float,
) -> str:
    """Label a collision from the thirds-mass series and the final density.

    Thresholds: MERGE if the central fraction stays above 0.8 over the last
    fifth of the run; FRAGMENT if more than two final clusters carry over 5%
    of the mass each; MASS_TRANSFER if either side's final mass shifted by
    more than 10% of that side's initial share; PASS if the two density
    peaks came within a few tail lengths of each other at closest approach
    (packets slide through the encounter), REPEL if they turned around
    while still separated by a droplet width.
    """
    total = N1 + N2
    tail = times >= times[0] + 0.8 * (times[-1] - times[0])
    if np.all(m_center[tail] > 0.8 * total):
        return "MERGE"
    peak = float(np.max(dens_final))
    occupied = dens_final > 0.05 * peak
    clusters = int(np.count_nonzero(np.diff(occupied.astype(int)) == 1)
                   + (1 if occupied[0] else 0))
    if clusters > 2:
        return "FRAGMENT"
    if abs(m_left[-1] - N1) > 0.1 * N1 or abs(m_right[-1] - N2) > 0.1 * N2:
        return "MASS_TRANSFER"
    if min_gap < gap_threshold:
        return "PASS"
    return "REPEL"


def run_collision(cfg: CollisionConfig, snapshots: bool = False) -> CollisionResult:
    fld = collision_initial_state(cfg)
    potential = cfg.resolved_potential()
    step = StepConfig(dt=cfg.dt, t_final=cfg.resolved_t_max())
    grid = cfg.grid
    b = cfg.x0 / 2.0
    left = grid.x < -b
    right = grid.x > b
    center = ~(left | right)
    times: list[float] = []
    ml: list[float] = []
    mc: list[float] = []
    mr: list[float] = []

    half = grid.x < 0.0
    gaps: list[float] = []

    def thirds(t: float, f: WaveField) -> None:
        dens = f.density()
        times.append(t)
        ml.append(float(np.sum(dens[left]) * grid.dx))
        mc.append(float(np.sum(dens[center]) * grid.dx))
        mr.append(float(np.sum(dens[right]) * grid.dx))
        # gap between the density peaks of the two halves
        pl = grid.x[half][int(np.argmax(dens[half]))]
        pr = grid.x[~half][int(np.argmax(dens[~half]))]
        gaps.append(float(pr - pl))

    observers = [thirds]
    snaps = None
    if snapshots:
        snaps = FieldRecorder(decimate=4)
        observers.append(snaps)
    res = evolve(fld, potential, cfg.g, step, observers=observers)
    t_arr = np.asarray(times)
    ml_a, mc_a, mr_a = np.asarray(ml), np.asarray(mc), np.asarray(mr)
    # closest-approach scale: tail decay length of the wider droplet
    kappa = min(
        math.sqrt(-2.0 * DropletSpec.from_norm(cfg.g, n).mu)
        for n in (cfg.N1, cfg.N2)
    )
    outcome = _classify_collision(
        t_arr, ml_a, mc_a, mr_a, res.field.density(), cfg.N1, cfg.N2,
        min_gap=float(np.min(gaps)), gap_threshold=3.0 / kappa,
    )
    return CollisionResult(
        outcome=outcome,
        times=t_arr,
        mass_left=ml_a,
        mass_center=mc_a,
        mass_right=mr_a,
        field=res.field,
        config=cfg,
        snapshots=snaps,
    )
