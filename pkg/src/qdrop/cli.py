"""Command-line interface.

Every subcommand reads an optional INI config plus `--set section.key=value`
overrides, runs one experiment, and writes a run directory containing
tab-separated tables, optional snapshot files, and a `manifest.json` that
echoes the full configuration and the summary scalars.

Exit codes: 0 success, 2 config error, 3 physics-validation error,
4 numeric failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from .bdg import bdg_spectrum, breathing_mode
from .errors import ConfigError, NumericError, PhysicsValidationError
from .family import droplet_profile, stationary_energy
from .observables import effective_potential
from .presets import preset_jobs
from .runio import Config, RunManifest, parse_config, write_manifest, write_series, write_snapshots
from .stationary import (
    critical_speed_from_energy,
    node_seed,
    som_solve,
    stationary_state_energy,
    variational_critical_speed,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PHYSICS = 3
EXIT_NUMERIC = 4


def _scatter_config(cfg: Config, **kw):
    from .experiments import ScatterConfig

    base = dict(
        spec=cfg.droplet_spec(),
        potential=cfg.potential_spec(),
        v=cfg.get("experiments", "v"),
        x_start=cfg.get("experiments", "x_start"),
        dt=cfg.get("propagator", "dt"),
        t_max=cfg.get("propagator", "t_max"),
        l_cut=cfg.get("experiments", "l_cut"),
        threshold=cfg.get("experiments", "threshold"),
        grid=cfg.grid_spec(),
        snapshots=cfg.get("experiments", "snapshots"),
        snapshot_decimate=cfg.get("experiments", "snapshot_decimate"),
        absorber=cfg.get("experiments", "absorber"),
        exit_watch=cfg.get("experiments", "exit_watch"),
    )
    base.update(kw)
    return ScatterConfig(**base)


def _finalize(
    run_dir: Path,
    command: str,
    cfg: Config,
    summary: dict,
    files: list[Path],
    t0: float,
) -> None:
    manifest = RunManifest(
        command=command,
        config=cfg.flat(),
        summary=summary,
        files=[p.name for p in files],
        wall_time_s=time.time() - t0,
    )
    write_manifest(run_dir, manifest)


def _write_trajectory(run_dir: Path, traj) -> Path:
    return write_series(
        run_dir,
        "trajectory",
        {
            "t": traj.times,
            "xbar": traj.xbar,
            "width": traj.width,
            "e_kin": traj.e_kin,
            "e_int": traj.e_int,
            "e_pot": traj.e_pot,
        },
    )


# ---------------------------------------------------------------------------
# subcommands


def _cmd_groundstate(cfg: Config, run_dir: Path, t0: float) -> None:
    spec = cfg.droplet_spec()
    grid = cfg.grid_spec()
    fld = droplet_profile(spec, grid)
    files = [
        write_series(
            run_dir,
            "profile",
            {"x": grid.x, "psi": fld.values.real, "density": fld.density()},
        )
    ]
    summary = {
        "g": spec.g,
        "N": spec.N,
        "mu": spec.mu,
        "E_sd": stationary_energy(spec, grid),
        "peak_density": float(np.max(fld.density())),
        "half_width": spec.half_width(),
    }
    _finalize(run_dir, "groundstate", cfg, summary, files, t0)


def _cmd_scatter(cfg: Config, run_dir: Path, t0: float) -> None:
    from .experiments import run_scattering

    sc = _scatter_config(cfg)
    res = run_scattering(sc)
    files = [_write_trajectory(run_dir, res.trajectory)]
    files.append(
        write_series(
            run_dir,
            "final_field",
            {
                "x": sc.grid.x,
                "re_psi": res.field.values.real,
                "im_psi": res.field.values.imag,
                "density": res.field.density(),
            },
        )
    )
    if res.snapshots is not None:
        files += write_snapshots(
            run_dir,
            res.snapshots.times,
            sc.grid.x[:: sc.snapshot_decimate],
            res.snapshots.frames,
        )
    summary = {
        "R": res.outcome.R,
        "T": res.outcome.T,
        "trapped": res.outcome.trapped,
        "classification": res.classification.value,
        "t_final": res.t_final,
        "cut_length": res.outcome.cut_length,
    }
    _finalize(run_dir, "scatter", cfg, summary, files, t0)


def _cmd_critical_speed(cfg: Config, run_dir: Path, t0: float) -> None:
    from .experiments import critical_speed_ssf

    res = critical_speed_ssf(
        cfg.droplet_spec(),
        cfg.potential_spec(),
        tolerance=cfg.get("experiments", "tolerance"),
        v_bracket=(cfg.get("experiments", "v_min"), cfg.get("experiments", "v_max")),
        coarse_points=cfg.get("experiments", "coarse_points"),
        x_start=cfg.get("experiments", "x_start"),
        dt=cfg.get("propagator", "dt"),
        grid=cfg.grid_spec(),
    )
    files = [
        write_series(
            run_dir,
            "evaluations",
            {
                "v": [v for v, _ in res.evaluations],
                "classification": [c.value for _, c in res.evaluations],
            },
        )
    ]
    summary = {
        "v_c": res.v_c,
        "bracket_lo": res.bracket[0],
        "bracket_hi": res.bracket[1],
        "n_evaluations": len(res.evaluations),
    }
    _finalize(run_dir, "critical-speed", cfg, summary, files, t0)


def _cmd_vm_scan(cfg: Config, run_dir: Path, t0: float) -> None:
    scan = variational_critical_speed(
        cfg.droplet_spec(),
        cfg.potential_spec(),
        cfg.grid_spec(),
        x0_range=(cfg.get("stationary", "x0_min"), cfg.get("stationary", "x0_max")),
    )
    files = [
        write_series(
            run_dir,
            "scan",
            {
                "x0": scan.x0,
                "E_z": scan.E_z,
                "gamma": [r.gamma for r in scan.results],
                "beta": [r.beta for r in scan.results],
            },
        )
    ]
    summary = {
        "v_c": scan.v_c,
        "x0_star": scan.x0_star,
        "E_z_max": scan.E_z_max,
        "E_sd": scan.E_sd,
        "barrier": scan.barrier,
    }
    _finalize(run_dir, "vm-scan", cfg, summary, files, t0)


def _cmd_som(cfg: Config, run_dir: Path, t0: float) -> None:
    spec = cfg.droplet_spec()
    grid = cfg.grid_spec()
    potential = cfg.potential_spec()
    if cfg.get("stationary", "node"):
        seed = node_seed(
            spec,
            grid,
            node_x=cfg.get("stationary", "node_x"),
            center=cfg.get("stationary", "seed_center"),
        )
    else:
        seed = droplet_profile(spec, grid)
    state = som_solve(
        seed,
        potential,
        spec.g,
        spec.mu,
        spec.N,
        dtau=cfg.get("stationary", "dtau"),
        c=cfg.get("stationary", "c"),
        tol=cfg.get("stationary", "tol"),
    )
    e1 = stationary_state_energy(state, potential, spec.g)
    e0 = stationary_energy(spec, grid)
    files = [
        write_series(
            run_dir,
            "state",
            {"x": grid.x, "psi": state.real_values(), "density": state.real_values() ** 2},
        )
    ]
    summary = {
        "mu": state.mu,
        "norm": state.norm,
        "residual": state.residual,
        "symmetric": state.symmetric,
        "E": e1,
        "E_sd": e0,
        "v_c_energy": critical_speed_from_energy(e1, e0, spec.N) if e1 > e0 else 0.0,
    }
    _finalize(run_dir, "som", cfg, summary, files, t0)


def _cmd_trapped_mode(cfg: Config, run_dir: Path, t0: float) -> None:
    from .experiments import trapped_mode_comparison

    cmp_ = trapped_mode_comparison(
        cfg.droplet_spec(),
        cfg.potential_spec(),
        tolerance=cfg.get("experiments", "tolerance"),
        v_bracket=(cfg.get("experiments", "v_min"), cfg.get("experiments", "v_max")),
        grid=cfg.grid_spec(),
        x_start=cfg.get("experiments", "x_start"),
    )
    files = [
        write_series(
            run_dir,
            "profiles",
            {
                "x": cmp_.x,
                "ssf": cmp_.profile_ssf,
                "vm": cmp_.profile_vm,
                "som": cmp_.profile_som,
            },
        )
    ]
    summary = {
        "v_ssf": cmp_.v_ssf,
        "v_vm": cmp_.v_vm,
        "v_som": cmp_.v_som,
        "diff_ssf_som": cmp_.diff_ssf_som,
        "diff_ssf_vm": cmp_.diff_ssf_vm,
        "som_mu": cmp_.som_state.mu,
    }
    _finalize(run_dir, "trapped-mode", cfg, summary, files, t0)


def _cmd_bdg(cfg: Config, run_dir: Path, t0: float) -> None:
    spec = cfg.droplet_spec()
    spectrum = bdg_spectrum(
        spec,
        grid=cfg.grid_spec("bdg"),
        boundary_ratio=cfg.get("bdg", "boundary_ratio"),
    )
    files = [
        write_series(
            run_dir,
            "spectrum",
            {
                "omega": spectrum.omegas,
                "localized": spectrum.localized,
                "zero_mode": spectrum.zero_mode,
            },
        )
    ]
    omega_b = breathing_mode(spectrum)
    summary = {
        "mu": spec.mu,
        "threshold": spectrum.threshold,
        "omega_b": omega_b if omega_b is not None else float("nan"),
        "omega_b_over_mu": (
            omega_b / spectrum.threshold if omega_b is not None else float("nan")
        ),
        "n_internal": int(len(spectrum.localized_below_threshold())),
        "unstable": spectrum.unstable,
    }
    _finalize(run_dir, "bdg", cfg, summary, files, t0)


def _cmd_collide(cfg: Config, run_dir: Path, t0: float) -> None:
    from .experiments import CollisionConfig, run_collision

    coll = CollisionConfig(
        g=cfg.get("family", "g"),
        N1=cfg.get("experiments", "n1"),
        N2=cfg.get("experiments", "n2"),
        v=cfg.get("experiments", "v"),
        phi=cfg.get("experiments", "phi"),
        x0=cfg.get("experiments", "x0"),
        potential=(
            None if cfg.get("experiments", "free_space") else cfg.potential_spec()
        ),
        dt=cfg.get("propagator", "dt"),
        t_max=cfg.get("propagator", "t_max"),
        grid=cfg.grid_spec(),
    )
    res = run_collision(coll, snapshots=cfg.get("experiments", "snapshots"))
    files = [
        write_series(
            run_dir,
            "mass_thirds",
            {
                "t": res.times,
                "mass_left": res.mass_left,
                "mass_center": res.mass_center,
                "mass_right": res.mass_right,
            },
        ),
        write_series(
            run_dir,
            "final_field",
            {
                "x": coll.grid.x,
                "re_psi": res.field.values.real,
                "im_psi": res.field.values.imag,
                "density": res.field.density(),
            },
        ),
    ]
    if res.snapshots is not None:
        files += write_snapshots(
            run_dir, res.snapshots.times, coll.grid.x, res.snapshots.frames
        )
    summary = {
        "outcome": res.outcome,
        "final_mass_left": float(res.mass_left[-1]),
        "final_mass_center": float(res.mass_center[-1]),
        "final_mass_right": float(res.mass_right[-1]),
    }
    _finalize(run_dir, "collide", cfg, summary, files, t0)


def _cmd_effective_potential(cfg: Config, run_dir: Path, t0: float) -> None:
    from .experiments import run_scattering

    sc = _scatter_config(cfg)
    res = run_scattering(sc)
    spec = sc.spec
    e_sd = stationary_energy(spec, sc.grid)
    curve = effective_potential(res.trajectory, spec.N, e_sd)
    files = [
        _write_trajectory(run_dir, res.trajectory),
        write_series(
            run_dir,
            "effective_potential",
            {
                "t": curve.times,
                "xbar": curve.positions,
                "V_eff": curve.values,
                "V_eff_energy": curve.values_energy_form,
            },
        ),
    ]
    summary = {
        "E_sd": curve.E_sd,
        "V_eff_max": float(np.max(curve.values)),
        "classification": res.classification.value,
    }
    _finalize(run_dir, "effective-potential", cfg, summary, files, t0)


def _cmd_sweep(cfg: Config, run_dir: Path, t0: float) -> None:
    from .experiments import critical_speed_curves

    n_list = cfg.get("experiments", "n_list") or (cfg.get("family", "n"),)
    u0_list = cfg.get("experiments", "u0_list") or (cfg.get("potential", "u0"),)
    specs = [cfg.droplet_spec(n) for n in n_list]
    potentials = [cfg.potential_spec(u) for u in u0_list]
    methods = tuple(
        m.strip() for m in cfg.get("experiments", "methods").split(",") if m.strip()
    )
    if not set(methods) <= {"ssf", "vm"}:
        raise ConfigError(f"experiments.methods must be from {{ssf, vm}}, got {methods}")
    points = critical_speed_curves(
        specs,
        potentials,
        methods=methods,
        tolerance=cfg.get("experiments", "tolerance"),
        v_bracket=(cfg.get("experiments", "v_min"), cfg.get("experiments", "v_max")),
        x_start=cfg.get("experiments", "x_start"),
        dt=cfg.get("propagator", "dt"),
        grid=cfg.grid_spec(),
    )
    nan = float("nan")
    files = [
        write_series(
            run_dir,
            "sweep",
            {
                "N": [p.N for p in points],
                "U0": [p.U0 for p in points],
                "v_ssf": [p.v_ssf if p.v_ssf is not None else nan for p in points],
                "v_vm": [p.v_vm if p.v_vm is not None else nan for p in points],
                "error": [p.error or "-" for p in points],
            },
        )
    ]
    summary = {
        "n_points": len(points),
        "n_failed": sum(1 for p in points if p.error),
    }
    _finalize(run_dir, "sweep", cfg, summary, files, t0)


COMMANDS = {
    "groundstate": _cmd_groundstate,
    "scatter": _cmd_scatter,
    "critical-speed": _cmd_critical_speed,
    "trapped-mode": _cmd_trapped_mode,
    "vm-scan": _cmd_vm_scan,
    "som": _cmd_som,
    "bdg": _cmd_bdg,
    "collide": _cmd_collide,
    "effective-potential": _cmd_effective_potential,
    "sweep": _cmd_sweep,
}


def _cmd_preset(name: str, cfg_path: str | None, overrides: list[str], out: Path) -> None:
    jobs = preset_jobs(name)
    for job in jobs:
        cfg = parse_config(cfg_path, list(job.overrides) + overrides)
        run_dir = out / job.subdir
        print(f"[{name}] {job.command} -> {run_dir}", flush=True)
        COMMANDS[job.command](cfg, run_dir, time.time())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdrop",
        description="1D quantum-droplet scattering on a reflectionless well",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", default=None, help="INI config file")
    common.add_argument(
        "-s",
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="SECTION.KEY=VALUE",
        help="override a config value (repeatable)",
    )
    common.add_argument(
        "-o", "--out", default=None, help="run directory (default: runs/<command>)"
    )
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    p_preset = sub.add_parser("preset", parents=[common])
    p_preset.add_argument("name", help="preset name, e.g. fig2 or table1")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "preset":
            out = Path(args.out or f"runs/{args.name}")
            _cmd_preset(args.name, args.config, args.overrides, out)
        else:
            cfg = parse_config(args.config, args.overrides)
            out = Path(args.out or f"runs/{args.command}")
            COMMANDS[args.command](cfg, out, time.time())
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PhysicsValidationError as exc:
        print(f"physics validation error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
