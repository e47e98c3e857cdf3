"""Named experiment presets: declarative job lists for the CLI.

Each preset expands into a list of jobs; a job is a (subdirectory,
subcommand, overrides) triple executed into its own run directory under
the preset's output directory.  The expansion is pure data, so it can be
inspected without running anything.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError

TABLE1_NORMS = (0.1, 0.3, 0.5, 0.6, 0.8, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0)


@dataclass(frozen=True)
class PresetJob:
    subdir: str
    command: str
    overrides: tuple[str, ...]


def _norm_tag(n: float) -> str:
    return f"{n:g}".replace(".", "p")


def _scatter(subdir: str, n: float, v: float, **extra: str) -> PresetJob:
    ov = [f"family.n={n}", f"experiments.v={v}"]
    ov += [f"{k}={v2}" for k, v2 in extra.items()]
    return PresetJob(subdir, "scatter", tuple(ov))


def _fig1() -> list[PresetJob]:
    jobs = []
    for n, speeds in (
        (1.0, (0.080, 0.085, 0.090, 0.0925, 0.0935, 0.095, 0.100, 0.105)),
        (10.0, (0.030, 0.032, 0.034, 0.0350, 0.0355, 0.036, 0.038, 0.040)),
    ):
        for v in speeds:
            jobs.append(_scatter(f"N{_norm_tag(n)}-v{v:g}", n, v))
    return jobs


def _fig2() -> list[PresetJob]:
    jobs = []
    for n, speeds in ((1.0, (0.08, 0.0928757, 0.095)), (10.0, (0.03, 0.03532, 0.04))):
        for v in speeds:
            jobs.append(
                _scatter(
                    f"N{_norm_tag(n)}-v{v:g}", n, v,
                    **{"experiments.snapshots": "true"},
                )
            )
    return jobs


def _fig3_scan() -> list[PresetJob]:
    return [
        PresetJob(f"N{_norm_tag(n)}", "vm-scan", (f"family.n={n}",))
        for n in (1.0, 10.0)
    ]


def _fig5_compare() -> list[PresetJob]:
    return [
        PresetJob(f"N{_norm_tag(n)}", "trapped-mode", (f"family.n={n}",))
        for n in (1.0, 10.0)
    ]


def _fig6a() -> list[PresetJob]:
    u0s = ",".join(str(u) for u in (1, 2, 3, 4, 5, 6, 7, 8, 9, 10))
    return [
        PresetJob(
            f"N{_norm_tag(n)}", "sweep",
            (f"family.n={n}", f"experiments.u0_list={u0s}"),
        )
        for n in (1.0, 10.0)
    ]


def _fig6b() -> list[PresetJob]:
    ns = ",".join(str(n) for n in TABLE1_NORMS)
    return [PresetJob("U4", "sweep", (f"experiments.n_list={ns}",))]


def _fig7() -> list[PresetJob]:
    jobs = []
    for n, vc in ((1.0, 0.0928757), (10.0, 0.03532)):
        for tag, v in (("below", 0.9 * vc), ("critical", vc), ("above", 1.1 * vc)):
            jobs.append(
                PresetJob(
                    f"N{_norm_tag(n)}-{tag}", "effective-potential",
                    (f"family.n={n}", f"experiments.v={v:.17g}"),
                )
            )
    return jobs


def _fig8() -> list[PresetJob]:
    return [
        _scatter(f"N{_norm_tag(n)}-critical", n, v)
        for n, v in ((1.0, 0.0928757), (10.0, 0.03532))
    ]


def _fig9() -> list[PresetJob]:
    jobs = [
        PresetJob(f"bdg-N{_norm_tag(n)}", "bdg", (f"family.n={n}",))
        for n in (0.5, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0)
    ]
    for n, vc in ((1.0, 0.0928757), (10.0, 0.03532)):
        for v in (0.8 * vc, vc, 1.2 * vc):
            jobs.append(
                _scatter(
                    f"dyn-N{_norm_tag(n)}-v{v:.4g}", n, v,
                    **{
                        "experiments.exit_watch": "false",
                        "propagator.t_max": f"{60.0 / v + 1600.0:.17g}",
                        "grid.x_min": "-256", "grid.x_max": "256",
                        "grid.n_points": "8192",
                    },
                )
            )
    return jobs


def _fig10() -> list[PresetJob]:
    return [
        PresetJob(
            f"g{_norm_tag(g)}-N{_norm_tag(n)}", "bdg",
            (f"family.g={g}", f"family.n={n}", "bdg.boundary_ratio=1e-2"),
        )
        for g, n in (
            (1.0, 1.0), (1.0, 4.0), (1.0, 10.0), (1.0, 16.0),
            (0.0, 1.0), (0.0, 5.0), (0.0, 10.0),
        )
    ]


def _fig11() -> list[PresetJob]:
    jobs = []
    for n, speeds in ((1.0, (0.17, 0.171)), (10.0, (0.0853, 0.086))):
        for v in speeds:
            jobs.append(
                _scatter(
                    f"N{_norm_tag(n)}-v{v:g}", n, v,
                    **{
                        "potential.u0": "25",
                        "experiments.x_start": "-35",
                        "experiments.absorber": "true" if n == 1.0 else "false",
                    },
                )
            )
    return jobs


def _collisions(n: float) -> list[PresetJob]:
    # phase in units of pi: (pi, 3pi/2, 0) in free space, (0, pi/2, pi) on the well
    panels = (
        ("pi-free", 1.0, True), ("3pi2-free", 1.5, True), ("0-free", 0.0, True),
        ("0-well", 0.0, False), ("pi2-well", 0.5, False), ("pi-well", 1.0, False),
    )
    jobs = []
    for tag, phi_over_pi, free in panels:
        ov = [
            f"experiments.n1={n}", f"experiments.n2={n}",
            "experiments.v=0.1",
            f"experiments.phi={phi_over_pi * 3.141592653589793:.17g}",
            f"experiments.free_space={'true' if free else 'false'}",
        ]
        # keep the initial tails below the overlap guard for wide droplets
        ov.append(f"experiments.x0={30 if n >= 10 else 20}")
        jobs.append(PresetJob(tag, "collide", tuple(ov)))
    return jobs


def _table1() -> list[PresetJob]:
    jobs = []
    for n in TABLE1_NORMS:
        jobs.append(
            PresetJob(
                f"N{_norm_tag(n)}", "critical-speed",
                (f"family.n={n}", "experiments.tolerance=2e-4"),
            )
        )
        jobs.append(PresetJob(f"N{_norm_tag(n)}-vm", "vm-scan", (f"family.n={n}",)))
    return jobs


PRESETS: dict[str, callable] = {
    "fig1": _fig1,
    "fig2": _fig2,
    "fig3-scan": _fig3_scan,
    "fig5-compare": _fig5_compare,
    "fig6a": _fig6a,
    "fig6b": _fig6b,
    "fig7": _fig7,
    "fig8": _fig8,
    "fig9": _fig9,
    "fig10": _fig10,
    "fig11": _fig11,
    "fig12": lambda: _collisions(1.0),
    "fig13": lambda: _collisions(10.0),
    "table1": _table1,
}


def preset_jobs(name: str) -> list[PresetJob]:
    if name not in PRESETS:
        raise ConfigError(
            f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}"
        )
    return PRESETS[name]()
