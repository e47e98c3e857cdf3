"""Named figure recipes: run-directory tables in, image files out.

Recipes never recompute physics and never write into run directories.
Rendering is atomic: the image is written only after the plot is fully
assembled, so a failing recipe leaves no partial output.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .runread import (
    RunReadError,
    read_manifest,
    read_series,
    require_columns,
    snapshot_files,
)


@dataclass(frozen=True)
class FigureRecipe:
    name: str
    run_dirs: tuple[str, ...]
    output: str
    xlabel: str | None = None
    ylabel: str | None = None
    xlim: tuple[float, float] | None = None
    ylim: tuple[float, float] | None = None

    def __post_init__(self):
        if self.name not in RECIPES:
            raise RunReadError(
                f"unknown recipe {self.name!r}; available: {', '.join(sorted(RECIPES))}"
            )
        if not self.run_dirs:
            raise RunReadError(f"recipe {self.name!r} needs at least one run dir")


def _save(fig, recipe: FigureRecipe) -> Path:
    ax = fig.axes[0]
    if recipe.xlabel:
        ax.set_xlabel(recipe.xlabel)
    if recipe.ylabel:
        ax.set_ylabel(recipe.ylabel)
    if recipe.xlim:
        ax.set_xlim(recipe.xlim)
    if recipe.ylim:
        ax.set_ylim(recipe.ylim)
    out = Path(recipe.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    # write to a temp file first: no partial image on failure
    fd, tmp = tempfile.mkstemp(suffix=out.suffix or ".png", dir=out.parent)
    os.close(fd)
    try:
        fig.savefig(tmp, dpi=150, metadata={})
        os.replace(tmp, out)
    except Exception:
        os.unlink(tmp)
        raise
    finally:
        plt.close(fig)
    return out


def _summaries(run_dirs: Sequence[str]) -> list[tuple[dict, dict]]:
    """(config, summary) per run dir, inventory verified."""
    out = []
    for rd in run_dirs:
        manifest = read_manifest(rd)
        out.append((manifest.get("config", {}), manifest.get("summary", {})))
    return out


# ---------------------------------------------------------------------------
# recipe implementations


def _rt_step_curve(recipe: FigureRecipe):
    """R and T versus incident speed from a family of scattering runs."""
    points = []
    for config, summary in _summaries(recipe.run_dirs):
        try:
            points.append(
                (float(config["experiments.v"]), float(summary["R"]), float(summary["T"]))
            )
        except KeyError as exc:
            raise RunReadError(f"scatter summary missing {exc} in one of the runs")
    points.sort()
    v, r, t = (np.array(c) for c in zip(*points))
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(v, r, "o-", color="tab:red", label="R")
    ax.plot(v, t, "s-", color="tab:blue", label="T")
    ax.set_xlabel("incident speed v")
    ax.set_ylabel("coefficient")
    ax.legend()
    return _save(fig, recipe)


def _density_heatmap(recipe: FigureRecipe):
    """Spacetime density |psi(x,t)|^2 from the snapshot stream of one run."""
    (run_dir,) = recipe.run_dirs
    frames = []
    times = []
    x = None
    for path in snapshot_files(run_dir):
        tab = read_series(path)
        require_columns(tab, path, "t", "x", "density")
        times.append(float(tab["t"][0]))
        frames.append(tab["density"])
        x = tab["x"]
    dens = np.vstack(frames)
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    mesh = ax.pcolormesh(x, np.asarray(times), dens, shading="nearest", cmap="magma")
    fig.colorbar(mesh, ax=ax, label=r"$|\psi|^2$")
    ax.set_xlabel("x")
    ax.set_ylabel("t")
    return _save(fig, recipe)


def _ez_scan(recipe: FigureRecipe):
    """Zero-speed-state energy versus trial position, extremum annotated."""
    (run_dir,) = recipe.run_dirs
    read_manifest(run_dir)
    path = Path(run_dir) / "scan.tsv"
    tab = read_series(path)
    require_columns(tab, path, "x0", "E_z")
    x0, ez = tab["x0"], tab["E_z"]
    i = int(np.argmax(ez))
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(x0, ez, "-", color="tab:green")
    ax.plot(x0[i], ez[i], "r*", markersize=12)
    ax.annotate(
        f"({x0[i]:.2f}, {ez[i]:.5f})", (x0[i], ez[i]),
        textcoords="offset points", xytext=(8, -12),
    )
    ax.set_xlabel("x0")
    ax.set_ylabel("E_z")
    return _save(fig, recipe)


def _profile_overlay(recipe: FigureRecipe):
    """Trapped-mode profiles from the three methods, overlaid."""
    (run_dir,) = recipe.run_dirs
    read_manifest(run_dir)
    path = Path(run_dir) / "profiles.tsv"
    tab = read_series(path)
    require_columns(tab, path, "x", "ssf", "vm", "som")
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(tab["x"], np.abs(tab["ssf"]), "k-", label="dynamics")
    ax.plot(tab["x"], np.abs(tab["vm"]), "r--", label="variational")
    ax.plot(tab["x"], np.abs(tab["som"]), "b:", label="stationary")
    ax.set_xlabel("x")
    ax.set_ylabel(r"$|\psi|$")
    ax.set_xlim(-25, 25)
    ax.legend()
    return _save(fig, recipe)


def _vc_sweep(recipe: FigureRecipe, x_col: str):
    (run_dir,) = recipe.run_dirs
    read_manifest(run_dir)
    path = Path(run_dir) / "sweep.tsv"
    tab = read_series(path)
    require_columns(tab, path, x_col, "v_ssf", "v_vm")
    if len(tab[x_col]) == 0:
        raise RunReadError(f"sweep table {path} is empty")
    fig, ax = plt.subplots(figsize=(5, 3.5))
    plotted = False
    for col, style, label in (("v_ssf", "k.-", "dynamics"), ("v_vm", "r.--", "variational")):
        vals = tab[col]
        ok = np.isfinite(vals)
        if np.any(ok):
            ax.plot(tab[x_col][ok], vals[ok], style, label=label)
            plotted = True
    if not plotted:
        raise RunReadError(f"sweep table {path} has no finite critical speeds")
    ax.set_xlabel(x_col)
    ax.set_ylabel("v_c")
    ax.legend()
    return _save(fig, recipe)


def _effective_potential(recipe: FigureRecipe):
    (run_dir,) = recipe.run_dirs
    manifest = read_manifest(run_dir)
    path = Path(run_dir) / "effective_potential.tsv"
    tab = read_series(path)
    require_columns(tab, path, "xbar", "V_eff")
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(tab["xbar"], tab["V_eff"], "b-")
    e_sd = manifest.get("summary", {}).get("E_sd")
    if e_sd is not None:
        ax.axhline(e_sd, color="k", linestyle=":", label="E_sd")
        ax.legend()
    ax.set_xlabel(r"$\bar{x}$")
    ax.set_ylabel("V_eff")
    return _save(fig, recipe)


def _energy_partition(recipe: FigureRecipe):
    (run_dir,) = recipe.run_dirs
    read_manifest(run_dir)
    path = Path(run_dir) / "trajectory.tsv"
    tab = read_series(path)
    require_columns(tab, path, "t", "e_kin", "e_int", "e_pot")
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(tab["t"], tab["e_kin"], label="kinetic")
    ax.plot(tab["t"], tab["e_int"], label="interaction")
    ax.plot(tab["t"], tab["e_pot"], label="potential")
    ax.set_xlabel("t")
    ax.set_ylabel("energy")
    ax.legend()
    return _save(fig, recipe)


def _spectral_ratios(recipe: FigureRecipe):
    """omega_b / |mu| versus norm from a family of spectrum runs."""
    points = []
    for config, summary in _summaries(recipe.run_dirs):
        try:
            points.append(
                (float(config["family.n"]), float(summary["omega_b_over_mu"]))
            )
        except KeyError as exc:
            raise RunReadError(f"spectrum summary missing {exc} in one of the runs")
    points.sort()
    n, ratio = (np.array(c) for c in zip(*points))
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(n, ratio, "bo-")
    ax.set_xlabel("N")
    ax.set_ylabel(r"$\omega_b / |\mu|$")
    return _save(fig, recipe)


RECIPES: dict[str, Callable[[FigureRecipe], Path]] = {
    "fig1": _rt_step_curve,
    "fig2": _density_heatmap,
    "fig3": _ez_scan,
    "fig5": _profile_overlay,
    "fig6a": lambda r: _vc_sweep(r, "U0"),
    "fig6b": lambda r: _vc_sweep(r, "N"),
    "fig7": _effective_potential,
    "fig8": _energy_partition,
    "fig9b": _spectral_ratios,
    "fig10": _spectral_ratios,
    "fig11": _density_heatmap,
    "fig12": _density_heatmap,
    "fig13": _density_heatmap,
}


def render(recipe: FigureRecipe) -> Path:
    """Render one recipe to its output image; returns the image path."""
    return RECIPES[recipe.name](recipe)
