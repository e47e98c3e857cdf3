"""Read-only access to qdrop run directories.

The contract with the simulation package is purely file-based:
tab-separated tables with a single header row, and a `manifest.json`
listing the run's configuration, summary scalars, and file inventory.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np


class RunReadError(RuntimeError):
    """A run directory is missing, truncated, or malformed."""


def read_series(path: str | Path) -> dict[str, np.ndarray]:
    path = Path(path)
    if not path.exists():
        raise RunReadError(f"series file not found: {path}")
    with path.open() as fh:
        header = fh.readline().rstrip("\n").split("\t")
        rows = [line.rstrip("\n").split("\t") for line in fh if line.strip()]
    if not header or header == [""]:
        raise RunReadError(f"series file {path} has no header")
    out: dict[str, np.ndarray] = {}
    for j, name in enumerate(header):
        col = [r[j] for r in rows]
        try:
            out[name] = np.array([float(v) for v in col])
        except ValueError:
            out[name] = np.array(col)
    return out


def require_columns(
    table: dict[str, np.ndarray], path: str | Path, *names: str
) -> None:
    for name in names:
        if name not in table:
            raise RunReadError(f"missing column {name!r} in {path}")


def read_manifest(run_dir: str | Path) -> dict:
    """Manifest as a dict, after checking the file inventory is complete."""
    run_dir = Path(run_dir)
    path = run_dir / "manifest.json"
    if not path.exists():
        raise RunReadError(f"no manifest.json in {run_dir}")
    try:
        manifest = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise RunReadError(f"cannot parse {path}: {exc}") from exc
    missing = [
        name for name in manifest.get("files", ()) if not (run_dir / name).exists()
    ]
    if missing:
        raise RunReadError(f"run {run_dir} is incomplete; missing files: {missing}")
    return manifest


def snapshot_files(run_dir: str | Path) -> list[Path]:
    manifest = read_manifest(run_dir)
    names = sorted(n for n in manifest.get("files", ()) if n.startswith("snapshot_"))
    if not names:
        raise RunReadError(f"run {run_dir} contains no snapshot files")
    return [Path(run_dir) / n for n in names]
