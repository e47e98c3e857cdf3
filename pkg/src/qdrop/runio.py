"""Configuration files, run directories, tables, and manifests.

Config format: INI-style flat key/value pairs grouped in sections named
after the physics modules.  Every key has a typed default; unknown
sections or keys are hard errors so a config is always fully explicit
once parsed.  All floats are written with 17 significant digits, which
round-trips IEEE doubles exactly.
"""

from __future__ import annotations

import configparser
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from . import __version__
from .errors import ConfigError
from .family import DropletSpec
from .grid import Grid
from .potential import PotentialSpec

_UNSET = object()


def _as_bool(s: str) -> bool:
    low = s.strip().lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _as_float_list(s: str) -> tuple[float, ...]:
    parts = [p for p in s.replace(",", " ").split() if p]
    return tuple(float(p) for p in parts)


_PARSERS = {
    float: float,
    int: int,
    bool: _as_bool,
    str: str,
    tuple: _as_float_list,
}

# section -> key -> (type, default).  `None` defaults mean "derive later".
SCHEMA: dict[str, dict[str, tuple[type, Any]]] = {
    "family": {
        "g": (float, 1.0),
        "n": (float, 1.0),
    },
    "potential": {
        "u0": (float, 4.0),
        "alpha": (float, None),  # None: sqrt(U0), reflectionless
        "center": (float, 0.0),
    },
    "grid": {
        "x_min": (float, -128.0),
        "x_max": (float, 128.0),
        "n_points": (int, 4096),
    },
    "propagator": {
        "dt": (float, 5e-3),
        "t_max": (float, None),  # None: 3 |x_start| / v
        "snapshot_stride": (int, None),
    },
    "experiments": {
        "v": (float, 0.1),
        "x_start": (float, -30.0),
        "l_cut": (float, None),  # None: |x_start| / 2
        "threshold": (float, 0.95),
        "snapshots": (bool, False),
        "snapshot_decimate": (int, 4),
        "absorber": (bool, False),
        "exit_watch": (bool, True),
        "tolerance": (float, 1e-4),
        "v_min": (float, 0.01),
        "v_max": (float, 0.2),
        "coarse_points": (int, 5),
        "n_list": (tuple, ()),
        "u0_list": (tuple, ()),
        "methods": (str, "ssf,vm"),  # sweep: which critical-speed routes
        "phi": (float, 0.0),
        "x0": (float, 20.0),
        "n1": (float, 1.0),
        "n2": (float, 1.0),
        "free_space": (bool, False),  # collisions: drop the well
    },
    "stationary": {
        "dtau": (float, 0.9),
        "c": (float, 1.0),
        "tol": (float, 1e-10),
        "node": (bool, False),
        "node_x": (float, 0.0),
        "seed_center": (float, None),  # None: at node_x
        "x0_min": (float, -15.0),
        "x0_max": (float, 0.0),
    },
    "bdg": {
        "x_min": (float, -64.0),
        "x_max": (float, 64.0),
        "n_points": (int, 1024),
        "boundary_ratio": (float, 1e-6),
    },
}


@dataclass(frozen=True)
class Config:
    """Fully-defaulted, validated key/value configuration."""

    values: Mapping[str, Mapping[str, Any]]

    def get(self, section: str, key: str) -> Any:
        return self.values[section][key]

    def flat(self) -> dict[str, Any]:
        """`section.key` -> value, for manifests and reproduction."""
        out: dict[str, Any] = {}
        for sec in sorted(self.values):
            for key in sorted(self.values[sec]):
                val = self.values[sec][key]
                if isinstance(val, tuple):
                    val = list(val)
                out[f"{sec}.{key}"] = val
        return out

    # -- builders ---------------------------------------------------------

    def droplet_spec(self, n: float | None = None) -> DropletSpec:
        g = self.get("family", "g")
        n = self.get("family", "n") if n is None else n
        if n <= 0:
            raise ConfigError(f"family.n must be positive, got {n}")
        if g < 0:
            raise ConfigError(f"family.g must be >= 0, got {g}")
        return DropletSpec.from_norm(g, n)

    def potential_spec(self, u0: float | None = None) -> PotentialSpec:
        u0 = self.get("potential", "u0") if u0 is None else u0
        if u0 < 0:
            raise ConfigError(f"potential.u0 must be >= 0, got {u0}")
        return PotentialSpec(
            U0=u0,
            alpha=self.get("potential", "alpha"),
            center=self.get("potential", "center"),
        )

    def grid_spec(self, section: str = "grid") -> Grid:
        return Grid(
            x_min=self.get(section, "x_min"),
            x_max=self.get(section, "x_max"),
            n_points=self.get(section, "n_points"),
        )


def _parse_pairs(pairs: Sequence[tuple[str, str, str]]) -> Config:
    values: dict[str, dict[str, Any]] = {
        sec: {k: d for k, (_, d) in keys.items()} for sec, keys in SCHEMA.items()
    }
    for sec, key, raw in pairs:
        sec = sec.strip().lower()
        key = key.strip().lower()
        if sec not in SCHEMA:
            raise ConfigError(f"unknown config section [{sec}]")
        if key not in SCHEMA[sec]:
            raise ConfigError(f"unknown config key {sec}.{key}")
        typ = SCHEMA[sec][key][0]
        low = raw.strip().lower()
        if low in ("none", "auto", ""):
            values[sec][key] = None
            continue
        try:
            values[sec][key] = _PARSERS[typ](raw.strip())
        except ValueError as exc:
            raise ConfigError(f"bad value for {sec}.{key}: {exc}") from exc
    return Config(values=values)


def parse_config(
    path: str | Path | None = None,
    overrides: Sequence[str] = (),
) -> Config:
    """Read an INI config file, then apply `section.key=value` overrides.

    Unknown sections/keys and malformed values raise ConfigError.
    """
    pairs: list[tuple[str, str, str]] = []
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        parser = configparser.ConfigParser()
        try:
            parser.read(path)
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
        for sec in parser.sections():
            for key, raw in parser.items(sec):
                pairs.append((sec, key, raw))
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must look like section.key=value: {item!r}")
        dotted, raw = item.split("=", 1)
        if "." not in dotted:
            raise ConfigError(f"override key must be section.key: {item!r}")
        sec, key = dotted.split(".", 1)
        pairs.append((sec, key, raw))
    return _parse_pairs(pairs)


# ---------------------------------------------------------------------------
# tables


def fmt(x: Any) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def write_series(run_dir: str | Path, name: str, columns: Mapping[str, Any]) -> Path:
    """Tab-delimited table with a single header row, 17-digit floats."""
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    cols = {k: np.atleast_1d(np.asarray(v)) for k, v in columns.items()}
    lengths = {len(v) for v in cols.values()}
    if len(lengths) != 1:
        raise ConfigError(f"column length mismatch in series {name!r}: {lengths}")
    path = run_dir / f"{name}.tsv"
    try:
        with path.open("w") as fh:
            fh.write("\t".join(cols) + "\n")
            for row in zip(*cols.values()):
                fh.write("\t".join(fmt(v) for v in row) + "\n")
    except OSError as exc:
        raise ConfigError(f"cannot write series {path}: {exc}") from exc
    return path


def read_series(path: str | Path) -> dict[str, np.ndarray]:
    path = Path(path)
    try:
        with path.open() as fh:
            header = fh.readline().rstrip("\n").split("\t")
            rows = [line.rstrip("\n").split("\t") for line in fh if line.strip()]
    except OSError as exc:
        raise ConfigError(f"cannot read series {path}: {exc}") from exc
    if not header or header == [""]:
        raise ConfigError(f"series file {path} has no header")
    out: dict[str, np.ndarray] = {}
    for j, name in enumerate(header):
        col = [r[j] for r in rows]
        try:
            out[name] = np.array([float(v) for v in col])
        except ValueError:
            out[name] = np.array(col)
    return out


def write_snapshots(
    run_dir: str | Path,
    times: Sequence[float],
    x: np.ndarray,
    frames: Sequence[np.ndarray],
) -> list[Path]:
    """One file per frame: columns t, x, re_psi, im_psi, density."""
    paths = []
    for i, (t, frame) in enumerate(zip(times, frames)):
        frame = np.asarray(frame)
        paths.append(
            write_series(
                run_dir,
                f"snapshot_{i:06d}",
                {
                    "t": np.full(len(frame), float(t)),
                    "x": x[: len(frame)],
                    "re_psi": frame.real,
                    "im_psi": frame.imag,
                    "density": np.abs(frame) ** 2,
                },
            )
        )
    return paths


# ---------------------------------------------------------------------------
# manifests


@dataclass
class RunManifest:
    command: str
    config: dict[str, Any]
    summary: dict[str, Any]
    files: list[str] = field(default_factory=list)
    version: str = __version__
    wall_time_s: float = 0.0
    created: str = ""

    def to_json(self) -> str:
        return json.dumps(
            {
                "command": self.command,
                "version": self.version,
                "created": self.created,
                "wall_time_s": self.wall_time_s,
                "config": self.config,
                "files": sorted(self.files),
                "summary": self.summary,
            },
            indent=1,
            sort_keys=False,
        )


def write_manifest(run_dir: str | Path, manifest: RunManifest) -> Path:
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    for name in manifest.files:
        if not (run_dir / name).exists():
            raise ConfigError(f"manifest lists missing file {name} in {run_dir}")
    if not manifest.created:
        manifest.created = time.strftime("%Y-%m-%dT%H:%M:%S")
    path = run_dir / "manifest.json"
    try:
        path.write_text(manifest.to_json() + "\n")
    except OSError as exc:
        raise ConfigError(f"cannot write manifest {path}: {exc}") from exc
    return path


def read_manifest(run_dir: str | Path) -> RunManifest:
    path = Path(run_dir) / "manifest.json"
    if not path.exists():
        raise ConfigError(f"no manifest.json in {run_dir}")
    try:
        raw = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read manifest {path}: {exc}") from exc
    return RunManifest(
        command=raw.get("command", ""),
        config=raw.get("config", {}),
        summary=raw.get("summary", {}),
        files=list(raw.get("files", [])),
        version=raw.get("version", ""),
        wall_time_s=raw.get("wall_time_s", 0.0),
        created=raw.get("created", ""),
    )


def verify_manifest(run_dir: str | Path) -> RunManifest:
    """Manifest whose listed files all exist; raises otherwise."""
    run_dir = Path(run_dir)
    manifest = read_manifest(run_dir)
    missing = [n for n in manifest.files if not (run_dir / n).exists()]
    if missing:
        raise ConfigError(f"run dir {run_dir} is missing files: {missing}")
    return manifest
