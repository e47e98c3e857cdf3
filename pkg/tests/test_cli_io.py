"""Config parsing, tables, manifests, CLI exit codes, presets."""

import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdrop.cli import main
from qdrop.errors import ConfigError
from qdrop.presets import TABLE1_NORMS, preset_jobs
from qdrop.runio import (
    RunManifest,
    fmt,
    parse_config,
    read_manifest,
    read_series,
    verify_manifest,
    write_manifest,
    write_series,
)


# ---------------------------------------------------------------------------
# config parsing


def test_defaults_and_builders():
    cfg = parse_config()
    assert cfg.get("potential", "u0") == 4.0
    assert cfg.get("experiments", "x_start") == -30.0
    spec = cfg.droplet_spec()
    assert spec.g == 1.0 and spec.N == 1.0
    pot = cfg.potential_spec()
    assert pot.alpha == pytest.approx(2.0)  # sqrt(U0), reflectionless
    assert cfg.grid_spec().n_points == 4096


def test_file_plus_overrides(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text("[family]\nn = 10\n[experiments]\nv = 0.03\nsnapshots = true\n")
    cfg = parse_config(p, ["experiments.v=0.04", "propagator.dt=1e-3"])
    assert cfg.get("family", "n") == 10.0
    assert cfg.get("experiments", "v") == 0.04  # override wins
    assert cfg.get("experiments", "snapshots") is True
    assert cfg.get("propagator", "dt") == 1e-3


def test_unknown_keys_are_hard_errors(tmp_path):
    p = tmp_path / "bad.cfg"
    p.write_text("[family]\nnn = 10\n")
    with pytest.raises(ConfigError):
        parse_config(p)
    with pytest.raises(ConfigError):
        parse_config(None, ["nosuchsection.v=1"])
    with pytest.raises(ConfigError):
        parse_config(None, ["experiments.v=banana"])
    with pytest.raises(ConfigError):
        parse_config("/nonexistent/path.cfg")


def test_flat_echo_contains_everything():
    flat = parse_config().flat()
    assert flat["potential.u0"] == 4.0
    assert flat["propagator.dt"] == 5e-3
    # every schema key is echoed
    from qdrop.runio import SCHEMA

    for sec, keys in SCHEMA.items():
        for key in keys:
            assert f"{sec}.{key}" in flat


# ---------------------------------------------------------------------------
# tables


@given(
    st.lists(
        st.floats(allow_nan=False, allow_infinity=False, width=64),
        min_size=1,
        max_size=40,
    )
)
@settings(max_examples=40, deadline=None)
def test_series_roundtrip_bit_identical(values):
    import tempfile

    run_dir = tempfile.mkdtemp(prefix="qdrop-series-")
    arr = np.asarray(values)
    path = write_series(run_dir, "col", {"a": arr, "b": arr * 3.0})
    back = read_series(path)
    assert back["a"].tobytes() == arr.tobytes()
    assert back["b"].tobytes() == (arr * 3.0).tobytes()


def test_series_single_header_and_order(tmp_path):
    path = write_series(tmp_path, "tab", {"x": [1.0], "y": [2.0], "z": [3.0]})
    lines = path.read_text().splitlines()
    assert lines[0] == "x\ty\tz"
    assert len(lines) == 2


def test_series_mismatched_columns(tmp_path):
    with pytest.raises(ConfigError):
        write_series(tmp_path, "bad", {"a": [1.0, 2.0], "b": [1.0]})


def test_fmt_17_digits():
    assert float(fmt(0.1)) == 0.1
    assert fmt(True) == "true"
    x = 0.1234567890123456789
    assert float(fmt(x)) == x


# ---------------------------------------------------------------------------
# manifests


def test_manifest_roundtrip_and_inventory(tmp_path):
    write_series(tmp_path, "data", {"a": [1.0]})
    m = RunManifest(
        command="scatter",
        config={"family.n": 1.0},
        summary={"R": 0.5},
        files=["data.tsv"],
    )
    write_manifest(tmp_path, m)
    back = read_manifest(tmp_path)
    assert back.command == "scatter"
    assert back.summary["R"] == 0.5
    assert back.files == ["data.tsv"]
    verify_manifest(tmp_path)


def test_manifest_rejects_missing_files(tmp_path):
    m = RunManifest(command="x", config={}, summary={}, files=["ghost.tsv"])
    with pytest.raises(ConfigError):
        write_manifest(tmp_path, m)


def test_verify_detects_truncated_run(tmp_path):
    write_series(tmp_path, "data", {"a": [1.0]})
    m = RunManifest(command="x", config={}, summary={}, files=["data.tsv"])
    write_manifest(tmp_path, m)
    (tmp_path / "data.tsv").unlink()
    with pytest.raises(ConfigError):
        verify_manifest(tmp_path)


# ---------------------------------------------------------------------------
# CLI exit codes and determinism


def test_cli_exit_codes(tmp_path):
    out = str(tmp_path / "r1")
    assert main(["groundstate", "-o", out]) == 0
    assert main(["groundstate", "-s", "family.n=-3", "-o", out]) == 2
    assert main(["groundstate", "-s", "family.bogus=1", "-o", out]) == 2
    # droplet sitting on top of the well: physics validation
    assert main(["scatter", "-s", "experiments.x_start=-2", "-o", out]) == 3


def test_cli_groundstate_run_dir(tmp_path):
    out = tmp_path / "gs"
    assert main(["groundstate", "-s", "family.n=2", "-o", str(out)]) == 0
    manifest = verify_manifest(out)
    assert manifest.command == "groundstate"
    assert manifest.config["family.n"] == 2.0
    assert manifest.summary["N"] == 2.0
    assert manifest.summary["mu"] < 0.0
    prof = read_series(out / "profile.tsv")
    assert set(prof) == {"x", "psi", "density"}
    np.testing.assert_allclose(np.trapezoid(prof["density"], prof["x"]), 2.0, rtol=1e-6)


def test_cli_determinism(tmp_path):
    outs = []
    for tag in ("a", "b"):
        out = tmp_path / tag
        assert main(["vm-scan", "-s", "stationary.x0_min=-2", "-o", str(out)]) == 0
        outs.append(read_manifest(out).summary)
    assert outs[0] == outs[1]


def test_cli_dt_override_reaches_manifest(tmp_path):
    out = tmp_path / "gs"
    assert main(["groundstate", "-s", "propagator.dt=0.001", "-o", str(out)]) == 0
    assert read_manifest(out).config["propagator.dt"] == 0.001


# ---------------------------------------------------------------------------
# presets


def test_fig2_preset_expands_to_six_runs():
    jobs = preset_jobs("fig2")
    assert len(jobs) == 6
    norms = {ov for j in jobs for ov in j.overrides if ov.startswith("family.n=")}
    assert norms == {"family.n=1.0", "family.n=10.0"}
    assert all(j.command == "scatter" for j in jobs)
    assert len({j.subdir for j in jobs}) == 6


def test_table1_preset_covers_all_norms():
    jobs = preset_jobs("table1")
    ssf = [j for j in jobs if j.command == "critical-speed"]
    vm = [j for j in jobs if j.command == "vm-scan"]
    assert len(ssf) == len(TABLE1_NORMS)
    assert len(vm) == len(TABLE1_NORMS)
    got = {float(j.overrides[0].split("=")[1]) for j in ssf}
    assert got == set(TABLE1_NORMS)


def test_collision_presets_cover_phase_panels():
    for name, n in (("fig12", "1.0"), ("fig13", "10.0")):
        jobs = preset_jobs(name)
        assert len(jobs) == 6
        assert all(j.command == "collide" for j in jobs)
        assert all(f"experiments.n1={n}" in j.overrides for j in jobs)


def test_unknown_preset():
    with pytest.raises(ConfigError):
        preset_jobs("fig99")


def test_preset_jobs_parse_cleanly():
    """Every preset must expand into parseable configurations."""
    from qdrop.presets import PRESETS

    for name in PRESETS:
        for job in preset_jobs(name):
            parse_config(None, list(job.overrides))
