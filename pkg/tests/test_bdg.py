"""Linearized excitation spectrum around the droplet ground state."""

import numpy as np
import pytest

from qdrop.bdg import bdg_spectrum, breathing_mode
from qdrop.errors import ConfigError
from qdrop.family import DropletSpec
from qdrop.grid import Grid


def _ratio(spec, **kw):
    spectrum = bdg_spectrum(spec, **kw)
    omega = breathing_mode(spectrum)
    assert omega is not None
    return omega / spectrum.threshold


def test_quadratic_only_universal_ratio():
    """g=0: omega_2 / |mu| is a pure number, independent of N."""
    for n in (1.0, 5.0, 10.0):
        spec = DropletSpec.from_norm(0.0, n)
        assert _ratio(spec) == pytest.approx(0.8904, abs=5e-4)


def test_zero_modes_present_and_tagged():
    spec = DropletSpec.from_norm(1.0, 4.0)
    spectrum = bdg_spectrum(spec)
    zeros = spectrum.omegas[spectrum.zero_mode]
    assert len(zeros) == 2  # phase + translation
    assert np.all(zeros < 1e-5)
    assert not spectrum.unstable


def test_breathing_below_threshold_positive_g():
    for n in (1.0, 4.0, 10.0, 16.0):
        spec = DropletSpec.from_norm(1.0, n)
        spectrum = bdg_spectrum(spec)
        omega = breathing_mode(spectrum)
        assert omega is not None
        assert 0.0 < omega < spectrum.threshold


def test_internal_mode_count_grows_with_norm():
    counts = {}
    for n in (1.0, 4.0, 10.0, 16.0):
        spec = DropletSpec.from_norm(1.0, n)
        counts[n] = len(bdg_spectrum(spec).localized_below_threshold())
    assert counts[1.0] < counts[4.0] < counts[10.0] < counts[16.0]
    assert counts[1.0] == 1  # only the breathing mode for the small droplet


def test_known_ratios_positive_g():
    """Frozen from converged runs; regression guard for the solver."""
    expected = {1.0: 0.7555, 4.0: 0.4521, 10.0: 0.2081, 16.0: 0.1311}
    for n, ref in expected.items():
        spec = DropletSpec.from_norm(1.0, n)
        assert _ratio(spec) == pytest.approx(ref, abs=2e-3)


def test_soliton_side_ratio_tends_to_one():
    """g<0 (soliton crossover): omega_2/|mu| -> 1^- with growing N."""
    grid = Grid(-16.0, 16.0, 2048)
    r5 = _ratio(DropletSpec.from_norm(-1.0, 5.0), grid=grid, boundary_ratio=1e-2)
    r12 = _ratio(DropletSpec.from_norm(-1.0, 12.0), grid=grid, boundary_ratio=1e-2)
    assert r5 < r12 < 1.0
    assert r12 > 0.99


def test_resolution_guard():
    spec = DropletSpec.from_norm(1.0, 1.0)
    with pytest.raises(ConfigError):
        bdg_spectrum(spec, grid=Grid(-4.0, 4.0, 64))


def test_spectrum_sorted_nonnegative():
    spectrum = bdg_spectrum(DropletSpec.from_norm(1.0, 2.0))
    assert np.all(spectrum.omegas >= 0.0)
    assert np.all(np.diff(spectrum.omegas) >= 0.0)
    assert spectrum.u.shape == spectrum.v.shape
