"""Analytic droplet family: closed forms, norms, and limits."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdrop.errors import ConfigError, PhysicsValidationError
from qdrop.family import (
    DropletSpec,
    boost,
    droplet_profile,
    free_energy_density,
    momentum,
    mu_from_norm,
    norm_from_mu,
    saturation_density,
    saturation_mu,
    stationary_energy,
)
from qdrop.grid import Grid, integrate

GRID = Grid(-128.0, 128.0, 4096)


def test_saturation_values():
    assert saturation_mu(1.0) == pytest.approx(-2.0 / 9.0, rel=1e-15)
    assert saturation_density(1.0) == pytest.approx(4.0 / 9.0, rel=1e-15)
    assert saturation_mu(2.0) == pytest.approx(-1.0 / 9.0, rel=1e-15)


def test_known_mu_for_unit_norm():
    # frozen from an independent high-precision quadrature of the closed form
    assert mu_from_norm(1.0, 1.0) == pytest.approx(-0.1935609322651037, abs=1e-13)


@given(st.floats(min_value=0.05, max_value=8.0))
@settings(max_examples=60, deadline=None)
def test_mu_norm_roundtrip(n):
    """Direct roundtrip; well-conditioned only away from saturation."""
    mu = mu_from_norm(1.0, n)
    assert saturation_mu(1.0) < mu < 0.0
    assert norm_from_mu(1.0, mu) == pytest.approx(n, rel=1e-10)


@given(st.floats(min_value=0.05, max_value=80.0))
@settings(max_examples=40, deadline=None)
def test_spec_construction_is_self_consistent(n):
    """from_norm validates N against the closed form internally (delta path),
    which stays exact even where mu itself has saturated to mu0."""
    spec = DropletSpec.from_norm(1.0, n)
    assert saturation_mu(1.0) <= spec.mu < 0.0
    assert 0.0 < spec.delta <= 1.0


@given(st.floats(min_value=0.2, max_value=2.0), st.floats(min_value=0.1, max_value=10.0))
@settings(max_examples=40, deadline=None)
def test_profile_norm_matches_spec(g, n):
    spec = DropletSpec.from_norm(g, n)
    if spec.half_width() > 100.0:
        return  # would not fit on the fixed test grid
    fld = droplet_profile(spec, GRID)
    assert integrate(GRID, fld.density()) == pytest.approx(n, rel=1e-8)


def test_profile_is_gpe_solution():
    """The closed-form profile satisfies mu psi = -psi''/2 + g psi^3 - |psi| psi."""
    spec = DropletSpec.from_norm(1.0, 1.0)
    fld = droplet_profile(spec, GRID)
    psi = fld.values.real
    k2 = GRID.wavenumbers**2
    lap = np.real(np.fft.ifft(-k2 * np.fft.fft(psi)))
    resid = -0.5 * lap + spec.g * psi**3 - np.abs(psi) * psi - spec.mu * psi
    assert np.max(np.abs(resid)) < 1e-9


def test_flat_top_density_approaches_saturation():
    for n, tol in ((10.0, 2e-3), (50.0, 1e-8)):
        spec = DropletSpec.from_norm(1.0, n)
        peak = np.max(droplet_profile(spec, GRID).density())
        assert abs(peak - saturation_density(1.0)) < tol


def test_flat_top_width_scales_linearly():
    """Bulk at saturation density: width grows as N / n0 for large N."""
    w = []
    for n in (20.0, 40.0):
        spec = DropletSpec.from_norm(1.0, n)
        dens = droplet_profile(spec, GRID).density()
        w.append(GRID.dx * np.count_nonzero(dens > 0.5 * saturation_density(1.0)))
    assert w[1] - w[0] == pytest.approx(20.0 / saturation_density(1.0), rel=0.02)


def test_mu_monotone_in_norm():
    mus = [mu_from_norm(1.0, n) for n in (0.1, 0.5, 1.0, 5.0, 20.0)]
    assert all(b < a for a, b in zip(mus, mus[1:]))
    assert mus[-1] > saturation_mu(1.0)


def test_boost_sets_momentum_and_keeps_density():
    spec = DropletSpec.from_norm(1.0, 2.0)
    fld = droplet_profile(spec, GRID)
    moving = boost(fld, 0.3)
    assert momentum(moving) == pytest.approx(0.3 * 2.0, rel=1e-10)
    assert np.max(np.abs(moving.density() - fld.density())) < 1e-14


def test_stationary_energy_known_value():
    spec = DropletSpec.from_norm(1.0, 1.0)
    assert stationary_energy(spec, GRID) == pytest.approx(
        -0.14193428565067398, abs=1e-10
    )


def test_energy_below_zero_and_decreasing_per_particle():
    """ -E/N grows toward |mu0| as the droplet saturates."""
    e_over_n = []
    for n in (1.0, 5.0, 20.0):
        spec = DropletSpec.from_norm(1.0, n)
        e_over_n.append(stationary_energy(spec, GRID) / n)
    assert all(e < 0 for e in e_over_n)
    assert e_over_n[2] < e_over_n[1] < e_over_n[0]


def test_free_energy_density_integrates_to_energy():
    spec = DropletSpec.from_norm(1.0, 3.0)
    fld = droplet_profile(spec, GRID)
    e = integrate(GRID, free_energy_density(GRID, fld.values.real, spec.g))
    assert e == pytest.approx(stationary_energy(spec, GRID), rel=1e-10)


def test_invalid_specs_rejected():
    with pytest.raises((ConfigError, PhysicsValidationError)):
        DropletSpec.from_norm(1.0, -1.0)
    with pytest.raises((ConfigError, PhysicsValidationError)):
        DropletSpec.from_mu(1.0, 0.1)
    with pytest.raises((ConfigError, PhysicsValidationError)):
        DropletSpec.from_mu(1.0, 2.0 * saturation_mu(1.0))


def test_half_width_covers_profile():
    for n in (0.5, 1.0, 10.0):
        spec = DropletSpec.from_norm(1.0, n)
        half = spec.half_width()
        x = np.array([half, -half])
        assert np.all(np.abs(spec.profile_at(x)) ** 2 < 1e-15)
