"""Variational trial states and the norm-constrained stationary solver."""

import numpy as np
import pytest

from qdrop.errors import NumericError
from qdrop.family import DropletSpec, droplet_profile, stationary_energy
from qdrop.grid import Grid, integrate
from qdrop.potential import PotentialSpec
from qdrop.stationary import (
    critical_speed_from_energy,
    minimize_trial,
    node_seed,
    som_solve,
    stationary_state_energy,
    variational_critical_speed,
)

GRID = Grid(-128.0, 128.0, 4096)
WELL = PotentialSpec(U0=4.0)
FREE = PotentialSpec(U0=0.0, alpha=1.0)


# ---------------------------------------------------------------------------
# variational scan


def test_vm_small_droplet_sits_at_the_well_center():
    scan = variational_critical_speed(DropletSpec.from_norm(1.0, 1.0), WELL, GRID)
    assert scan.barrier
    assert abs(scan.x0_star) < 0.05
    # zero-speed-state energy maximum at the center
    assert scan.E_z_max == pytest.approx(-0.1374, abs=5e-4)
    assert scan.v_c == pytest.approx(0.0957, abs=2e-3)


def test_vm_large_droplet_maximum_is_off_center():
    scan = variational_critical_speed(DropletSpec.from_norm(1.0, 10.0), WELL, GRID)
    assert scan.barrier
    assert -10.0 < scan.x0_star < -5.0
    assert scan.E_z_max == pytest.approx(-2.1179, abs=5e-3)
    # local extremum of the scan at the center: the symmetric node state
    i0 = int(np.argmin(np.abs(scan.x0)))
    assert scan.E_z[i0] == pytest.approx(-2.11829, abs=5e-3)
    # the center is a local *minimum* along the scan for flat-top droplets
    assert scan.E_z[i0] < scan.E_z_max


def test_vm_energies_bounded_by_free_droplet():
    """E_z at |x0| -> infinity approaches E_sd from the trial family."""
    spec = DropletSpec.from_norm(1.0, 1.0)
    r_far = minimize_trial(spec, WELL, GRID, x0=-15.0)
    assert r_far.E_z == pytest.approx(stationary_energy(spec, GRID), rel=2e-2)


def test_critical_speed_energy_conversion():
    assert critical_speed_from_energy(-0.10, -0.15, 1.0) == pytest.approx(
        np.sqrt(2 * 0.05), rel=1e-12
    )


# ---------------------------------------------------------------------------
# stationary solver


def test_som_recovers_free_droplet():
    spec = DropletSpec.from_norm(1.0, 1.0)
    seed = droplet_profile(spec, GRID)
    # perturb the seed so the solver does real work
    seed.values *= 1.0 + 0.05 * np.exp(-GRID.x**2 / 16.0)
    seed.values *= np.sqrt(spec.N / integrate(GRID, np.abs(seed.values) ** 2))
    state = som_solve(seed, FREE, spec.g, spec.mu, spec.N)
    assert state.residual < 1e-9
    assert state.mu == pytest.approx(spec.mu, abs=1e-9)
    assert state.norm == pytest.approx(spec.N, rel=1e-8)
    exact = droplet_profile(spec, GRID).values.real
    assert np.max(np.abs(np.abs(state.real_values()) - np.abs(exact))) < 1e-6


def test_som_single_node_state_small_droplet():
    """Odd bound state in the well: energy above the free droplet (barrier)."""
    spec = DropletSpec.from_norm(1.0, 1.0)
    state = som_solve(node_seed(spec, GRID), WELL, spec.g, spec.mu, spec.N)
    assert state.residual < 1e-9
    psi = state.real_values()
    i0 = int(np.argmin(np.abs(GRID.x)))
    assert psi[i0 - 40] * psi[i0 + 40] < 0  # node at the well center
    e1 = stationary_state_energy(state, WELL, spec.g)
    e0 = stationary_energy(spec, GRID)
    assert e1 > e0
    v_c = critical_speed_from_energy(e1, e0, spec.N)
    # Table value for the stationary-state route at N=1
    assert v_c == pytest.approx(0.0928, abs=1e-3)


def test_som_symmetric_node_state_large_droplet():
    """Density-symmetric single-node state at N=10; frozen grid-converged mu."""
    spec = DropletSpec.from_norm(1.0, 10.0)
    state = som_solve(node_seed(spec, GRID), WELL, spec.g, spec.mu, spec.N)
    assert state.residual < 1e-9
    assert state.norm == pytest.approx(10.0, rel=1e-8)
    dens = state.real_values() ** 2
    # periodic grid: x[i] = -x[(n - i) mod n], so the mirror needs a roll
    mirror = np.roll(dens[::-1], 1)
    asym = np.max(np.abs(dens - mirror)) / np.max(dens)
    assert asym < 1e-7  # density-symmetric
    assert state.mu == pytest.approx(-0.222229144, abs=1e-6)


def test_som_asymmetric_node_state_large_droplet():
    """Body displaced from the well: the saddle governing the critical speed."""
    spec = DropletSpec.from_norm(1.0, 10.0)
    state = som_solve(
        node_seed(spec, GRID, node_x=0.0, center=-10.0),
        WELL, spec.g, spec.mu, spec.N,
    )
    assert state.residual < 1e-9
    dens = state.real_values() ** 2
    xpk = GRID.x[int(np.argmax(dens))]
    assert xpk < -5.0  # bulk sits beside the well
    # the displaced bulk barely feels the well, so mu sits within 1e-9
    # of the free-droplet value
    assert state.mu == pytest.approx(-0.222222186, abs=1e-6)
    e1 = stationary_state_energy(state, WELL, spec.g)
    e0 = stationary_energy(spec, GRID)
    v_c = critical_speed_from_energy(e1, e0, spec.N)
    assert v_c == pytest.approx(0.0352, abs=1e-3)


def test_symmetric_state_lies_below_vm_trial():
    """The solved symmetric node state must beat the variational bound."""
    spec = DropletSpec.from_norm(1.0, 10.0)
    state = som_solve(node_seed(spec, GRID), WELL, spec.g, spec.mu, spec.N)
    e_som = stationary_state_energy(state, WELL, spec.g)
    scan = variational_critical_speed(spec, WELL, GRID)
    i0 = int(np.argmin(np.abs(scan.x0)))
    assert e_som < scan.E_z[i0]
