"""Split-step propagator: conservation, accuracy order, stationarity."""

import numpy as np
import pytest

from qdrop.errors import ConfigError
from qdrop.family import DropletSpec, boost, droplet_profile, stationary_energy
from qdrop.grid import Grid, WaveField, integrate
from qdrop.observables import energy_partition
from qdrop.potential import PotentialSpec
from qdrop.propagate import StepConfig, absorbing_mask, evolve

GRID = Grid(-64.0, 64.0, 2048)
FREE = PotentialSpec(U0=0.0, alpha=1.0)
WELL = PotentialSpec(U0=4.0)


def _total_energy(fld, potential, g):
    return sum(energy_partition(fld, potential, g))


def test_norm_and_energy_conserved_short():
    spec = DropletSpec.from_norm(1.0, 1.0)
    fld = boost(droplet_profile(spec, GRID, center=-20.0), 0.1)
    e0 = _total_energy(fld, WELL, spec.g)
    n0 = fld.norm()
    res = evolve(fld, WELL, spec.g, StepConfig(dt=5e-3, t_final=50.0))
    assert abs(res.field.norm() - n0) < 1e-11
    assert abs(_total_energy(res.field, WELL, spec.g) - e0) < 1e-8


def test_stationary_droplet_is_stationary():
    spec = DropletSpec.from_norm(1.0, 1.0)
    fld = droplet_profile(spec, GRID)
    res = evolve(fld, FREE, spec.g, StepConfig(dt=5e-3, t_final=100.0))
    # density deviation: the closed form is a true fixed point
    dev = np.max(np.abs(res.field.density() - fld.density()))
    assert dev < 1e-7
    # and the phase winds as exp(-i mu t)
    overlap = complex(np.sum(np.conj(fld.values) * res.field.values) * GRID.dx)
    assert abs(abs(overlap) - spec.N) < 1e-8
    phase = np.angle(overlap)
    expected = (-spec.mu * res.t_final) % (2 * np.pi)
    diff = (phase + spec.mu * res.t_final) % (2 * np.pi)
    assert min(diff, 2 * np.pi - diff) < 1e-4, (phase, expected)


def test_second_order_dt_convergence():
    """Strang splitting: halving dt cuts the error by ~4."""
    spec = DropletSpec.from_norm(1.0, 1.0)
    start = boost(droplet_profile(spec, GRID, center=-10.0), 0.2)

    def final(dt):
        return evolve(start, WELL, spec.g, StepConfig(dt=dt, t_final=4.0)).field.values

    ref = final(6.25e-5)
    err1 = np.max(np.abs(final(1e-3) - ref))
    err2 = np.max(np.abs(final(5e-4) - ref))
    assert 3.5 < err1 / err2 < 4.5


def test_moving_droplet_ballistic_in_free_space():
    spec = DropletSpec.from_norm(1.0, 1.0)
    v = 0.25
    start = boost(droplet_profile(spec, GRID, center=-20.0), v)
    res = evolve(start, FREE, spec.g, StepConfig(dt=5e-3, t_final=80.0))
    dens = res.field.density()
    xbar = integrate(GRID, GRID.x * dens) / spec.N
    assert xbar == pytest.approx(-20.0 + v * 80.0, abs=1e-3)


def test_galilean_energy_shift():
    """Boost adds exactly N v^2 / 2 of kinetic energy."""
    spec = DropletSpec.from_norm(1.0, 2.0)
    fld = droplet_profile(spec, GRID)
    e_rest = _total_energy(fld, FREE, spec.g)
    e_mov = _total_energy(boost(fld, 0.2), FREE, spec.g)
    assert e_mov - e_rest == pytest.approx(0.5 * 2.0 * 0.2**2, rel=1e-10)
    assert e_rest == pytest.approx(stationary_energy(spec, GRID), rel=1e-10)


def test_observer_early_stop():
    spec = DropletSpec.from_norm(1.0, 1.0)
    fld = droplet_profile(spec, GRID)

    stop_at = 3.0
    res = evolve(
        fld, FREE, spec.g, StepConfig(dt=5e-3, t_final=50.0),
        observers=[lambda t, f: t >= stop_at],
    )
    assert res.stopped_early
    assert stop_at <= res.t_final < 50.0


def test_absorber_removes_outgoing_mass():
    spec = DropletSpec.from_norm(1.0, 1.0)
    fast = boost(droplet_profile(spec, GRID, center=0.0), 1.0)
    mask = absorbing_mask(GRID)
    res = evolve(fast, FREE, spec.g, StepConfig(dt=5e-3, t_final=120.0), absorber=mask)
    assert res.field.norm() < 0.05  # droplet absorbed at the edge


def test_aliasing_guard():
    with pytest.raises(ConfigError):
        StepConfig(dt=0.5, t_final=1.0).check_aliasing(Grid(-16, 16, 2048))


def test_bad_step_config():
    with pytest.raises(ConfigError):
        StepConfig(dt=-1e-3, t_final=1.0)
    with pytest.raises(ConfigError):
        StepConfig(dt=1e-3, t_final=1.0, scheme="euler")
