"""Five-wave equilibria: moment conditions, admissible speeds, speed policy."""

import numpy as np
import pytest

from conftest import random_admissible_states
from vlbm import euler, kinetic
from vlbm.euler import GasModel, conserved

GAS = GasModel(1.4)


def make_model(a=8.0, alpha=0.5, fixed_a=None):
    return kinetic.KineticModel(alpha=alpha, a=a, fixed_a=fixed_a)


def test_alpha_range_enforced():
    with pytest.raises(ValueError):
        kinetic.KineticModel(alpha=0.4)
    with pytest.raises(ValueError):
        kinetic.KineticModel(alpha=1.0)
    kinetic.KineticModel(alpha=0.5)


def test_velocity_table_scales_with_speed():
    model = make_model(a=3.0)
    assert np.array_equal(model.e_x, [3.0, -3.0, 0.0, 0.0, 0.0])
    assert np.array_equal(model.e_y, [0.0, 0.0, 3.0, -3.0, 0.0])
    assert kinetic.UPSTREAM_OFFSETS == ((-1, 0), (1, 0), (0, -1), (0, 1), (0, 0))


def test_equilibria_sum_to_state(rng):
    model = make_model()
    u = random_admissible_states(rng, 300)
    total = sum(kinetic.maxwellian(k, u, model, GAS) for k in range(1, 6))
    assert np.allclose(total, u, rtol=1e-14, atol=1e-15)


def test_rest_wave_is_pure_scaling():
    model = make_model(alpha=0.5)
    u = conserved(1.0, 0.0, 0.0, 2.5)
    assert np.array_equal(kinetic.maxwellian(5, u, model, GAS), 0.5 * u)


def test_moment_conditions_oracle(rng):
    """First moments of the equilibria reproduce both physical fluxes."""
    model = make_model(a=6.0)
    u = random_admissible_states(rng, 1000)
    mks = [kinetic.maxwellian(k, u, model, GAS) for k in range(1, 6)]
    fx = sum(ex * mk for ex, mk in zip(model.e_x, mks))
    fy = sum(ey * mk for ey, mk in zip(model.e_y, mks))
    f, g = euler.flux_x(u, GAS), euler.flux_y(u, GAS)
    scale = np.abs(u).max()
    assert np.abs(fx - f).max() <= 1e-13 * max(scale, np.abs(f).max())
    assert np.abs(fy - g).max() <= 1e-13 * max(scale, np.abs(g).max())


def test_rest_wave_exactly_linear(rng):
    """At alpha = 1/2 the rest wave is an exact halving, hence exactly additive."""
    model = make_model(alpha=0.5)
    u = random_admissible_states(rng, 100)
    w = random_admissible_states(rng, 100)
    lhs = kinetic.maxwellian(5, u + w, model, GAS)
    rhs = kinetic.maxwellian(5, u, model, GAS) + kinetic.maxwellian(5, w, model, GAS)
    assert np.array_equal(lhs, rhs)
    assert np.array_equal(kinetic.maxwellian(5, np.zeros_like(u), model, GAS), np.zeros_like(u))


def test_maxwellians_moving_matches_per_wave(rng):
    model = make_model(a=5.0)
    u = random_admissible_states(rng, 50)
    f, g = euler.flux_x(u, GAS), euler.flux_y(u, GAS)
    stacked = kinetic.maxwellians_moving(u, f, g, model)
    for k in range(1, 5):
        assert np.array_equal(stacked[k - 1], kinetic.maxwellian(k, u, model, GAS))


def test_wave_index_validated():
    with pytest.raises(ValueError):
        kinetic.maxwellian(0, conserved(1, 0, 0, 2.5), make_model(), GAS)
    with pytest.raises(ValueError):
        kinetic.maxwellian(6, conserved(1, 0, 0, 2.5), make_model(), GAS)


def test_bouchut_min_speed_values():
    assert kinetic.bouchut_min_speed(1.0, 0.5) == pytest.approx(4.0)
    assert kinetic.bouchut_min_speed(1.0, 0.0) == pytest.approx(2.0)
    assert kinetic.bouchut_min_speed(2.5, 0.75) == pytest.approx(20.0)


def test_speed_policy_default_and_fixed():
    model = make_model(alpha=0.5)
    assert kinetic.kinetic_speed_policy(1.15, model) == pytest.approx(4.6)

    fixed = make_model(fixed_a=10.7)
    assert kinetic.kinetic_speed_policy(2.6, fixed) == 10.7  # 4*2.6 <= 10.7

    too_slow = make_model(fixed_a=1.0)
    with pytest.raises(ValueError):
        kinetic.kinetic_speed_policy(1.0, too_slow)


def test_default_policy_cfl_quarter():
    model = make_model(alpha=0.5)
    lam = 1.7
    a = kinetic.kinetic_speed_policy(lam, model)
    dx = 0.01
    dt = dx / a
    assert lam * dt / dx == pytest.approx(0.25, rel=1e-15)
