"""Moment matrix, stencil algebra and the eliminated-variable recurrence."""

import numpy as np
import pytest

from conftest import periodic_model_field, random_admissible_states
from vlbm import euler, fd_check, kinetic
from vlbm.euler import GasModel

GAS = GasModel(1.4)


def test_moment_matrix_inverse_exact():
    prod = fd_check.MOMENT_MATRIX @ fd_check.MOMENT_MATRIX_INV
    assert np.array_equal(prod, np.eye(5))
    prod = fd_check.MOMENT_MATRIX_INV @ fd_check.MOMENT_MATRIX
    assert np.array_equal(prod, np.eye(5))


def test_equilibrium_moments_match_matrix_product(rng):
    """Q applied to the five equilibria gives [u, f/a, g/a, (1-a)u/2 x2]."""
    a, alpha = 7.0, 0.5
    model = kinetic.KineticModel(alpha=alpha, a=a)
    u = random_admissible_states(rng, 200)
    mks = np.stack([kinetic.maxwellian(k, u, model, GAS) for k in range(1, 6)])
    via_matrix = np.einsum("rk,kcn->rcn", fd_check.MOMENT_MATRIX, mks)
    expected = fd_check.equilibrium_moments(u, a, alpha, GAS)
    for row, exp in zip(via_matrix, expected):
        assert np.allclose(row, exp, rtol=1e-14, atol=1e-14)


def test_shift_operators_roll_periodically(rng):
    u = rng.standard_normal((4, 6, 5))
    assert np.array_equal(fd_check.xp(u)[:, 0, :], u[:, 1, :])
    assert np.array_equal(fd_check.xp(u)[:, -1, :], u[:, 0, :])
    assert np.array_equal(fd_check.yp(u)[:, :, -1], u[:, :, 0])
    # operators commute on periodic fields
    assert np.allclose(fd_check.xp(fd_check.ym(u)), fd_check.ym(fd_check.xp(u)))
    # averaging a constant returns the constant
    c = np.full((4, 6, 5), 3.25)
    assert np.array_equal(fd_check.axis_average(c), c)
    assert np.array_equal(fd_check.diag_average(c), c)


def test_residual_zero_for_constant_history():
    u = np.ones((4, 8, 8)) * np.array([1.0, 0.2, -0.1, 2.5])[:, None, None]
    history = [u.copy() for _ in range(6)]
    res = fd_check.multistep_residual(history, 5.0, 0.5, GAS)
    assert np.abs(res).max() <= 1e-14


def test_residual_requires_six_fields_and_min_size():
    u = np.ones((4, 8, 8))
    with pytest.raises(ValueError):
        fd_check.multistep_residual([u] * 5, 5.0, 0.5, GAS)
    small = np.ones((4, 4, 4))
    with pytest.raises(ValueError):
        fd_check.multistep_residual([small] * 6, 5.0, 0.5, GAS)


def test_characteristic_polynomial_annihilates_small_grids():
    assert fd_check.characteristic_poly_check(4)
    assert fd_check.characteristic_poly_check(2)


def test_dense_construction_gated():
    with pytest.raises(ValueError):
        fd_check.build_update_matrix(9)


def test_collapsed_grid_has_eigenvalue_minus_one():
    a = fd_check.build_update_matrix(1)
    assert np.allclose(a, -np.eye(5))
    vals = np.linalg.eigvals(a)
    assert np.allclose(vals, -1.0)
    assert fd_check.characteristic_poly_check(1)


def test_first_block_row_operators():
    n = 4
    blocks = fd_check.first_block_row(n)
    xplus, xminus, yplus, yminus = fd_check._shift_matrices(n)
    eye = np.eye(n * n)
    assert np.allclose(blocks["u"], -eye)
    assert np.allclose(blocks["v1"], 0.5 * (xplus - xminus))
    assert np.allclose(blocks["v2"], 0.5 * (yplus - yminus))
    assert np.allclose(blocks["w1"], eye - 0.5 * (xplus + xminus))
    assert np.allclose(blocks["w2"], eye - 0.5 * (yplus + yminus))


def test_dense_update_matches_kinetic_step():
    """One dense-matrix application equals one second-order kinetic step."""
    from vlbm import mesh, stepping

    n = 5
    with pytest.raises(ValueError):
        fd_check.build_update_matrix(12)
    grid, gas, model, fld, lam = periodic_model_field(seed=8, n=n, a=9.0)
    plan = mesh.periodic_pair()
    mesh.apply_boundaries(fld, plan, grid, 0.0, model, gas)
    ctx = stepping.StepContext.from_speed(lam, model.a, grid.dx, model.alpha)

    # moments m = Q [u1..u5] per cell, flattened i-major
    interior = (slice(None), grid.ix, grid.iy)
    waves = [fld.uk[k][interior] for k in range(4)] + [fld.u5[interior]]
    m = np.einsum("rk,kcij->rcij", fd_check.MOMENT_MATRIX, np.stack(waves))
    meq = np.stack(fd_check.equilibrium_moments(fld.u[interior], model.a, model.alpha, gas))
    amat = fd_check.build_update_matrix(n)

    rhs = (m - 2.0 * meq).transpose(1, 0, 2, 3).reshape(4, 5 * n * n)
    m_next_flat = (amat @ rhs.T).T
    m_next = m_next_flat.reshape(4, 5, n, n).transpose(1, 0, 2, 3)

    stepped = stepping.second_order_step(fld, model, gas, ctx, grid)
    waves_next = [stepped.uk[k][interior] for k in range(4)] + [stepped.u5[interior]]
    m_direct = np.einsum("rk,kcij->rcij", fd_check.MOMENT_MATRIX, np.stack(waves_next))
    assert np.allclose(m_next, m_direct, rtol=1e-12, atol=1e-12)
