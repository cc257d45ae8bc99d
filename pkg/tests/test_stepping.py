"""Time steppers: fixed points, finite-volume equivalences, blending limits."""

import numpy as np
import pytest

from conftest import periodic_model_field, random_distribution_field
from vlbm import euler, fd_check, kinetic, mesh, stepping
from vlbm.euler import GasModel
from vlbm.limiting import LimiterConfig
from vlbm.mesh import ThetaField

GAS = GasModel(1.4)


def make_ctx(grid, model, lam):
    return stepping.StepContext.from_speed(lam, model.a, grid.dx, model.alpha)


def prepared_field(seed=0, n=12, a=None, random_waves=False):
    grid, gas, model, fld, lam = periodic_model_field(seed, n=n, a=a)
    if random_waves:
        rng = np.random.default_rng(seed + 999)
        fld = random_distribution_field(rng, grid, gas, model)
        lam = euler.max_wave_speed(fld.interior(grid), gas)
        model.a = max(model.a, kinetic.kinetic_speed_policy(lam, model))
    plan = mesh.periodic_pair()
    mesh.apply_boundaries(fld, plan, grid, 0.0, model, gas)
    return grid, gas, model, fld, lam, plan


def interior(arr, grid):
    return arr[..., grid.ix, grid.iy]


def test_uniform_field_is_fixed_point():
    grid = mesh.Grid(nx=6, ny=6, dx=0.1)
    model = kinetic.KineticModel(alpha=0.5, a=8.0)
    u0 = np.empty((4,) + grid.shape_padded)
    for c, v in enumerate((1.0, 0.4, -0.2, 3.0)):
        u0[c] = v
    fld = mesh.init_distributions(u0, model, GAS, grid)
    plan = mesh.periodic_pair()
    mesh.apply_boundaries(fld, plan, grid, 0.0, model, GAS)
    ctx = make_ctx(grid, model, euler.max_wave_speed(u0, GAS))
    for step in (stepping.first_order_step, stepping.second_order_step):
        new = step(fld, model, GAS, ctx, grid)
        assert np.allclose(new.interior(grid), fld.interior(grid), rtol=1e-14)
    theta = ThetaField.constant(grid, 0.37)
    new = stepping.blended_step(fld, theta, model, GAS, ctx, grid)
    assert np.allclose(new.interior(grid), fld.interior(grid), rtol=1e-14)


def test_uniform_face_data_vanishes():
    grid = mesh.Grid(nx=6, ny=6, dx=0.1)
    model = kinetic.KineticModel(alpha=0.5, a=8.0)
    u0 = np.empty((4,) + grid.shape_padded)
    for c, v in enumerate((1.0, 0.4, -0.2, 3.0)):
        u0[c] = v
    fld = mesh.init_distributions(u0, model, GAS, grid)
    ctx = make_ctx(grid, model, euler.max_wave_speed(u0, GAS))
    faces = stepping.compute_face_data(fld, model, GAS, ctx)
    assert np.allclose(faces.dF, 0.0, atol=1e-14)
    assert np.allclose(faces.dG, 0.0, atol=1e-14)
    assert np.allclose(faces.ustar_x, u0[:, :-1, :], rtol=1e-14)


def test_first_order_equals_global_lax_friedrichs():
    """At the critical speed the kinetic step is the global LF scheme."""
    grid, gas, model, fld, lam, plan = prepared_field(seed=4, n=16)
    model.a = 2.0 * lam / (1.0 - model.alpha)
    mesh.apply_boundaries(fld, plan, grid, 0.0, model, gas)
    ctx = make_ctx(grid, model, lam)
    new = stepping.first_order_step(fld, model, gas, ctx, grid)

    # independent LF finite-volume oracle on the moments
    u = fld.u
    f = euler.flux_x(u, gas)
    g = euler.flux_y(u, gas)
    half_lam = 0.5 * lam
    flf = 0.5 * (f[:, 1:, :] + f[:, :-1, :]) - half_lam * (u[:, 1:, :] - u[:, :-1, :])
    glf = 0.5 * (g[:, :, 1:] + g[:, :, :-1]) - half_lam * (u[:, :, 1:] - u[:, :, :-1])
    lam_cfl = ctx.dt / grid.dx
    expect = interior(u, grid) - lam_cfl * (
        flf[:, grid.ghost:, :][:, : grid.nx, grid.iy]
        - flf[:, grid.ghost - 1:, :][:, : grid.nx, grid.iy]
        + glf[:, grid.ix, grid.ghost:][:, :, : grid.ny]
        - glf[:, grid.ix, grid.ghost - 1:][:, :, : grid.ny]
    )
    assert np.allclose(new.interior(grid), expect, rtol=1e-14, atol=1e-14)


def test_first_order_fv_form_oracle():
    """Moments follow the diffusive-flux finite-volume form at any speed."""
    grid, gas, model, fld, lam, plan = prepared_field(seed=5, n=12)
    ctx = make_ctx(grid, model, lam)
    new = stepping.first_order_step(fld, model, gas, ctx, grid)
    faces = stepping.compute_face_data(fld, model, gas, ctx)
    g = grid.ghost
    lam_cfl = ctx.dt / grid.dx
    expect = interior(fld.u, grid) - lam_cfl * (
        faces.F1[:, g : g + grid.nx, grid.iy]
        - faces.F1[:, g - 1 : g - 1 + grid.nx, grid.iy]
        + faces.G1[:, grid.ix, g : g + grid.ny]
        - faces.G1[:, grid.ix, g - 1 : g - 1 + grid.ny]
    )
    assert np.allclose(new.interior(grid), expect, rtol=1e-13, atol=1e-13)


def test_second_order_fv_form_oracle():
    """Second-order moments equal the antidiffusive finite-volume form."""
    grid, gas, model, fld, lam, plan = prepared_field(seed=6, n=12, random_waves=True)
    mesh.apply_boundaries(fld, plan, grid, 0.0, model, gas)
    ctx = make_ctx(grid, model, euler.max_wave_speed(fld.interior(grid), gas))
    new = stepping.second_order_step(fld, model, gas, ctx, grid)
    faces = stepping.compute_face_data(fld, model, gas, ctx)
    g = grid.ghost
    f2 = faces.F1 + faces.dF
    g2 = faces.G1 + faces.dG
    lam_cfl = ctx.dt / grid.dx
    expect = interior(fld.u, grid) - lam_cfl * (
        f2[:, g : g + grid.nx, grid.iy]
        - f2[:, g - 1 : g - 1 + grid.nx, grid.iy]
        + g2[:, grid.ix, g : g + grid.ny]
        - g2[:, grid.ix, g - 1 : g - 1 + grid.ny]
    )
    scale = np.abs(expect).max()
    assert np.abs(new.interior(grid) - expect).max() <= 1e-13 * scale


def test_blended_theta_zero_is_first_order_bitwise():
    grid, gas, model, fld, lam, plan = prepared_field(seed=7, n=10, random_waves=True)
    mesh.apply_boundaries(fld, plan, grid, 0.0, model, gas)
    ctx = make_ctx(grid, model, euler.max_wave_speed(fld.interior(grid), gas))
    theta = ThetaField.constant(grid, 0.0)
    blended = stepping.blended_step(fld, theta, model, gas, ctx, grid)
    first = stepping.first_order_step(fld, model, gas, ctx, grid)
    assert np.array_equal(blended.interior(grid), first.interior(grid))
    assert np.array_equal(
        blended.uk[:, :, grid.ix, grid.iy], first.uk[:, :, grid.ix, grid.iy]
    )


def test_blended_theta_one_is_second_order():
    grid, gas, model, fld, lam, plan = prepared_field(seed=8, n=10, random_waves=True)
    mesh.apply_boundaries(fld, plan, grid, 0.0, model, gas)
    ctx = make_ctx(grid, model, euler.max_wave_speed(fld.interior(grid), gas))
    theta = ThetaField.constant(grid, 1.0)
    blended = stepping.blended_step(fld, theta, model, gas, ctx, grid)
    second = stepping.second_order_step(fld, model, gas, ctx, grid)
    scale = np.abs(second.interior(grid)).max()
    assert np.abs(blended.interior(grid) - second.interior(grid)).max() <= 1e-14 * scale


def test_blended_matches_convex_reconstruction():
    """Kinetic blended moments equal the face-wise convex decomposition."""
    rng = np.random.default_rng(17)
    grid, gas, model, fld, lam, plan = prepared_field(seed=18, n=12, random_waves=True)
    mesh.apply_boundaries(fld, plan, grid, 0.0, model, gas)
    lam = euler.max_wave_speed(fld.interior(grid), gas)
    ctx = make_ctx(grid, model, lam)
    theta = ThetaField(
        rng.uniform(0.0, 1.0, (grid.nx + 1, grid.ny)),
        rng.uniform(0.0, 1.0, (grid.nx, grid.ny + 1)),
    )
    new = stepping.blended_step(fld, theta, model, gas, ctx, grid)

    faces = stepping.compute_face_data(fld, model, gas, ctx)
    g = grid.ghost
    fx = slice(g - 1, g + grid.nx)
    fy = slice(g - 1, g + grid.ny)
    ux = faces.ustar_x[:, fx, grid.iy]
    uy = faces.ustar_y[:, grid.ix, fy]
    dfx = faces.dF[:, fx, grid.iy]
    dfy = faces.dG[:, grid.ix, fy]
    tx = theta.theta_x[None]
    ty = theta.theta_y[None]
    east = (ux - tx * dfx / ctx.kappa)[:, 1:, :]
    west = (ux + tx * dfx / ctx.kappa)[:, :-1, :]
    north = (uy - ty * dfy / ctx.kappa)[:, :, 1:]
    south = (uy + ty * dfy / ctx.kappa)[:, :, :-1]
    alpha = model.alpha
    expect = (2 * alpha - 1) * interior(fld.u, grid) + (1 - alpha) / 2 * (
        east + west + north + south
    )
    scale = np.abs(expect).max()
    assert np.abs(new.interior(grid) - expect).max() <= 1e-13 * scale


def test_intermediate_states_admissible(rng):
    """Face states built at the global wave speed stay admissible."""
    from conftest import random_admissible_states

    left = random_admissible_states(rng, 10_000)
    right = random_admissible_states(rng, 10_000)
    lam = max(
        euler.local_wave_speed(left, GAS).max(),
        euler.local_wave_speed(right, GAS).max(),
    )
    kappa = lam  # critical case
    fl = euler.flux_x(left, GAS)
    fr = euler.flux_x(right, GAS)
    ustar = 0.5 * (left + right) - (fr - fl) / (2.0 * kappa)
    assert np.all(euler.is_admissible(ustar))


def test_single_jump_increment_by_hand():
    """One discontinuity: the face increment matches the hand formula."""
    grid = mesh.Grid(nx=8, ny=4, dx=0.125)
    model = kinetic.KineticModel(alpha=0.5, a=9.0)
    left = euler.to_conserved(euler.primitive(1.0, 0.1, 0.0, 1.0), GAS)
    right = euler.to_conserved(euler.primitive(0.5, -0.2, 0.0, 0.4), GAS)
    x, _ = grid.center_mesh(padded=True)
    u0 = np.where(
        np.broadcast_to(x < 0.5, grid.shape_padded)[None],
        left[:, None, None], right[:, None, None],
    )
    fld = mesh.init_distributions(u0, model, GAS, grid)
    # perturb wave 1 on the left of the jump and wave 2 on the right
    fld.uk[0, :, :, :] += 0.01
    fld.u += 0.01
    ctx = make_ctx(grid, model, euler.max_wave_speed(u0, GAS))
    faces = stepping.compute_face_data(fld, model, GAS, ctx)

    g = grid.ghost
    i = g + 3  # face between cells 3 and 4 (jump at x=0.5)
    j = g + 1
    ul, ur = fld.u[:, i, j], fld.u[:, i + 1, j]
    m1l = kinetic.maxwellian(1, ul, model, GAS)
    m2r = kinetic.maxwellian(2, ur, model, GAS)
    expect = model.a * (m1l - fld.uk[0, :, i, j] - m2r + fld.uk[1, :, i + 1, j])
    assert np.allclose(faces.dF[:, i, j], expect, rtol=1e-13, atol=1e-14)


def test_first_order_preserves_admissibility(rng):
    """Default-policy first-order updates stay in the admissible set."""
    for trial in range(40):
        grid, gas, model, fld, lam, plan = prepared_field(seed=100 + trial, n=8)
        mesh.apply_boundaries(fld, plan, grid, 0.0, model, gas)
        ctx = make_ctx(grid, model, lam)
        new = stepping.first_order_step(fld, model, gas, ctx, grid)
        assert np.all(euler.is_admissible(new.interior(grid)))


def test_advance_step_count_fixed_speed():
    """Fixed speed 10.7 on a 1/20 mesh reaches t=1 in exactly 214 steps."""
    from vlbm.driver import RunConfig, run

    summary, _, _ = run(RunConfig(case="entropy_wave", nx=20, limiter="pp"))
    assert summary.steps == 214


def test_advance_uniform_state_unchanged():
    grid = mesh.Grid(nx=6, ny=6, dx=0.1)
    model = kinetic.KineticModel(alpha=0.5)
    u0 = np.empty((4,) + grid.shape_padded)
    for c, v in enumerate((1.0, 0.4, -0.2, 3.0)):
        u0[c] = v
    model.a = kinetic.kinetic_speed_policy(euler.max_wave_speed(u0, GAS), model)
    fld = mesh.init_distributions(u0, model, GAS, grid)
    plan = mesh.periodic_pair()
    cfg = LimiterConfig("rlmp")
    new, dt, theta, stats = stepping.advance(fld, 0.0, grid, plan, cfg, model, GAS)
    assert np.allclose(new.interior(grid), fld.interior(grid), rtol=1e-14)
    assert theta.min() == 1.0


def test_advance_cfl_quarter_under_policy():
    grid, gas, model, fld, lam, plan = prepared_field(seed=30, n=10)
    cfg = LimiterConfig("rlmp")
    new, dt, _, _ = stepping.advance(fld, 0.0, grid, plan, cfg, model, gas)
    assert lam * dt / grid.dx == pytest.approx(0.25, rel=1e-12)


def test_advance_rejects_inadmissible_input():
    grid = mesh.Grid(nx=4, ny=4, dx=0.25)
    model = kinetic.KineticModel(alpha=0.5, a=8.0)
    u0 = np.ones((4,) + grid.shape_padded)
    fld = mesh.DistributionField.from_waves(*[u0 / 5.0] * 5)
    fld.u[3] = 0.1  # kinetic energy now exceeds total energy
    with pytest.raises(euler.DegenerateStateError):
        stepping.advance(
            fld, 0.0, grid, mesh.periodic_pair(), LimiterConfig("rlmp"), model, GAS
        )


def test_numpy_numba_paths_agree():
    pytest.importorskip("numba")
    from vlbm.driver import RunConfig, run

    results = {}
    for mode in ("numpy", "numba"):
        import os

        os.environ["VLBM_ACCEL"] = mode
        try:
            s, fld, grid = run(RunConfig(case="sod", nx=60, limiter="rlmp"))
            results[mode] = (s.errors.l1, fld.interior(grid).copy())
        finally:
            os.environ.pop("VLBM_ACCEL", None)
    l1_np, u_np = results["numpy"]
    l1_nb, u_nb = results["numba"]
    assert l1_nb == pytest.approx(l1_np, rel=1e-9)
    assert np.allclose(u_nb, u_np, rtol=1e-9, atol=1e-12)


def test_appendix_recurrence_second_order_history():
    """Five second-order steps satisfy the eliminated-variable recurrence."""
    grid, gas, model, fld, lam, plan = prepared_field(seed=40, n=16, a=8.0)
    ctx = make_ctx(grid, model, lam)
    history = [fld.interior(grid).copy()]
    for _ in range(5):
        mesh.apply_boundaries(fld, plan, grid, 0.0, model, gas)
        fld = stepping.second_order_step(fld, model, gas, ctx, grid)
        history.append(fld.interior(grid).copy())
    res = fd_check.multistep_residual(history, 8.0, model.alpha, gas)
    scale = max(np.abs(h).max() for h in history)
    assert np.abs(res).max() <= 1e-11 * scale


def test_appendix_recurrence_rejects_first_order_history():
    grid, gas, model, fld, lam, plan = prepared_field(seed=41, n=16, a=8.0)
    ctx = make_ctx(grid, model, lam)
    history = [fld.interior(grid).copy()]
    for _ in range(5):
        mesh.apply_boundaries(fld, plan, grid, 0.0, model, gas)
        fld = stepping.first_order_step(fld, model, gas, ctx, grid)
        history.append(fld.interior(grid).copy())
    res = fd_check.multistep_residual(history, 8.0, model.alpha, gas)
    scale = max(np.abs(h).max() for h in history)
    assert np.abs(res).max() > 1e-9 * scale
