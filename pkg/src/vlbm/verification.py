"""Self-contained property suites behind the ``verify`` CLI subcommand.

Each suite runs at a fixed seed and returns (passed, lines).  They duplicate
the most load-bearing test oracles so a deployed install can re-certify
itself without the test tree.
"""

import numpy as np

from . import cases, euler, fd_check, kinetic, limiting, mesh, stepping
from .euler import GasModel


def random_admissible(rng, n, rho=(0.1, 3.0), v=(-2.0, 2.0), p=(0.05, 5.0)):
    """n random admissible conserved states, shape (4, n)."""
    w = np.stack([
        rng.uniform(*rho, n),
        rng.uniform(*v, n),
        rng.uniform(*v, n),
        rng.uniform(*p, n),
    ])
    return euler.to_conserved(w, GasModel(1.4))


def smooth_random_field(rng, grid, gas, amp=0.2):
    """Smooth, admissible random periodic initial data on the padded grid."""
    x, y = grid.center_mesh(padded=True)
    shape = grid.shape_padded
    x = np.broadcast_to(x, shape) / (grid.nx * grid.dx)
    y = np.broadcast_to(y, shape) / (grid.ny * grid.dx)

    def wave():
        out = np.zeros(shape)
        for _ in range(3):
            kx, ky = rng.integers(-2, 3, 2)
            phase = rng.uniform(0, 2 * np.pi)
            out += rng.uniform(-1, 1) * np.sin(2 * np.pi * (kx * x + ky * y) + phase)
        return out / 3.0

    w = np.stack([
        1.0 + amp * wave(),
        amp * wave(),
        amp * wave(),
        1.0 + amp * wave(),
    ])
    return euler.to_conserved(w, gas)


def verify_moments(seed=2024, n=1000, tol=1e-13):
    """Equilibria reproduce the state and both fluxes as moments."""
    rng = np.random.default_rng(seed)
    gas = GasModel(1.4)
    model = kinetic.KineticModel(alpha=0.5, a=8.0)
    u = random_admissible(rng, n)
    mks = [kinetic.maxwellian(k, u, model, gas) for k in range(1, 6)]
    total = sum(mks)
    first_x = model.a * (mks[0] - mks[1])
    first_y = model.a * (mks[2] - mks[3])
    f = euler.flux_x(u, gas)
    g = euler.flux_y(u, gas)

    scale = np.abs(u).max()
    errs = [
        np.abs(total - u).max() / scale,
        np.abs(first_x - f).max() / max(np.abs(f).max(), scale),
        np.abs(first_y - g).max() / max(np.abs(g).max(), scale),
    ]
    ok = all(e <= tol for e in errs)
    lines = [
        f"moment conditions on {n} random states: "
        f"sum {errs[0]:.2e}, x-flux {errs[1]:.2e}, y-flux {errs[2]:.2e} "
        f"(tol {tol:.0e}) -> {'PASS' if ok else 'FAIL'}"
    ]
    return ok, lines


def second_order_history(rng, n=16, steps=5, alpha=0.5, a=8.0, order=2):
    """Interior moment history of a periodic constant-speed run."""
    gas = GasModel(1.4)
    grid = mesh.Grid(nx=n, ny=n, dx=1.0 / n)
    model = kinetic.KineticModel(alpha=alpha, a=a)
    plan = mesh.periodic_pair()
    u0 = smooth_random_field(rng, grid, gas)
    fld = mesh.init_distributions(u0, model, gas, grid)
    ctx = stepping.StepContext.from_speed(
        euler.max_wave_speed(fld.interior(grid), gas), a, grid.dx, alpha
    )
    history = [fld.interior(grid).copy()]
    step = stepping.second_order_step if order == 2 else stepping.first_order_step
    for _ in range(steps):
        mesh.apply_boundaries(fld, plan, grid, 0.0, model, gas)
        fld = step(fld, model, gas, ctx, grid)
        history.append(fld.interior(grid).copy())
    return history, gas


def verify_fd_oracle(seed=7, tol_rel=1e-11):
    """Second-order histories annihilate the multi-step recurrence; first-order must not."""
    rng = np.random.default_rng(seed)
    lines = []
    a, alpha = 8.0, 0.5

    hist2, gas = second_order_history(rng, order=2, a=a, alpha=alpha)
    res2 = fd_check.multistep_residual(hist2, a, alpha, gas)
    scale = max(np.abs(h).max() for h in hist2)
    r2 = np.abs(res2).max() / scale

    hist1, _ = second_order_history(rng, order=1, a=a, alpha=alpha)
    res1 = fd_check.multistep_residual(hist1, a, alpha, gas)
    r1 = np.abs(res1).max() / scale

    char_ok = fd_check.characteristic_poly_check(4)
    ok = (r2 <= tol_rel) and (r1 > 100 * tol_rel) and char_ok
    lines.append(
        f"multi-step recurrence 16x16: second-order residual {r2:.2e} "
        f"(tol {tol_rel:.0e}), first-order control {r1:.2e} -> "
        f"{'PASS' if ok else 'FAIL'}"
    )
    lines.append(f"characteristic polynomial on 4x4 grid: {'PASS' if char_ok else 'FAIL'}")
    return ok, lines


def verify_limiters(seed=11, n=1000, tol=1e-10):
    """Analytic pressure-limiter radius vs dense eigensolver; theta ordering."""
    rng = np.random.default_rng(seed)
    ustar = random_admissible(rng, n)
    dflux = np.stack([
        rng.uniform(-1, 1, n), rng.uniform(-1, 1, n),
        rng.uniform(-1, 1, n), rng.uniform(-1, 1, n),
    ])

    worst = 0.0
    for idx in range(n):
        us, df = ustar[:, idx], dflux[:, idx]
        b = np.array([
            [us[0], 0.0, -us[1]],
            [0.0, us[0], -us[2]],
            [-us[1], -us[2], 2.0 * us[3]],
        ])
        amat = np.array([
            [df[0], 0.0, -df[1]],
            [0.0, df[0], -df[2]],
            [-df[1], -df[2], 2.0 * df[3]],
        ])
        vals, vecs = np.linalg.eigh(b)
        b_inv_sqrt = vecs @ np.diag(1.0 / np.sqrt(vals)) @ vecs.T
        dense = np.max(np.abs(np.linalg.eigvalsh(b_inv_sqrt @ amat @ b_inv_sqrt)))
        analytic = float(limiting.pressure_pencil_radius(us, df))
        worst = max(worst, abs(analytic - dense) / dense)
    eig_ok = worst <= tol

    g0 = ustar[1] ** 2 + ustar[2] ** 2 - 2.0 * ustar[0] * ustar[3]
    g0_ok = bool(np.all(g0 < 0.0))

    order_ok = _theta_ordering_holds(rng)
    ok = eig_ok and g0_ok and order_ok
    lines = [
        f"pressure limiter spectral radius vs dense eigensolver on {n} states: "
        f"max rel err {worst:.2e} (tol {tol:.0e}) -> {'PASS' if eig_ok else 'FAIL'}",
        f"gamma0 negative on all admissible states -> {'PASS' if g0_ok else 'FAIL'}",
        f"face-wise theta ordering lmp <= rlmp <= pp -> {'PASS' if order_ok else 'FAIL'}",
    ]
    return ok, lines


def _theta_ordering_holds(rng, trials=20, n=12):
    gas = GasModel(1.4)
    grid = mesh.Grid(nx=n, ny=n, dx=1.0 / n)
    plan = mesh.periodic_pair()
    for _ in range(trials):
        u0 = smooth_random_field(rng, grid, gas, amp=0.4)
        lam = euler.max_wave_speed(u0[:, grid.ix, grid.iy], gas)
        model = kinetic.KineticModel(alpha=0.5)
        model.a = kinetic.kinetic_speed_policy(lam, model)
        fld = mesh.init_distributions(u0, model, gas, grid)
        # one second-order step creates genuine non-equilibrium parts
        ctx = stepping.StepContext.from_speed(lam, model.a, grid.dx, model.alpha)
        mesh.apply_boundaries(fld, plan, grid, 0.0, model, gas)
        fld = stepping.second_order_step(fld, model, gas, ctx, grid)
        mesh.apply_boundaries(fld, plan, grid, 0.0, model, gas)
        faces = stepping.compute_face_data(fld, model, gas, ctx)
        thetas = {}
        for kind in ("lmp", "rlmp", "pp"):
            cfg = limiting.LimiterConfig(density_kind=kind, pressure_on=False)
            bounds = limiting.density_bounds(
                kind, fld.u[euler.RHO], faces.ustar_x[euler.RHO],
                faces.ustar_y[euler.RHO], cfg,
            )
            thetas[kind] = limiting.compute_theta(faces, bounds, cfg, ctx, grid, plan)
        tiny = 1e-12
        for attr in ("theta_x", "theta_y"):
            lmp, rlmp, pp = (getattr(thetas[k], attr) for k in ("lmp", "rlmp", "pp"))
            if np.any(lmp > rlmp + tiny) or np.any(rlmp > pp + tiny):
                return False
    return True


SUITES = {
    "moments": verify_moments,
    "fd-oracle": verify_fd_oracle,
    "limiters": verify_limiters,
}


def verify(what="all"):
    """Run named property suites; returns (all_passed, report lines)."""
    names = list(SUITES) if what == "all" else [what]
    if any(n not in SUITES for n in names):
        raise KeyError(f"unknown suite {what!r}; choose from {list(SUITES)} or 'all'")
    all_ok = True
    lines = []
    for name in names:
        ok, sub = SUITES[name]()
        all_ok &= ok
        lines.append(f"== {name}: {'PASS' if ok else 'FAIL'}")
        lines.extend("   " + s for s in sub)
    return all_ok, lines
