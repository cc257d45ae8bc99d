"""Collide-and-stream time steppers and the per-step driver.

All three schemes stream exactly (a*dt = dx): each moving wave reads its
upstream neighbor, the rest wave stays put.  Updates write the interior of a
fresh field (double buffering); ghost values of the result are undefined
until the next boundary fill.
"""

from collections import namedtuple
from dataclasses import dataclass

import numpy as np

from . import euler, kinetic
from .mesh import DistributionField


class SolverAbort(RuntimeError):
    """Updated solution left the admissible set."""

    def __init__(self, i, j, t, state):
        self.cell = (i, j)
        self.t = t
        self.state = state
        super().__init__(
            f"inadmissible state at cell ({i}, {j}), t={t:.6g}: "
            f"rho={state[0]:.3e}, E={state[3]:.3e}"
        )


@dataclass(frozen=True)
class StepContext:
    """Per-step scalars: global wave speed, kinetic speed, dt, kappa.

    dt is defined as dx/a so exact streaming holds by construction;
    kappa = a(1-alpha)/2 is the diffusion speed entering the intermediate
    states and all limiter formulas.
    """

    lambda_max: float
    a: float
    dt: float
    kappa: float

    @classmethod
    def from_speed(cls, lambda_max, a, dx, alpha):
        return cls(lambda_max, a, dx / a, a * (1.0 - alpha) / 2.0)


# cell-centered equilibrium data shared between face fluxes and the update
EquilibriumParts = namedtuple("EquilibriumParts", ["f", "g", "mk", "pk"])

FaceFluxes = namedtuple("FaceFluxes", ["F1", "G1", "dF", "dG", "ustar_x", "ustar_y"])
"""Face-centered flux data over all padded faces.

x-face arrays have shape (4, P-1, Q): index fi is the face between padded
cells fi and fi+1.  F1/G1 are the blended scheme's diffusive fluxes, dF/dG
the antidiffusive increments, ustar the intermediate states anchoring the
limiter bounds.
"""


def equilibrium_parts(fld, model, gas):
    """Fluxes, moving-wave equilibria and their deviations on all cells."""
    f = euler.flux_x(fld.u, gas)
    g = euler.flux_y(fld.u, gas)
    mk = kinetic.maxwellians_moving(fld.u, f, g, model)
    pk = mk - fld.uk
    return EquilibriumParts(f, g, mk, pk)


def compute_face_data(fld, model, gas, ctx, parts=None):
    """First-order fluxes, antidiffusive increments and intermediate states."""
    if parts is None:
        parts = equilibrium_parts(fld, model, gas)
    u, f, g, pk = fld.u, parts.f, parts.g, parts.pk

    uw, ue = u[:, :-1, :], u[:, 1:, :]
    fw, fe = f[:, :-1, :], f[:, 1:, :]
    us, un = u[:, :, :-1], u[:, :, 1:]
    gs, gn = g[:, :, :-1], g[:, :, 1:]

    half_kappa = 0.5 * ctx.kappa  # equals a(1-alpha)/4
    F1 = 0.5 * (fw + fe) - half_kappa * (ue - uw)
    G1 = 0.5 * (gs + gn) - half_kappa * (un - us)
    dF = ctx.a * (pk[0][:, :-1, :] - pk[1][:, 1:, :])
    dG = ctx.a * (pk[2][:, :, :-1] - pk[3][:, :, 1:])
    ustar_x = 0.5 * (uw + ue) - (fe - fw) / (2.0 * ctx.kappa)
    ustar_y = 0.5 * (us + un) - (gn - gs) / (2.0 * ctx.kappa)
    return FaceFluxes(F1, G1, dF, dG, ustar_x, ustar_y)


def _upstream(grid, di, dj):
    """Padded-array slices of the interior shifted by (di, dj)."""
    g = grid.ghost
    return slice(g + di, g + grid.nx + di), slice(g + dj, g + grid.ny + dj)


def first_order_step(fld, model, gas, ctx, grid, parts=None):
    """Stream each wave's upstream equilibrium; convex-preserving under CFL."""
    if parts is None:
        parts = equilibrium_parts(fld, model, gas)
    mk = parts.mk
    new = DistributionField.empty(grid)
    ix, iy = _upstream(grid, 0, 0)

    ups = []
    for k, (di, dj) in enumerate(kinetic.UPSTREAM_OFFSETS[:4]):
        sx, sy = _upstream(grid, di, dj)
        up = mk[k][:, sx, sy]
        new.uk[k][:, ix, iy] = up
        ups.append(up)
    s4 = ((ups[0] + ups[1]) + ups[2]) + ups[3]
    new.u[:, ix, iy] = s4 + model.alpha * fld.u[:, ix, iy]
    return new


def second_order_step(fld, model, gas, ctx, grid, parts=None):
    """Stream 2*M_k - u_k from upstream; second order, not bound-preserving."""
    if parts is None:
        parts = equilibrium_parts(fld, model, gas)
    mk = parts.mk
    new = DistributionField.empty(grid)
    ix, iy = _upstream(grid, 0, 0)

    news = []
    for k, (di, dj) in enumerate(kinetic.UPSTREAM_OFFSETS[:4]):
        sx, sy = _upstream(grid, di, dj)
        nk = 2.0 * mk[k][:, sx, sy] - fld.uk[k][:, sx, sy]
        new.uk[k][:, ix, iy] = nk
        news.append(nk)
    u5 = fld.u5
    u5_new = 2.0 * model.alpha * fld.u[:, ix, iy] - u5[:, ix, iy]
    s4 = ((news[0] + news[1]) + news[2]) + news[3]
    new.u[:, ix, iy] = s4 + u5_new
    return new


def blended_step(fld, theta, model, gas, ctx, grid, parts=None):
    """Face-blended update: theta=0 gives first order, theta=1 second order.

    The moving waves pick up theta times their upstream deviation from
    equilibrium; the rest wave's update is absorbed directly into the moment
    so it is never materialized.
    """
    if parts is None:
        parts = equilibrium_parts(fld, model, gas)
    mk, pk = parts.mk, parts.pk
    new = DistributionField.empty(grid)
    ix, iy = _upstream(grid, 0, 0)

    tw = theta.theta_x[:-1, :]
    te = theta.theta_x[1:, :]
    ts = theta.theta_y[:, :-1]
    tn = theta.theta_y[:, 1:]

    news = []
    for k, (di, dj), tface in zip(
        range(4), kinetic.UPSTREAM_OFFSETS[:4], (tw, te, ts, tn)
    ):
        sx, sy = _upstream(grid, di, dj)
        nk = mk[k][:, sx, sy] + tface * pk[k][:, sx, sy]
        new.uk[k][:, ix, iy] = nk
        news.append(nk)

    s4 = ((news[0] + news[1]) + news[2]) + news[3]
    corr = (
        ((tw * pk[1][:, ix, iy] + te * pk[0][:, ix, iy]) + ts * pk[3][:, ix, iy])
        + tn * pk[2][:, ix, iy]
    )
    new.u[:, ix, iy] = (s4 + model.alpha * fld.u[:, ix, iy]) - corr
    return new


def advance(fld, t, grid, plan, limiter_cfg, model, gas, t_final=None, accel=None,
            out=None):
    """One full blended step at time t.

    Returns (new field, dt, theta, stats) where stats = (max wave speed,
    min rho, min p, bad cells) of the NEW interior, so callers can track
    watermarks without another sweep.  Order: global wave-speed reduction
    (interior plus prescribed boundary states), speed policy and dt, ghost
    fill, face data, limiter thetas (with sponge override), blended update,
    admissibility audit.  If the nominal dt would overshoot t_final the
    kinetic speed is raised to land exactly (raising a keeps the admissible-
    speed criterion and exact streaming intact).

    accel picks the kernel implementation ("numpy" reference or fused
    "numba"); default follows VLBM_ACCEL.  ``out`` (numba path only) is a
    recyclable field buffer whose contents are overwritten.
    """
    from . import fastpath, limiting  # local imports to avoid cycles
    from .mesh import apply_boundaries, boundary_wave_speed

    mode = fastpath.accel_mode() if accel is None else accel
    use_numba = mode == "numba"

    lam_int, min_rho, min_p, n_bad = fastpath.field_stats(fld, grid, gas, use_numba)
    if n_bad:
        raise euler.DegenerateStateError(
            f"advance requires an admissible state (min rho {min_rho:.3e}, "
            f"min p {min_p:.3e}, {n_bad} bad cells)"
        )
    lam = max(lam_int, boundary_wave_speed(plan, grid, t, gas))
    a = kinetic.kinetic_speed_policy(lam, model)
    dt = grid.dx / a
    if t_final is not None:
        remaining = t_final - t
        if remaining <= 0.0:
            raise ValueError("advance called at or past the final time")
        if dt >= remaining * (1.0 - 1e-12):
            a = grid.dx / remaining
            dt = remaining
    model.a = a
    ctx = StepContext(lam, a, dt, a * (1.0 - model.alpha) / 2.0)

    apply_boundaries(fld, plan, grid, t, model, gas)
    if use_numba:
        new, theta = fastpath.fused_step(
            fld, grid, limiter_cfg, plan, ctx, model, gas, out=out
        )
    else:
        parts = equilibrium_parts(fld, model, gas)
        faces = compute_face_data(fld, model, gas, ctx, parts)
        bounds = limiting.density_bounds(
            limiter_cfg.density_kind, fld.u[euler.RHO], faces.ustar_x[euler.RHO],
            faces.ustar_y[euler.RHO], limiter_cfg,
        )
        theta = limiting.compute_theta(faces, bounds, limiter_cfg, ctx, grid, plan)
        new = blended_step(fld, theta, model, gas, ctx, grid, parts)

    stats = fastpath.field_stats(new, grid, gas, use_numba)
    if stats[3]:
        adm = euler.is_admissible(new.interior(grid))
        bad = np.argwhere(~adm)
        i, j = (bad[0] if len(bad) else (0, 0))
        raise SolverAbort(int(i), int(j), t + dt, new.interior(grid)[:, i, j])
    return new, dt, theta, stats
