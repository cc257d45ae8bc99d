"""Face-wise blending parameters: density limiters and pressure positivity.

Each face gets a single scalar theta = min(1, theta_rho, theta_p) limiting
the whole state vector.  The density limiters cap theta so every cell's
updated density stays inside its own bounds [mu, nu]; positivity-only (PP)
uses the sentinel bounds (0, +inf) so one code path serves all three kinds.
The pressure limiter caps theta by the reciprocal spectral radius of a 3x3
pencil whose eigenvalues are known in closed form.
"""

from dataclasses import dataclass

import numpy as np

from .euler import RHO, MX, MY, EN
from .mesh import ThetaField

DENSITY_KINDS = ("pp", "lmp", "rlmp", "none", "first_order")


@dataclass(frozen=True)
class LimiterConfig:
    """Limiter selection and strictness knobs.

    eps keeps the positivity inequalities strict (density and pressure would
    otherwise be allowed to touch zero); relax_lo/relax_hi widen the local
    density bounds for the relaxed maximum principle.
    """

    density_kind: str = "rlmp"
    pressure_on: bool = True
    eps: float = 1e-16
    relax_lo: float = 0.999
    relax_hi: float = 1.001

    def __post_init__(self):
        if self.density_kind not in DENSITY_KINDS:
            raise ValueError(f"unknown density limiter {self.density_kind!r}")
        if not 0.0 < self.relax_lo < 1.0 < self.relax_hi:
            raise ValueError("need 0 < relax_lo < 1 < relax_hi")
        if not self.eps > 0.0:
            raise ValueError("eps must be positive")


@dataclass(frozen=True)
class DensityBounds:
    """Per-cell density bounds mu <= nu on the padded grid.

    Entries are defined on all cells except the outermost padded ring (whose
    faces are not all available); that ring is never read by the limiter.
    """

    mu: np.ndarray
    nu: np.ndarray


def density_bounds(kind, rho, rho_star_x, rho_star_y, cfg):
    """Local density extrema over a cell and its four face states.

    lmp: plain min/max; rlmp: scaled by relax_lo/relax_hi; pp: sentinel
    (0, +inf).  rho is the padded cell density, rho_star_* the face
    intermediate densities over all padded faces.
    """
    mu = np.full(rho.shape, np.nan)
    nu = np.full(rho.shape, np.nan)
    if kind in ("pp", "none", "first_order"):
        mu.fill(0.0)
        nu.fill(np.inf)
        return DensityBounds(mu, nu)

    c = rho[1:-1, 1:-1]
    west = rho_star_x[:-1, 1:-1]
    east = rho_star_x[1:, 1:-1]
    south = rho_star_y[1:-1, :-1]
    north = rho_star_y[1:-1, 1:]
    lo = np.minimum(np.minimum(np.minimum(c, west), east), np.minimum(south, north))
    hi = np.maximum(np.maximum(np.maximum(c, west), east), np.maximum(south, north))
    if kind == "rlmp":
        lo = cfg.relax_lo * lo
        hi = cfg.relax_hi * hi
    mu[1:-1, 1:-1] = lo
    nu[1:-1, 1:-1] = hi
    return DensityBounds(mu, nu)


def theta_rho(kind, rho_star, increment, kappa, mu_up, nu_up, mu_dn, nu_dn, eps):
    """Largest admissible theta for the density bounds at one face set.

    'up' bounds belong to the cell before the face (west/south), 'dn' to the
    cell after it.  A positive increment pushes density down in the upwind
    branch and up in the downwind one, so it is capped by
    min(nu_dn - rho*, rho* - mu_up); the negative case mirrors.  Values may
    exceed 1 (clamped later); a vanishing increment imposes no constraint.
    """
    headroom_pos = np.minimum(nu_dn - rho_star, rho_star - mu_up)
    headroom_neg = np.minimum(rho_star - mu_dn, nu_up - rho_star)
    headroom = np.where(increment > 0.0, headroom_pos, headroom_neg)
    # rho* is itself a bound candidate, so negative headroom can only be
    # roundoff; clamp instead of returning a negative theta
    headroom = np.maximum(headroom, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        theta = kappa * headroom / np.abs(increment)
    if kind == "pp":
        theta = np.maximum(theta - eps, 0.0)
    return np.where(increment == 0.0, 1.0, theta)


def pressure_pencil_radius(ustar, dflux):
    """Spectral radius of the symmetric pencil governing pressure positivity.

    For an admissible face state u* and flux increment dflux, the positivity
    constraint over the quadratic test family reduces to an eigenvalue
    problem whose spectrum is {dF_rho/rho*, (-g1 +- sqrt(disc))/(2 g0)} in
    closed form; g0 = -det(B)/rho* is negative on admissible states.  A
    (slightly) negative discriminant can only be roundoff and is clamped;
    beyond roundoff it signals an internal inconsistency.
    """
    rs, m1s, m2s, es = ustar[RHO], ustar[MX], ustar[MY], ustar[EN]
    dr, dm1, dm2, de = dflux[RHO], dflux[MX], dflux[MY], dflux[EN]

    g0 = m1s * m1s + m2s * m2s - 2.0 * rs * es
    g1 = 2.0 * (dr * es + de * rs - dm1 * m1s - dm2 * m2s)
    q = dm1 * dm1 + dm2 * dm2 - 2.0 * dr * de
    disc = g1 * g1 - 4.0 * g0 * q
    scale = g1 * g1 + np.abs(4.0 * g0 * q)
    if np.any(disc < -1e-12 * scale - 1e-300):
        raise ArithmeticError("negative discriminant in the pressure limiter")
    disc = np.maximum(disc, 0.0)
    return np.maximum(np.abs(dr) / rs, (np.abs(g1) + np.sqrt(disc)) / (-2.0 * g0))


def theta_pressure(ustar, dflux, kappa, eps):
    """Largest theta keeping the face's convex pieces at positive pressure.

    kappa over the pencil's spectral radius, minus eps to keep the
    inequality strict.  A zero flux increment imposes no constraint
    (theta = 1).
    """
    radius = pressure_pencil_radius(ustar, dflux)
    with np.errstate(divide="ignore"):
        theta = np.maximum(kappa / radius - eps, 0.0)
    return np.where(radius == 0.0, 1.0, theta)


def compute_theta(faces, bounds, cfg, ctx, grid, plan):
    """Combine density and pressure caps into the face theta fields.

    theta = min(1, theta_rho, theta_p), evaluated on every face adjacent to
    an interior cell; sponge layers from the boundary plan then force
    theta = 0 (pure first-order fluxes) near the named sides.
    """
    g, nx, ny = grid.ghost, grid.nx, grid.ny
    if cfg.density_kind == "none":
        theta = ThetaField.constant(grid, 1.0)
        return _apply_sponge(theta, grid, plan)
    if cfg.density_kind == "first_order":
        return ThetaField.constant(grid, 0.0)

    # x faces (i-1/2, j), i=0..nx: full-face index G-1+i, interior rows
    fx = slice(g - 1, g + nx)
    fy_rows = slice(g, g + ny)
    dfx = faces.dF[RHO][fx, fy_rows]
    rsx = faces.ustar_x[RHO][fx, fy_rows]
    tx = theta_rho(
        cfg.density_kind, rsx, dfx, ctx.kappa,
        bounds.mu[g - 1 : g + nx, fy_rows], bounds.nu[g - 1 : g + nx, fy_rows],
        bounds.mu[g : g + nx + 1, fy_rows], bounds.nu[g : g + nx + 1, fy_rows],
        cfg.eps,
    )
    # y faces (i, j-1/2), j=0..ny
    fx_cols = slice(g, g + nx)
    fy = slice(g - 1, g + ny)
    dfy = faces.dG[RHO][fx_cols, fy]
    rsy = faces.ustar_y[RHO][fx_cols, fy]
    ty = theta_rho(
        cfg.density_kind, rsy, dfy, ctx.kappa,
        bounds.mu[fx_cols, g - 1 : g + ny], bounds.nu[fx_cols, g - 1 : g + ny],
        bounds.mu[fx_cols, g : g + ny + 1], bounds.nu[fx_cols, g : g + ny + 1],
        cfg.eps,
    )

    if cfg.pressure_on:
        tx = np.minimum(
            tx,
            theta_pressure(
                faces.ustar_x[:, fx, fy_rows], faces.dF[:, fx, fy_rows],
                ctx.kappa, cfg.eps,
            ),
        )
        ty = np.minimum(
            ty,
            theta_pressure(
                faces.ustar_y[:, fx_cols, fy], faces.dG[:, fx_cols, fy],
                ctx.kappa, cfg.eps,
            ),
        )

    theta = ThetaField(np.minimum(tx, 1.0), np.minimum(ty, 1.0))
    return _apply_sponge(theta, grid, plan)


def _apply_sponge(theta, grid, plan):
    """Zero theta on every face touching a cell inside a sponge layer."""
    nx, ny = grid.nx, grid.ny
    for side, w in plan.sponge.items():
        if w == 0:
            continue
        if side == "left":
            theta.theta_x[: w + 1, :] = 0.0
            theta.theta_y[:w, :] = 0.0
        elif side == "right":
            theta.theta_x[nx - w :, :] = 0.0
            theta.theta_y[nx - w :, :] = 0.0
        elif side == "bottom":
            theta.theta_y[:, : w + 1] = 0.0
            theta.theta_x[:, :w] = 0.0
        elif side == "top":
            theta.theta_y[:, ny - w :] = 0.0
            theta.theta_x[:, ny - w :] = 0.0
    return theta
