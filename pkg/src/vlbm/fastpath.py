"""Fused single-pass kernels for the per-step hot path.

The numpy implementation in stepping.py is the reference; at desk scale it
is memory-bound (every elementwise op walks the whole grid).  These kernels
fuse each phase into one sweep.  Selection is via VLBM_ACCEL: "numpy",
"numba", or "auto" (default: numba when importable).  Results agree with
the reference path to roundoff (different summation order only); a test
pins the two paths against each other.

Kernel phases: cell fluxes; face increments and intermediate states (x/y);
density bounds; face thetas (density + pressure caps fused); blended
update.  Equilibria are recomputed on the fly instead of materialized.
"""

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a soft dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


def accel_mode():
    mode = os.environ.get("VLBM_ACCEL", "auto").lower()
    if mode not in ("auto", "numpy", "numba"):
        mode = "auto"
    if mode == "auto":
        return "numba" if HAVE_NUMBA else "numpy"
    if mode == "numba" and not HAVE_NUMBA:
        return "numpy"
    return mode


@njit(cache=True)
def k_fluxes(u, gamma, f, g):
    """Physical fluxes on every padded cell."""
    _, p_dim, q_dim = u.shape
    gm1 = gamma - 1.0
    for i in range(p_dim):
        for j in range(q_dim):
            rho = u[0, i, j]
            m1 = u[1, i, j]
            m2 = u[2, i, j]
            en = u[3, i, j]
            v1 = m1 / rho
            v2 = m2 / rho
            p = gm1 * (en - 0.5 * (m1 * v1 + m2 * v2))
            f[0, i, j] = m1
            f[1, i, j] = m1 * v1 + p
            f[2, i, j] = m2 * v1
            f[3, i, j] = (en + p) * v1
            g[0, i, j] = m2
            g[1, i, j] = m1 * v2
            g[2, i, j] = m2 * v2 + p
            g[3, i, j] = (en + p) * v2


@njit(cache=True)
def k_stats(u, gamma, ghost):
    """Interior reduction: (max wave speed, min rho, min p, bad-cell count).

    A cell is bad unless rho > 0 and p > 0 (NaN fails both comparisons and
    is counted bad).
    """
    _, p_dim, q_dim = u.shape
    gm1 = gamma - 1.0
    lam = 0.0
    min_rho = np.inf
    min_p = np.inf
    n_bad = 0
    for i in range(ghost, p_dim - ghost):
        for j in range(ghost, q_dim - ghost):
            rho = u[0, i, j]
            m1 = u[1, i, j]
            m2 = u[2, i, j]
            v1 = m1 / rho
            v2 = m2 / rho
            p = gm1 * (u[3, i, j] - 0.5 * (m1 * v1 + m2 * v2))
            if rho < min_rho:
                min_rho = rho
            if p < min_p:
                min_p = p
            if rho > 0.0 and p > 0.0:
                s = np.sqrt(v1 * v1 + v2 * v2) + np.sqrt(gamma * p / rho)
                if s > lam:
                    lam = s
            else:
                n_bad += 1
    return lam, min_rho, min_p, n_bad


@njit(cache=True)
def k_faces_x(u, uk, f, alpha, a, kappa, d_flux, ustar):
    """x-face antidiffusive increments and intermediate states."""
    _, p_dim, q_dim = u.shape
    cst = (1.0 - alpha) / 4.0
    inv2a = 0.5 / a
    inv2k = 0.5 / kappa
    for i in range(p_dim - 1):
        for j in range(q_dim):
            for c in range(4):
                uw = u[c, i, j]
                ue = u[c, i + 1, j]
                fw = f[c, i, j]
                fe = f[c, i + 1, j]
                pw = cst * uw + fw * inv2a - uk[0, c, i, j]
                pe = cst * ue - fe * inv2a - uk[1, c, i + 1, j]
                d_flux[c, i, j] = a * (pw - pe)
                ustar[c, i, j] = 0.5 * (uw + ue) - (fe - fw) * inv2k


@njit(cache=True)
def k_faces_y(u, uk, g, alpha, a, kappa, d_flux, ustar):
    """y-face antidiffusive increments and intermediate states."""
    _, p_dim, q_dim = u.shape
    cst = (1.0 - alpha) / 4.0
    inv2a = 0.5 / a
    inv2k = 0.5 / kappa
    for i in range(p_dim):
        for j in range(q_dim - 1):
            for c in range(4):
                us = u[c, i, j]
                un = u[c, i, j + 1]
                gs = g[c, i, j]
                gn = g[c, i, j + 1]
                ps = cst * us + gs * inv2a - uk[2, c, i, j]
                pn = cst * un - gn * inv2a - uk[3, c, i, j + 1]
                d_flux[c, i, j] = a * (ps - pn)
                ustar[c, i, j] = 0.5 * (us + un) - (gn - gs) * inv2k


@njit(cache=True)
def k_bounds(rho, rsx, rsy, relax_lo, relax_hi, relaxed, mu, nu):
    """Five-candidate local density extrema on all cells but the outer ring."""
    p_dim, q_dim = rho.shape
    for i in range(1, p_dim - 1):
        for j in range(1, q_dim - 1):
            lo = rho[i, j]
            hi = lo
            for cand in (rsx[i - 1, j], rsx[i, j], rsy[i, j - 1], rsy[i, j]):
                if cand < lo:
                    lo = cand
                if cand > hi:
                    hi = cand
            if relaxed:
                lo *= relax_lo
                hi *= relax_hi
            mu[i, j] = lo
            nu[i, j] = hi


@njit(cache=True)
def _theta_face(kind, use_pressure, kappa, eps, rs, inc,
                mu_up, nu_up, mu_dn, nu_dn, us0, us1, us2, us3,
                d0, d1, d2, d3):
    """Blending parameter for one face: min(1, theta_rho, theta_p)."""
    # density cap
    if inc == 0.0:
        tr = 1.0
    else:
        if kind == 0:  # positivity only: sentinel bounds (0, +inf)
            head = rs
        elif inc > 0.0:
            head = min(nu_dn - rs, rs - mu_up)
        else:
            head = min(rs - mu_dn, nu_up - rs)
        if head < 0.0:
            head = 0.0
        tr = kappa * head / abs(inc)
        if kind == 0:
            tr = max(tr - eps, 0.0)
    theta = tr if tr < 1.0 else 1.0

    if use_pressure and theta > 0.0:
        g0 = us1 * us1 + us2 * us2 - 2.0 * us0 * us3
        g1 = 2.0 * (d0 * us3 + d3 * us0 - d1 * us1 - d2 * us2)
        q = d1 * d1 + d2 * d2 - 2.0 * d0 * d3
        disc = g1 * g1 - 4.0 * g0 * q
        if disc < 0.0:
            disc = 0.0
        r1 = abs(d0) / us0
        r2 = (abs(g1) + np.sqrt(disc)) / (-2.0 * g0)
        radius = r1 if r1 > r2 else r2
        if radius > 0.0:
            tp = kappa / radius - eps
            if tp < 0.0:
                tp = 0.0
            if tp < theta:
                theta = tp
    return theta


@njit(cache=True)
def k_theta_x(d_flux, ustar, mu, nu, kind, use_pressure, kappa, eps, ghost,
              nx, ny, out):
    for ii in range(nx + 1):
        fi = ghost - 1 + ii
        for jj in range(ny):
            j = ghost + jj
            out[ii, jj] = _theta_face(
                kind, use_pressure, kappa, eps,
                ustar[0, fi, j], d_flux[0, fi, j],
                mu[fi, j], nu[fi, j], mu[fi + 1, j], nu[fi + 1, j],
                ustar[0, fi, j], ustar[1, fi, j], ustar[2, fi, j], ustar[3, fi, j],
                d_flux[0, fi, j], d_flux[1, fi, j], d_flux[2, fi, j], d_flux[3, fi, j],
            )


@njit(cache=True)
def k_theta_y(d_flux, ustar, mu, nu, kind, use_pressure, kappa, eps, ghost,
              nx, ny, out):
    for ii in range(nx):
        i = ghost + ii
        for jj in range(ny + 1):
            fj = ghost - 1 + jj
            out[ii, jj] = _theta_face(
                kind, use_pressure, kappa, eps,
                ustar[0, i, fj], d_flux[0, i, fj],
                mu[i, fj], nu[i, fj], mu[i, fj + 1], nu[i, fj + 1],
                ustar[0, i, fj], ustar[1, i, fj], ustar[2, i, fj], ustar[3, i, fj],
                d_flux[0, i, fj], d_flux[1, i, fj], d_flux[2, i, fj], d_flux[3, i, fj],
            )


@njit(cache=True)
def k_update(u, uk, f, g, tx, ty, alpha, a, ghost, nx, ny, new_u, new_uk):
    """Blended collide-and-stream update of the interior."""
    cst = (1.0 - alpha) / 4.0
    inv2a = 0.5 / a
    for ii in range(nx):
        i = ghost + ii
        for jj in range(ny):
            j = ghost + jj
            tw = tx[ii, jj]
            te = tx[ii + 1, jj]
            ts = ty[ii, jj]
            tn = ty[ii, jj + 1]
            for c in range(4):
                m1u = cst * u[c, i - 1, j] + f[c, i - 1, j] * inv2a
                n1 = m1u + tw * (m1u - uk[0, c, i - 1, j])
                m2u = cst * u[c, i + 1, j] - f[c, i + 1, j] * inv2a
                n2 = m2u + te * (m2u - uk[1, c, i + 1, j])
                m3u = cst * u[c, i, j - 1] + g[c, i, j - 1] * inv2a
                n3 = m3u + ts * (m3u - uk[2, c, i, j - 1])
                m4u = cst * u[c, i, j + 1] - g[c, i, j + 1] * inv2a
                n4 = m4u + tn * (m4u - uk[3, c, i, j + 1])
                new_uk[0, c, i, j] = n1
                new_uk[1, c, i, j] = n2
                new_uk[2, c, i, j] = n3
                new_uk[3, c, i, j] = n4
                uc = u[c, i, j]
                fc = f[c, i, j] * inv2a
                gc = g[c, i, j] * inv2a
                cuc = cst * uc
                p1 = cuc + fc - uk[0, c, i, j]
                p2 = cuc - fc - uk[1, c, i, j]
                p3 = cuc + gc - uk[2, c, i, j]
                p4 = cuc - gc - uk[3, c, i, j]
                new_u[c, i, j] = (((n1 + n2) + n3) + n4) + alpha * uc - (
                    (tw * p2 + te * p1) + ts * p4 + tn * p3
                )


_KIND_CODE = {"pp": 0, "lmp": 1, "rlmp": 2}

# reusable scratch arrays keyed by (name, shape): large blocks would
# otherwise be mmap'd fresh (and page-faulted) every step.  Per-process
# serial use only; mesh-parallel studies fork separate processes.
_SCRATCH = {}


def _scratch(name, shape):
    key = (name, shape)
    buf = _SCRATCH.get(key)
    if buf is None:
        buf = np.empty(shape)
        _SCRATCH[key] = buf
    return buf


def fused_step(fld, grid, limiter_cfg, plan, ctx, model, gas, out=None):
    """Faces, thetas and blended update via the fused kernels.

    Ghosts must already be filled.  Writes into ``out`` when given (its
    previous contents are discarded); returns (new field, theta).
    """
    from .mesh import DistributionField, ThetaField
    from .limiting import _apply_sponge

    g_w = grid.ghost
    shape = grid.shape_padded
    u, uk = fld.u, fld.uk
    f = _scratch("f", (4,) + shape)
    g = _scratch("g", (4,) + shape)
    k_fluxes(u, gas.gamma, f, g)

    kind_name = limiter_cfg.density_kind
    if kind_name == "first_order":
        theta = ThetaField.constant(grid, 0.0)
    elif kind_name == "none":
        theta = _apply_sponge(ThetaField.constant(grid, 1.0), grid, plan)
    else:
        dfx = _scratch("dfx", (4, shape[0] - 1, shape[1]))
        usx = _scratch("usx", (4, shape[0] - 1, shape[1]))
        dfy = _scratch("dfy", (4, shape[0], shape[1] - 1))
        usy = _scratch("usy", (4, shape[0], shape[1] - 1))
        k_faces_x(u, uk, f, model.alpha, ctx.a, ctx.kappa, dfx, usx)
        k_faces_y(u, uk, g, model.alpha, ctx.a, ctx.kappa, dfy, usy)

        kind = _KIND_CODE[kind_name]
        mu = _scratch("mu", shape)
        nu = _scratch("nu", shape)
        if kind != 0:
            k_bounds(u[0], usx[0], usy[0], limiter_cfg.relax_lo,
                     limiter_cfg.relax_hi, kind == 2, mu, nu)
        tx = np.empty((grid.nx + 1, grid.ny))
        ty = np.empty((grid.nx, grid.ny + 1))
        k_theta_x(dfx, usx, mu, nu, kind, limiter_cfg.pressure_on, ctx.kappa,
                  limiter_cfg.eps, g_w, grid.nx, grid.ny, tx)
        k_theta_y(dfy, usy, mu, nu, kind, limiter_cfg.pressure_on, ctx.kappa,
                  limiter_cfg.eps, g_w, grid.nx, grid.ny, ty)
        theta = _apply_sponge(ThetaField(tx, ty), grid, plan)

    new = out if out is not None else DistributionField.empty(grid)
    k_update(u, uk, f, g, theta.theta_x, theta.theta_y, model.alpha, ctx.a,
             g_w, grid.nx, grid.ny, new.u, new.uk)
    return new, theta


def field_stats(fld, grid, gas, use_numba=None):
    """(max wave speed, min rho, min p, bad cells) over the interior."""
    if use_numba is None:
        use_numba = accel_mode() == "numba"
    if use_numba:
        return k_stats(fld.u, gas.gamma, grid.ghost)

    u = fld.interior(grid)
    rho = u[0]
    v1 = u[1] / rho
    v2 = u[2] / rho
    p = (gas.gamma - 1.0) * (u[3] - 0.5 * rho * (v1 * v1 + v2 * v2))
    good = (rho > 0.0) & (p > 0.0)
    n_bad = int(rho.size - np.count_nonzero(good))
    if n_bad:
        return 0.0, float(rho.min()), float(p.min()), n_bad
    lam = float(np.max(np.sqrt(v1 * v1 + v2 * v2) + np.sqrt(gas.gamma * p / rho)))
    return lam, float(rho.min()), float(p.min()), n_bad
