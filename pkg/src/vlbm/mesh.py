"""Cartesian grid, distribution storage and boundary handling.

Fields live on a ghost-padded square-cell grid.  Storage is structure-of-
arrays: the four moving-wave distributions plus the zeroth moment, each as a
``(4, nx+2g, ny+2g)`` component-first array.  The rest-wave distribution is
never stored; it is reconstructed as ``u - (u1+u2+u3+u4)`` when a scheme
needs it, which lets the blended update work purely on the moments.

Ghost width is 2: the limiter bounds of the first ghost ring need face data
one further ring out.
"""

from dataclasses import dataclass, field as dc_field

import numpy as np

from . import euler, kinetic
from .euler import MY

GHOST = 2


@dataclass(frozen=True)
class Grid:
    """Uniform square-cell grid: nx*ny interior cells plus ghost layers."""

    nx: int
    ny: int
    dx: float
    x0: float = 0.0  # lower-left corner of the physical domain
    y0: float = 0.0
    ghost: int = GHOST

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ValueError("grid needs at least one interior cell per direction")
        if not self.dx > 0.0:
            raise ValueError("dx must be positive")
        if self.ghost < 1:
            raise ValueError("at least one ghost layer is required")

    @property
    def shape_padded(self):
        return (self.nx + 2 * self.ghost, self.ny + 2 * self.ghost)

    @property
    def ix(self):
        """Interior slice along x for padded arrays."""
        return slice(self.ghost, self.ghost + self.nx)

    @property
    def iy(self):
        return slice(self.ghost, self.ghost + self.ny)

    def centers_x(self, padded=False):
        i = np.arange(-self.ghost, self.nx + self.ghost) if padded else np.arange(self.nx)
        return self.x0 + (i + 0.5) * self.dx

    def centers_y(self, padded=False):
        j = np.arange(-self.ghost, self.ny + self.ghost) if padded else np.arange(self.ny)
        return self.y0 + (j + 0.5) * self.dx

    def center_mesh(self, padded=False):
        """Cell-center coordinate arrays, broadcastable to field shape."""
        x = self.centers_x(padded)
        y = self.centers_y(padded)
        return x[:, None], y[None, :]


class DistributionField:
    """Moving-wave distributions plus the zeroth moment on a padded grid.

    uk has shape (4, 4, P, Q): wave index k-1, then state component.  u has
    shape (4, P, Q) and is maintained by the schemes as the authoritative
    zeroth moment.
    """

    __slots__ = ("uk", "u")

    def __init__(self, uk, u):
        self.uk = uk
        self.u = u

    @classmethod
    def empty(cls, grid):
        shape = grid.shape_padded
        return cls(np.empty((4, 4) + shape), np.empty((4,) + shape))

    @classmethod
    def from_waves(cls, u1, u2, u3, u4, u5):
        """Build from five explicit distribution arrays (sum defines the moment)."""
        uk = np.stack([u1, u2, u3, u4])
        u = (((u1 + u2) + u3) + u4) + u5
        return cls(uk, u)

    @property
    def u5(self):
        """Rest-wave distribution, reconstructed from the stored moment."""
        return self.u - (((self.uk[0] + self.uk[1]) + self.uk[2]) + self.uk[3])

    def copy(self):
        return DistributionField(self.uk.copy(), self.u.copy())

    def interior(self, grid):
        """View of the interior moments."""
        return self.u[:, grid.ix, grid.iy]


def moments(fld):
    """Zeroth moment (sum of all five distributions) of a field."""
    return fld.u


class ThetaField:
    """Face-centered blending parameters in [0, 1].

    theta_x has shape (nx+1, ny): entry [i, j] sits on the vertical face
    between interior cells (i-1, j) and (i, j).  theta_y has shape
    (nx, ny+1) with entry [i, j] on the horizontal face below cell (i, j).
    """

    __slots__ = ("theta_x", "theta_y")

    def __init__(self, theta_x, theta_y):
        self.theta_x = theta_x
        self.theta_y = theta_y

    @classmethod
    def constant(cls, grid, value):
        return cls(
            np.full((grid.nx + 1, grid.ny), float(value)),
            np.full((grid.nx, grid.ny + 1), float(value)),
        )

    def min(self):
        return min(self.theta_x.min(), self.theta_y.min())


def init_distributions(u0, model, gas, grid=None):
    """Equilibrium initialization: each wave at its Maxwellian of u0.

    The stored moment is set to u0 itself (the equilibria sum to u0 exactly
    in exact arithmetic).  Rejects inadmissible initial data; the check runs
    on the interior when a grid is given, else everywhere.
    """
    u0 = np.asarray(u0, dtype=float)
    probe = u0[:, grid.ix, grid.iy] if grid is not None else u0
    if not np.all(euler.is_admissible(probe)):
        raise ValueError("initial data leaves the admissible set")
    f = euler.flux_x(u0, gas)
    g = euler.flux_y(u0, gas)
    uk = kinetic.maxwellians_moving(u0, f, g, model)
    return DistributionField(uk, u0.copy())


class Periodic:
    pass


class ZeroGradient:
    pass


@dataclass
class Dirichlet:
    """Ghost cells forced to the equilibria of a prescribed state.

    ``state(x, y, t)`` returns a conserved state array for cell-center
    coordinates; it is re-evaluated (and re-equilibrated) every step.
    """

    state: callable


@dataclass
class ReflectiveWall:
    """Specular wall on a horizontal side (bottom or top).

    Ghost rows mirror interior rows with the normal momentum negated; the
    wall-normal wave pair (k=3,4) is swapped so the reflected kinetic flux
    matches the mirrored state.  ``dirichlet_before_x`` optionally replaces
    the wall by a Dirichlet state for cells with x < x_split (mixed side).
    """

    dirichlet_before_x: float | None = None
    state: callable = None


@dataclass
class BoundaryPlan:
    """Per-side conditions plus optional sponge widths (in cells).

    Sponge layers do not touch ghost data; they force the blending parameter
    to zero near the named sides (see limiting.compute_theta).
    """

    left: object = dc_field(default_factory=ZeroGradient)
    right: object = dc_field(default_factory=ZeroGradient)
    bottom: object = dc_field(default_factory=Periodic)
    top: object = dc_field(default_factory=Periodic)
    sponge: dict = dc_field(default_factory=dict)  # side name -> layer width

    def __post_init__(self):
        for pair in (("left", "right"), ("bottom", "top")):
            kinds = [isinstance(getattr(self, s), Periodic) for s in pair]
            if any(kinds) and not all(kinds):
                raise ValueError(f"periodic sides must come in pairs: {pair}")
        for side, width in self.sponge.items():
            if side not in ("left", "right", "bottom", "top"):
                raise ValueError(f"unknown sponge side {side!r}")
            if width < 0:
                raise ValueError("sponge width must be nonnegative")


def periodic_pair(sponge=None):
    return BoundaryPlan(Periodic(), Periodic(), Periodic(), Periodic(), sponge or {})


def _flip_m2(arr):
    out = arr.copy()
    out[..., MY, :, :] *= -1.0
    return out


def _set_ghost_state(fld, u_b, model, gas, isl, jsl):
    """Write a prescribed conserved state (and its equilibria) into ghosts."""
    f = euler.flux_x(u_b, gas)
    g = euler.flux_y(u_b, gas)
    fld.uk[:, :, isl, jsl] = kinetic.maxwellians_moving(u_b, f, g, model)
    fld.u[:, isl, jsl] = u_b


def boundary_wave_speed(plan, grid, t, gas):
    """Largest wave speed of prescribed (Dirichlet) boundary states at time t.

    Copy-type conditions (periodic, zero-gradient, reflective mirror) carry
    no data beyond the interior, but inflow states do, and the kinetic-speed
    policy must honor them; with a slot jet the inflow speed can exceed
    anything in the interior by orders of magnitude.
    """
    from . import euler as _euler

    xpad, ypad = grid.center_mesh(padded=True)
    speed = 0.0
    for side in ("left", "right", "bottom", "top"):
        cond = getattr(plan, side)
        state = None
        if isinstance(cond, Dirichlet):
            state = cond.state
        elif isinstance(cond, ReflectiveWall) and cond.dirichlet_before_x is not None:
            state = cond.state
        if state is None:
            continue
        if side in ("left", "right"):
            xg = np.full(grid.ny + 2 * grid.ghost, xpad[0 if side == "left" else -1, 0])
            yg = ypad[0]
        else:
            xg = xpad[:, 0]
            yg = np.full(grid.nx + 2 * grid.ghost, ypad[0, 0 if side == "bottom" else -1])
        u_b = state(xg, yg, t)
        speed = max(speed, _euler.max_wave_speed(u_b, gas))
    return speed


def apply_boundaries(fld, plan, grid, t, model, gas):
    """Fill all ghost layers for time t.

    Horizontal sides run first and vertical sides second so that corner
    ghosts pick up consistent data (vertical conditions read whole rows,
    including the freshly filled ghost rows).  Idempotent at fixed t.
    """
    g = grid.ghost
    nx, ny = grid.nx, grid.ny
    xpad, ypad = grid.center_mesh(padded=True)

    def fill_y(side, cond):
        bottom = side == "bottom"
        gsl = slice(0, g) if bottom else slice(ny + g, ny + 2 * g)
        if isinstance(cond, Periodic):
            src = slice(ny, ny + g) if bottom else slice(g, 2 * g)
            fld.uk[:, :, :, gsl] = fld.uk[:, :, :, src]
            fld.u[:, :, gsl] = fld.u[:, :, src]
        elif isinstance(cond, ZeroGradient):
            edge = g if bottom else ny + g - 1
            fld.uk[:, :, :, gsl] = fld.uk[:, :, :, edge : edge + 1]
            fld.u[:, :, gsl] = fld.u[:, :, edge : edge + 1]
        elif isinstance(cond, Dirichlet):
            xg = np.broadcast_to(xpad, (nx + 2 * g, g))
            yg = np.broadcast_to(ypad[:, gsl], (nx + 2 * g, g))
            _set_ghost_state(fld, cond.state(xg, yg, t), model, gas, slice(None), gsl)
        elif isinstance(cond, ReflectiveWall):
            # ghost row r cells mirror the r-th interior row off the wall
            for r in range(g):
                jghost = g - 1 - r if bottom else ny + g + r
                jint = g + r if bottom else ny + g - 1 - r
                u1, u2, u3, u4 = (fld.uk[k, :, :, jint] for k in range(4))
                mirror_uk = np.stack([u1, u2, u4, u3])
                mirror_uk[:, MY, :] *= -1.0
                mirror_u = fld.u[:, :, jint].copy()
                mirror_u[MY] *= -1.0
                if cond.dirichlet_before_x is not None:
                    xrow = xpad[:, 0]
                    yval = np.full_like(xrow, float(ypad[0, jghost]))
                    u_b = cond.state(xrow, yval, t)
                    f = euler.flux_x(u_b, gas)
                    gflx = euler.flux_y(u_b, gas)
                    b_uk = kinetic.maxwellians_moving(u_b, f, gflx, model)
                    patch = xrow < cond.dirichlet_before_x
                    mirror_uk = np.where(patch[None, None, :], b_uk, mirror_uk)
                    mirror_u = np.where(patch[None, :], u_b, mirror_u)
                fld.uk[:, :, :, jghost] = mirror_uk
                fld.u[:, :, jghost] = mirror_u
        else:
            raise TypeError(f"unsupported boundary condition {cond!r}")

    def fill_x(side, cond):
        left = side == "left"
        gsl = slice(0, g) if left else slice(nx + g, nx + 2 * g)
        if isinstance(cond, Periodic):
            src = slice(nx, nx + g) if left else slice(g, 2 * g)
            fld.uk[:, :, gsl, :] = fld.uk[:, :, src, :]
            fld.u[:, gsl, :] = fld.u[:, src, :]
        elif isinstance(cond, ZeroGradient):
            edge = g if left else nx + g - 1
            fld.uk[:, :, gsl, :] = fld.uk[:, :, edge : edge + 1, :]
            fld.u[:, gsl, :] = fld.u[:, edge : edge + 1, :]
        elif isinstance(cond, Dirichlet):
            xg = np.broadcast_to(xpad[gsl], (g, ny + 2 * g))
            yg = np.broadcast_to(ypad, (g, ny + 2 * g))
            _set_ghost_state(fld, cond.state(xg, yg, t), model, gas, gsl, slice(None))
        elif isinstance(cond, ReflectiveWall):
            raise NotImplementedError("reflective walls are supported on bottom/top only")
        else:
            raise TypeError(f"unsupported boundary condition {cond!r}")

    fill_y("bottom", plan.bottom)
    fill_y("top", plan.top)
    fill_x("left", plan.left)
    fill_x("right", plan.right)
