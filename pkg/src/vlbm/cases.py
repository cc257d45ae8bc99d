"""Benchmark case definitions, exact reference solutions and error norms.

One-dimensional problems run as two-dimensional strips: 4 cells and
periodicity in y, with v2 = 0.  Initial conditions are primitive-state
functions of cell-center coordinates (and the cell size, which only the
energy-spike case uses).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import euler
from .euler import GasModel
from .mesh import (
    BoundaryPlan, Dirichlet, Grid, Periodic, ReflectiveWall, ZeroGradient,
    periodic_pair,
)

SQRT3 = np.sqrt(3.0)


@dataclass(frozen=True)
class ErrorReport:
    """Discrete density-error norms on one mesh."""

    dx: float
    l1: float
    l2: float
    linf: float


@dataclass(frozen=True)
class CaseSpec:
    name: str
    xlim: tuple
    gamma: float
    initial: callable  # (x, y, dx) -> primitive (4, ...) array
    plan: BoundaryPlan
    t_final: float
    default_nx: int
    default_limiter: str = "rlmp"
    ylim: tuple | None = None  # None: 1D strip (4 periodic cells in y)
    fixed_a: float | None = None
    exact_primitive: callable | None = None  # (x, y, t) -> primitive array
    center_cell_at_origin: bool = False
    notes: str = ""

    @property
    def is_1d(self):
        return self.ylim is None

    def gas(self):
        return GasModel(self.gamma)


def build_grid(case, nx=None, ny=None):
    """Grid for a case at the requested resolution.

    1D strips always get 4 cells in y.  For the energy-spike case the grid
    is shifted half a cell when nx is even so one cell center lands exactly
    on the origin.
    """
    nx = case.default_nx if nx is None else nx
    x0, x1 = case.xlim
    dx = (x1 - x0) / nx
    if case.is_1d:
        ny = 4
        y0 = 0.0
    else:
        y0, y1 = case.ylim
        if ny is None:
            ny = int(round((y1 - y0) / dx))
        if abs(ny * dx - (y1 - y0)) > 1e-9 * (y1 - y0):
            raise ValueError(
                f"cells must be square: {nx} x {ny} does not tile "
                f"{case.xlim} x {case.ylim}"
            )
    if case.center_cell_at_origin and nx % 2 == 0:
        x0 -= 0.5 * dx
        y0 -= 0.5 * dx
    return Grid(nx=nx, ny=ny, dx=dx, x0=x0, y0=y0)


def initial_conserved(case, grid):
    """Initial conserved field on the full padded grid."""
    x, y = grid.center_mesh(padded=True)
    shape = grid.shape_padded
    w = case.initial(np.broadcast_to(x, shape), np.broadcast_to(y, shape), grid.dx)
    return euler.to_conserved(w, case.gas())


# ---------------------------------------------------------------------------
# exact reference solutions


def exact_entropy_wave(x, y, t):
    """Translated sinusoidal density wave, velocity (1,1), unit pressure."""
    rho = 1.0 + 0.1 * np.sin(2.0 * np.pi * (x + y - 2.0 * t))
    one = np.ones_like(rho)
    return np.stack([rho, one, one.copy(), one.copy()])


def riemann_star_state(left, right, gamma, tol=1e-12, max_iter=200):
    """Star pressure and velocity of the 1D Riemann problem.

    left/right are (rho, v, p) triples.  Newton iteration on the pressure
    function, two-rarefaction initial guess, positivity-safeguarded; handles
    very strong jumps (density ratios of 1e3 and beyond).
    """
    rho_l, v_l, p_l = left
    rho_r, v_r, p_r = right
    if min(rho_l, rho_r) <= 0.0 or min(p_l, p_r) <= 0.0:
        raise ValueError("Riemann states must be admissible")
    c_l = np.sqrt(gamma * p_l / rho_l)
    c_r = np.sqrt(gamma * p_r / rho_r)
    if 2.0 * (c_l + c_r) / (gamma - 1.0) <= v_r - v_l:
        raise ValueError("initial states generate vacuum")

    gm1, gp1 = gamma - 1.0, gamma + 1.0

    def side(p, rho_k, p_k, c_k):
        """Pressure function and derivative for one side."""
        if p > p_k:  # shock
            a_k = 2.0 / (gp1 * rho_k)
            b_k = gm1 / gp1 * p_k
            root = np.sqrt(a_k / (p + b_k))
            f = (p - p_k) * root
            df = root * (1.0 - 0.5 * (p - p_k) / (p + b_k))
        else:  # rarefaction
            f = 2.0 * c_k / gm1 * ((p / p_k) ** (gm1 / (2.0 * gamma)) - 1.0)
            df = (p / p_k) ** (-gp1 / (2.0 * gamma)) / (rho_k * c_k)
        return f, df

    # two-rarefaction guess is exact in the double-rarefaction limit and a
    # safe positive start elsewhere
    z = gm1 / (2.0 * gamma)
    p = ((c_l + c_r - 0.5 * gm1 * (v_r - v_l)) / (c_l / p_l**z + c_r / p_r**z)) ** (1.0 / z)
    p = max(p, 1e-300)
    for _ in range(max_iter):
        f_l, df_l = side(p, rho_l, p_l, c_l)
        f_r, df_r = side(p, rho_r, p_r, c_r)
        g = f_l + f_r + (v_r - v_l)
        step = g / (df_l + df_r)
        p_new = p - step
        if p_new <= 0.0:
            p_new = 0.5 * p
        if abs(p_new - p) <= tol * p_new:
            p = p_new
            break
        p = p_new
    else:
        raise RuntimeError("star-pressure Newton iteration did not converge")
    f_l, _ = side(p, rho_l, p_l, c_l)
    f_r, _ = side(p, rho_r, p_r, c_r)
    v = 0.5 * (v_l + v_r) + 0.5 * (f_r - f_l)
    return p, v


def exact_riemann_1d(left, right, gamma, xi):
    """Sample the exact Riemann solution at similarity coordinates xi = x/t.

    left/right are (rho, v, p) triples; returns (rho, v, p) arrays.
    """
    xi = np.asarray(xi, dtype=float)
    p_star, v_star = riemann_star_state(left, right, gamma)
    gm1, gp1 = gamma - 1.0, gamma + 1.0

    rho = np.empty_like(xi)
    vel = np.empty_like(xi)
    prs = np.empty_like(xi)

    def fill(mask, r, v, p):
        rho[mask] = r
        vel[mask] = v
        prs[mask] = p

    rho_l, v_l, p_l = left
    rho_r, v_r, p_r = right
    c_l = np.sqrt(gamma * p_l / rho_l)
    c_r = np.sqrt(gamma * p_r / rho_r)

    left_of_contact = xi <= v_star
    # left wave
    if p_star > p_l:  # left shock
        s_l = v_l - c_l * np.sqrt(gp1 / (2 * gamma) * p_star / p_l + gm1 / (2 * gamma))
        rho_star_l = rho_l * ((p_star / p_l + gm1 / gp1) / (gm1 / gp1 * p_star / p_l + 1.0))
        m = left_of_contact & (xi <= s_l)
        fill(m, rho_l, v_l, p_l)
        m = left_of_contact & (xi > s_l)
        fill(m, rho_star_l, v_star, p_star)
    else:  # left rarefaction
        c_star_l = c_l * (p_star / p_l) ** (gm1 / (2 * gamma))
        head, tail = v_l - c_l, v_star - c_star_l
        m = left_of_contact & (xi <= head)
        fill(m, rho_l, v_l, p_l)
        m = left_of_contact & (xi > tail)
        fill(m, rho_l * (p_star / p_l) ** (1 / gamma), v_star, p_star)
        m = left_of_contact & (xi > head) & (xi <= tail)
        if np.any(m):
            c_fan = (2.0 * c_l + gm1 * (v_l - xi[m])) / gp1
            vel[m] = xi[m] + c_fan
            rho[m] = rho_l * (c_fan / c_l) ** (2.0 / gm1)
            prs[m] = p_l * (c_fan / c_l) ** (2.0 * gamma / gm1)

    right_of_contact = ~left_of_contact
    if p_star > p_r:  # right shock
        s_r = v_r + c_r * np.sqrt(gp1 / (2 * gamma) * p_star / p_r + gm1 / (2 * gamma))
        rho_star_r = rho_r * ((p_star / p_r + gm1 / gp1) / (gm1 / gp1 * p_star / p_r + 1.0))
        m = right_of_contact & (xi >= s_r)
        fill(m, rho_r, v_r, p_r)
        m = right_of_contact & (xi < s_r)
        fill(m, rho_star_r, v_star, p_star)
    else:  # right rarefaction
        c_star_r = c_r * (p_star / p_r) ** (gm1 / (2 * gamma))
        head, tail = v_r + c_r, v_star + c_star_r
        m = right_of_contact & (xi >= head)
        fill(m, rho_r, v_r, p_r)
        m = right_of_contact & (xi < tail)
        fill(m, rho_r * (p_star / p_r) ** (1 / gamma), v_star, p_star)
        m = right_of_contact & (xi < head) & (xi >= tail)
        if np.any(m):
            c_fan = (2.0 * c_r - gm1 * (v_r - xi[m])) / gp1
            vel[m] = xi[m] - c_fan
            rho[m] = rho_r * (c_fan / c_r) ** (2.0 / gm1)
            prs[m] = p_r * (c_fan / c_r) ** (2.0 * gamma / gm1)

    return rho, vel, prs


def isentropic_shock_time(amp):
    """First characteristic-crossing time of the gamma=3 isentropic wave."""
    return 1.0 / (SQRT3 * amp * np.pi)


def exact_isentropic_wave(x, t, amp=0.9999995, gamma=3.0, tol=1e-12):
    """Smooth gamma=3 isentropic wave by the method of characteristics.

    Both Riemann invariants v +- c equal their own characteristic speed, so
    each one self-advects; per point a Newton solve finds the characteristic
    foot.  Valid strictly before the crossing time.  Returns (rho, v, p).
    """
    if gamma != 3.0:
        raise ValueError("the two-invariant construction requires gamma = 3")
    if t >= isentropic_shock_time(amp) * (1.0 - 1e-9):
        raise ValueError("requested time is at or past characteristic crossing")
    x = np.asarray(x, dtype=float)

    def invariant0(xi, sign):
        return sign * SQRT3 * (1.0 + amp * np.sin(np.pi * xi))

    def invariant0_prime(xi, sign):
        return sign * SQRT3 * amp * np.pi * np.cos(np.pi * xi)

    def foot(sign):
        xi = x.copy()
        for _ in range(100):
            g = xi + invariant0(xi, sign) * t - x
            dg = 1.0 + invariant0_prime(xi, sign) * t
            step = g / dg
            xi = xi - step
            if np.max(np.abs(step)) <= tol:
                break
        else:
            raise RuntimeError("characteristic foot iteration did not converge")
        return invariant0(xi, sign)

    w_plus = foot(1.0)
    w_minus = foot(-1.0)
    v = 0.5 * (w_plus + w_minus)
    c = 0.5 * (w_plus - w_minus)
    rho = c / SQRT3
    return rho, v, rho**3


# ---------------------------------------------------------------------------
# case catalog


def _primitive_where(cond, w_true, w_false):
    """Select between two primitive 4-tuples on a boolean array."""
    cond = np.asarray(cond)
    return np.stack([np.where(cond, a, b) for a, b in zip(w_true, w_false)])


def _entropy_wave_case():
    def init(x, y, dx):
        return exact_entropy_wave(x, y, 0.0)

    return CaseSpec(
        name="entropy_wave",
        xlim=(0.0, 1.0),
        ylim=(0.0, 1.0),
        gamma=1.4,
        initial=init,
        plan=periodic_pair(),
        t_final=1.0,
        default_nx=20,
        default_limiter="pp",
        fixed_a=10.7,
        exact_primitive=exact_entropy_wave,
        notes="fixed kinetic speed keeps t=1 an exact multiple of dt",
    )


SOD_LEFT = (1.0, 0.0, 1.0)
SOD_RIGHT = (0.125, 0.0, 0.1)


def _riemann_case_exact(left, right, gamma, x_jump):
    def exact(x, y, t):
        x = np.asarray(x, dtype=float)
        if t == 0.0:
            ahead = x >= x_jump
            rho = np.where(ahead, right[0], left[0])
            v = np.where(ahead, right[1], left[1])
            p = np.where(ahead, right[2], left[2])
        else:
            rho, v, p = exact_riemann_1d(left, right, gamma, (x - x_jump) / t)
        return np.stack([rho, v, np.zeros_like(rho), p])

    return exact


def _sod_case():
    def init(x, y, dx):
        return _primitive_where(
            x < 0.5, (SOD_LEFT[0], 0.0, 0.0, SOD_LEFT[2]),
            (SOD_RIGHT[0], 0.0, 0.0, SOD_RIGHT[2]),
        )

    plan = BoundaryPlan(
        left=ZeroGradient(), right=ZeroGradient(),
        bottom=Periodic(), top=Periodic(),
        sponge={"left": 5, "right": 5},
    )
    return CaseSpec(
        name="sod",
        xlim=(0.0, 1.0),
        gamma=1.4,
        initial=init,
        plan=plan,
        t_final=0.2,
        default_nx=100,
        exact_primitive=_riemann_case_exact(SOD_LEFT, SOD_RIGHT, 1.4, 0.5),
        notes="canonical two-state tube; 5-cell sponges damp end reflections",
    )


SHU_OSHER_LEFT = (3.857143, 2.629369, 10.33333333333)


def _shu_osher_case():
    def init(x, y, dx):
        rho = np.where(x < -4.0, SHU_OSHER_LEFT[0], 1.0 + 0.2 * np.sin(5.0 * x))
        v1 = np.where(x < -4.0, SHU_OSHER_LEFT[1], 0.0)
        p = np.where(x < -4.0, SHU_OSHER_LEFT[2], 1.0)
        return np.stack([rho, v1, np.zeros_like(rho), p])

    plan = BoundaryPlan(
        left=ZeroGradient(), right=ZeroGradient(),
        bottom=Periodic(), top=Periodic(),
    )
    return CaseSpec(
        name="shu_osher",
        xlim=(-5.0, 5.0),
        gamma=1.4,
        initial=init,
        plan=plan,
        t_final=1.8,
        default_nx=800,
    )


ISENTROPIC_AMP = 0.9999995


def _isentropic_case():
    def init(x, y, dx):
        rho = 1.0 + ISENTROPIC_AMP * np.sin(np.pi * x)
        return np.stack([rho, np.zeros_like(rho), np.zeros_like(rho), rho**3])

    def exact(x, y, t):
        rho, v, p = exact_isentropic_wave(x, t, ISENTROPIC_AMP)
        return np.stack([rho, v, np.zeros_like(rho), p])

    return CaseSpec(
        name="isentropic_vacuum",
        xlim=(-1.0, 1.0),
        gamma=3.0,
        initial=init,
        plan=periodic_pair(),
        t_final=0.1,
        default_nx=50,
        default_limiter="pp",
        exact_primitive=exact,
        notes="density and pressure graze zero; demands positivity preservation",
    )


def _leblanc_case():
    gamma = 5.0 / 3.0
    left = (1.0, 0.0, 0.1 * (gamma - 1.0))
    right = (1.0e-3, 0.0, 1.0e-7 * (gamma - 1.0))

    def init(x, y, dx):
        return _primitive_where(
            x <= 3.0, (left[0], 0.0, 0.0, left[2]), (right[0], 0.0, 0.0, right[2])
        )

    plan = BoundaryPlan(
        left=ZeroGradient(), right=ZeroGradient(),
        bottom=Periodic(), top=Periodic(),
    )
    return CaseSpec(
        name="leblanc",
        xlim=(0.0, 9.0),
        gamma=gamma,
        initial=init,
        plan=plan,
        t_final=6.0,
        default_nx=1000,
        exact_primitive=_riemann_case_exact(left, right, gamma, 3.0),
        notes="extreme tube: 1e3 density and 1e6 pressure ratios",
    )


SEDOV_TOTAL_ENERGY = 0.979264


def _sedov_case():
    gamma = 1.4

    def init(x, y, dx):
        e_min = 1.0e-12
        e_max = SEDOV_TOTAL_ENERGY / dx**2
        spike = (np.abs(x) < 0.499 * dx) & (np.abs(y) < 0.499 * dx)
        e = np.where(spike, e_max, e_min)
        rho = np.ones_like(e)
        zero = np.zeros_like(e)
        return np.stack([rho, zero, zero.copy(), (gamma - 1.0) * e])

    plan = BoundaryPlan(
        left=ZeroGradient(), right=ZeroGradient(),
        bottom=ZeroGradient(), top=ZeroGradient(),
    )
    return CaseSpec(
        name="sedov",
        xlim=(-1.1, 1.1),
        ylim=(-1.1, 1.1),
        gamma=gamma,
        initial=init,
        plan=plan,
        t_final=1.0,
        default_nx=200,
        center_cell_at_origin=True,
        notes="point blast: all energy in the origin cell, shock radius 1 at t=1",
    )


RIEMANN2D_STATES = {
    "sw": (0.138, 1.206, 1.206, 0.029),
    "nw": (0.5323, 1.206, 0.0, 0.3),
    "se": (0.5323, 0.0, 1.206, 0.3),
    "ne": (1.5, 0.0, 0.0, 1.5),
}


def _riemann2d_case():
    def init(x, y, dx):
        west = x <= 0.8
        south = y <= 0.8
        comps = []
        for c in range(4):
            val = np.where(
                west & south, RIEMANN2D_STATES["sw"][c],
                np.where(
                    west & ~south, RIEMANN2D_STATES["nw"][c],
                    np.where(~west & south, RIEMANN2D_STATES["se"][c],
                             RIEMANN2D_STATES["ne"][c]),
                ),
            )
            comps.append(val)
        return np.stack(comps)

    plan = BoundaryPlan(
        left=ZeroGradient(), right=ZeroGradient(),
        bottom=ZeroGradient(), top=ZeroGradient(),
    )
    return CaseSpec(
        name="riemann2d_cfg3",
        xlim=(0.0, 1.0),
        ylim=(0.0, 1.0),
        gamma=1.4,
        initial=init,
        plan=plan,
        t_final=0.8,
        default_nx=400,
    )


DMR_POST = (8.0, 8.25 * np.cos(np.pi / 6.0), -8.25 * np.sin(np.pi / 6.0), 116.5)
DMR_PRE = (1.4, 0.0, 0.0, 1.0)


def dmr_primitive(x, y, t):
    """Oblique Mach-10 shock state: pre-shock ahead of x = 1/6 + (y+20t)/sqrt(3)."""
    ahead = x >= 1.0 / 6.0 + (y + 20.0 * t) / SQRT3
    return _primitive_where(ahead, DMR_PRE, DMR_POST)


def _dmr_case():
    gas = GasModel(1.4)

    def state(x, y, t):
        return euler.to_conserved(dmr_primitive(x, y, t), gas)

    plan = BoundaryPlan(
        left=Dirichlet(state),
        right=Dirichlet(state),
        bottom=ReflectiveWall(dirichlet_before_x=1.0 / 6.0, state=state),
        top=Dirichlet(state),
    )
    return CaseSpec(
        name="dmr",
        xlim=(0.0, 3.0),
        ylim=(0.0, 1.0),
        gamma=1.4,
        initial=lambda x, y, dx: dmr_primitive(x, y, 0.0),
        plan=plan,
        t_final=0.2,
        default_nx=1500,
        notes="wall starts at x=1/6; upstream of it the bottom side is inflow",
    )


JET_AMBIENT = (0.5, 0.0, 0.0, 0.4127)


def _jet_case(name, inflow_v1, xlim, ylim, t_final):
    gamma = 5.0 / 3.0
    gas = GasModel(gamma)
    inflow = (5.0, inflow_v1, 0.0, 0.4127)

    def inflow_primitive(x, y, t):
        return _primitive_where(np.abs(y) < 0.05, inflow, JET_AMBIENT)

    def state(x, y, t):
        return euler.to_conserved(inflow_primitive(x, y, t), gas)

    def init(x, y, dx):
        rho = np.full(np.shape(x), JET_AMBIENT[0])
        zero = np.zeros_like(rho)
        return np.stack([rho, zero, zero.copy(), np.full_like(rho, JET_AMBIENT[3])])

    plan = BoundaryPlan(
        left=Dirichlet(state),
        right=ZeroGradient(),
        bottom=ZeroGradient(),
        top=ZeroGradient(),
    )
    return CaseSpec(
        name=name,
        xlim=xlim,
        ylim=ylim,
        gamma=gamma,
        initial=init,
        plan=plan,
        t_final=t_final,
        default_nx=800,
        notes="slot inflow on the left side where |y| < 0.05",
    )


def builtin_cases():
    """All benchmark configurations, keyed by their stable names."""
    cases = [
        _entropy_wave_case(),
        _sod_case(),
        _shu_osher_case(),
        _isentropic_case(),
        _leblanc_case(),
        _sedov_case(),
        _riemann2d_case(),
        _dmr_case(),
        _jet_case("jet_m80", 30.0, (0.0, 2.0), (-0.5, 0.5), 0.07),
        _jet_case("jet_m2000", 800.0, (0.0, 1.0), (-0.25, 0.25), 0.001),
    ]
    return {c.name: c for c in cases}


def get_case(name):
    cases = builtin_cases()
    if name not in cases:
        known = ", ".join(sorted(cases))
        raise KeyError(f"unknown case {name!r}; known cases: {known}")
    return cases[name]


# ---------------------------------------------------------------------------
# error norms and convergence rates


def error_norms(rho_num, exact_primitive, grid, t):
    """Relative discrete L1/L2/Linf norms of the density error.

    The exact solution is sampled at cell centers; each norm of the error is
    divided by the same norm of the exact density, matching the convention
    of the reference convergence tables.
    """
    x, y = grid.center_mesh(padded=False)
    shape = (grid.nx, grid.ny)
    exact_rho = exact_primitive(
        np.broadcast_to(x, shape), np.broadcast_to(y, shape), t
    )[euler.RHO]
    err = np.abs(np.asarray(rho_num) - exact_rho)
    ref = np.abs(exact_rho)
    vol = grid.dx * grid.dx
    return ErrorReport(
        dx=grid.dx,
        l1=float(vol * err.sum()) / float(vol * ref.sum()),
        l2=float(np.sqrt(vol * (err**2).sum())) / float(np.sqrt(vol * (ref**2).sum())),
        linf=float(err.max()) / float(ref.max()),
    )


def convergence_rates(reports):
    """log2 error ratios between successive mesh halvings."""
    if len(reports) < 2:
        raise ValueError("need at least two reports")
    rates = []
    for coarse, fine in zip(reports[:-1], reports[1:]):
        if abs(coarse.dx / fine.dx - 2.0) > 1e-9:
            raise ValueError("reports must halve dx between entries")
        rates.append(
            {
                "l1": np.log2(coarse.l1 / fine.l1),
                "l2": np.log2(coarse.l2 / fine.l2),
                "linf": np.log2(coarse.linf / fine.linf),
            }
        )
    return rates
