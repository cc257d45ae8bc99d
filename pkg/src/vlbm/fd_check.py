"""Multi-step finite-difference oracle for the second-order kinetic scheme.

Eliminating the kinetic degrees of freedom turns the five-wave second-order
scheme (at constant kinetic speed, on a periodic grid) into a five-level
recurrence on the conserved variables alone.  Evaluating that recurrence on
recorded moment histories gives a machine-precision certificate that a
trajectory really was produced by the second-order scheme; first-order
trajectories fail it by many orders of magnitude.
"""

import numpy as np

from . import euler

# moment matrix mapping distributions (u1..u5) to
# (sum, u1-u2, u3-u4, u1+u2, u3+u4), and its exact inverse
MOMENT_MATRIX = np.array(
    [
        [1.0, 1.0, 1.0, 1.0, 1.0],
        [1.0, -1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, -1.0, 0.0],
        [1.0, 1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 1.0, 0.0],
    ]
)
MOMENT_MATRIX_INV = np.array(
    [
        [0.0, 0.5, 0.0, 0.5, 0.0],
        [0.0, -0.5, 0.0, 0.5, 0.0],
        [0.0, 0.0, 0.5, 0.0, 0.5],
        [0.0, 0.0, -0.5, 0.0, 0.5],
        [1.0, 0.0, 0.0, -1.0, -1.0],
    ]
)


def equilibrium_moments(u, a, alpha, gas):
    """Moments of the equilibria: [u, f/a, g/a, (1-alpha)u/2, (1-alpha)u/2]."""
    f = euler.flux_x(u, gas)
    g = euler.flux_y(u, gas)
    half = 0.5 * (1.0 - alpha) * np.asarray(u, dtype=float)
    return [np.asarray(u, dtype=float), f / a, g / a, half, half.copy()]


# periodic shifts on (..., nx, ny) arrays; xp(u)[i,j] = u[i+1,j]
def xp(u):
    return np.roll(u, -1, axis=-2)


def xm(u):
    return np.roll(u, 1, axis=-2)


def yp(u):
    return np.roll(u, -1, axis=-1)


def ym(u):
    return np.roll(u, 1, axis=-1)


def axis_average(u):
    """Average of the four axis neighbors."""
    return 0.25 * (xp(u) + xm(u) + yp(u) + ym(u))


def diag_average(u):
    """Average of the four diagonal neighbors."""
    return 0.25 * (xp(yp(u)) + xp(ym(u)) + xm(yp(u)) + xm(ym(u)))


def dx_central(u):
    return 0.5 * (xp(u) - xm(u))


def dy_central(u):
    return 0.5 * (yp(u) - ym(u))


def dx_wide(u):
    """Central x-difference averaged over the three y-neighbors (thirds)."""
    d = dx_central(u)
    return (ym(d) + d + yp(d)) / 3.0


def dy_wide(u):
    d = dy_central(u)
    return (xm(d) + d + xp(d)) / 3.0


def multistep_residual(history, a_const, alpha, gas):
    """Residual of the five-level conserved-variable recurrence.

    history holds six consecutive interior moment fields of shape
    (4, nx, ny) produced on a fully periodic grid with constant kinetic
    speed.  Vanishes (to roundoff) on second-order trajectories.
    """
    if len(history) != 6:
        raise ValueError("need six consecutive fields")
    h = [np.asarray(x, dtype=float) for x in history]
    if h[0].shape[-2] < 5 or h[0].shape[-1] < 5:
        raise ValueError("grid must be at least 5x5 for the stencils to wrap distinctly")

    d41 = h[4] - h[1]
    d32 = h[3] - h[2]
    res = h[5] + (4.0 * axis_average(d41) - d41) - h[0]
    res += 4.0 * diag_average(d32) - 4.0 * axis_average(d32) + 2.0 * d32

    fluxes_x = [euler.flux_x(h[k], gas) for k in (1, 2, 3, 4)]
    fluxes_y = [euler.flux_y(h[k], gas) for k in (1, 2, 3, 4)]
    res += (2.0 / a_const) * (
        dx_central(fluxes_x[3])
        + 3.0 * dx_wide(fluxes_x[2])
        + 3.0 * dx_wide(fluxes_x[1])
        + dx_central(fluxes_x[0])
    )
    res += (2.0 / a_const) * (
        dy_central(fluxes_y[3])
        + 3.0 * dy_wide(fluxes_y[2])
        + 3.0 * dy_wide(fluxes_y[1])
        + dy_central(fluxes_y[0])
    )
    res += 2.0 * (1.0 - alpha) * (
        (d41 - axis_average(d41))
        + 3.0 * axis_average(d32) - 2.0 * diag_average(d32) - d32
    )
    return res


def _shift_matrices(n):
    """Dense periodic shift matrices on an n x n grid flattened i-major."""
    s = np.roll(np.eye(n), 1, axis=1)  # s @ u gives u[i+1]
    eye = np.eye(n)
    xplus = np.kron(s, eye)
    xminus = np.kron(s.T, eye)
    yplus = np.kron(eye, s)
    yminus = np.kron(eye, s.T)
    return xplus, xminus, yplus, yminus


def build_update_matrix(n):
    """Dense one-step moment update matrix A on an n x n periodic grid.

    Gated to small grids (matrix dimension 5 n^2); larger sizes should use
    multistep_residual instead.
    """
    if n > 8:
        raise ValueError("dense construction is limited to grids up to 8x8")
    xplus, xminus, yplus, yminus = _shift_matrices(n)
    nn = n * n
    t = np.zeros((5 * nn, 5 * nn))
    for k, blk in enumerate((xminus, xplus, yminus, yplus, np.eye(nn))):
        t[k * nn : (k + 1) * nn, k * nn : (k + 1) * nn] = blk
    q = np.kron(MOMENT_MATRIX, np.eye(nn))
    qinv = np.kron(MOMENT_MATRIX_INV, np.eye(nn))
    return -(q @ t @ qinv)


def characteristic_poly_check(n, tol=1e-12):
    """Verify P(A) = 0 for the dense update matrix on an n x n periodic grid.

    P(z) = (z+1)(z^4 + 4 Aa z^3 + (2 + 4 Ad) z^2 + 4 Aa z + 1) with the
    neighbor-averaging operators substituted as blocks.  Returns True when
    the spectral norm of P(A) is below tol.
    """
    a = build_update_matrix(n)
    nn = n * n
    if n == 1:
        aa_op = np.eye(1)
        ad_op = np.eye(1)
    else:
        xplus, xminus, yplus, yminus = _shift_matrices(n)
        aa_op = 0.25 * (xplus + xminus + yplus + yminus)
        ad_op = 0.25 * (xplus @ yplus + xplus @ yminus + xminus @ yplus + xminus @ yminus)
    aa_blk = np.kron(np.eye(5), aa_op)
    ad_blk = np.kron(np.eye(5), ad_op)
    eye = np.eye(5 * nn)

    a2 = a @ a
    a3 = a2 @ a
    a4 = a3 @ a
    quartic = a4 + 4.0 * aa_blk @ a3 + (2.0 * eye + 4.0 * ad_blk) @ a2 + 4.0 * aa_blk @ a + eye
    p_of_a = (a + eye) @ quartic
    return bool(np.linalg.norm(p_of_a, 2) <= tol)


def first_block_row(n):
    """First block row of A as a dict of named n^2 x n^2 operator blocks."""
    a = build_update_matrix(n)
    nn = n * n
    return {name: a[:nn, k * nn : (k + 1) * nn] for k, name in
            enumerate(["u", "v1", "v2", "w1", "w2"])}
