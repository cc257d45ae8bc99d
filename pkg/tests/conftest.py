"""Shared helpers: random admissible states and smooth periodic fields."""

import numpy as np
import pytest

from vlbm import euler, kinetic, mesh
from vlbm.euler import GasModel


def random_admissible_states(rng, n, rho=(0.1, 3.0), v=(-2.0, 2.0), p=(0.05, 5.0)):
    """(4, n) conserved states drawn from admissible primitive ranges."""
    w = np.stack([
        rng.uniform(*rho, n),
        rng.uniform(*v, n),
        rng.uniform(*v, n),
        rng.uniform(*p, n),
    ])
    return euler.to_conserved(w, GasModel(1.4))


def smooth_periodic_field(rng, grid, gas, amp=0.2):
    """Smooth admissible conserved data on the padded grid (periodic)."""
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

    w = np.stack([1.0 + amp * wave(), amp * wave(), amp * wave(), 1.0 + amp * wave()])
    return euler.to_conserved(w, gas)


def random_distribution_field(rng, grid, gas, model):
    """Field with random (non-equilibrium) distributions and admissible moments."""
    u = smooth_periodic_field(rng, grid, gas)
    fld = mesh.init_distributions(u, model, gas, grid)
    # perturb the waves without touching the moments
    shape = (4,) + grid.shape_padded
    for k in range(4):
        noise = 0.02 * rng.standard_normal(shape)
        fld.uk[k] += noise
        fld.u += noise
    return fld


def periodic_model_field(seed, n=16, amp=0.2, alpha=0.5, a=None, gamma=1.4):
    """Convenience: grid, gas, model and an equilibrium field on it."""
    rng = np.random.default_rng(seed)
    grid = mesh.Grid(nx=n, ny=n, dx=1.0 / n)
    gas = GasModel(gamma)
    u0 = smooth_periodic_field(rng, grid, gas, amp)
    lam = euler.max_wave_speed(u0[:, grid.ix, grid.iy], gas)
    model = kinetic.KineticModel(alpha=alpha)
    model.a = a if a is not None else kinetic.kinetic_speed_policy(lam, model)
    fld = mesh.init_distributions(u0, model, gas, grid)
    return grid, gas, model, fld, lam


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
