"""Compressible Euler equations in two dimensions: states, fluxes, admissibility.

State vectors are numpy arrays with the four components on the leading axis,

    conserved u = [rho, m1, m2, E]      (density, momentum, total energy)
    primitive w = [rho, v1, v2, p]      (density, velocity, pressure)

so a single state has shape ``(4,)`` and a field has shape ``(4, nx, ny)``.
All functions broadcast over trailing axes.
"""

from dataclasses import dataclass

import numpy as np

# component indices, shared by conserved and primitive layouts
RHO, MX, MY, EN = 0, 1, 2, 3
V1, V2, PRES = 1, 2, 3


class DegenerateStateError(ValueError):
    """Raised when a state cannot be decoded (zero or negative density)."""


@dataclass(frozen=True)
class GasModel:
    """Ideal gas with constant heat-capacity ratio gamma > 1."""

    gamma: float = 1.4

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")


def conserved(rho, m1, m2, energy):
    """Stack conserved components into a state array."""
    return np.array(np.broadcast_arrays(rho, m1, m2, energy), dtype=float)


def primitive(rho, v1, v2, p):
    """Stack primitive components into a state array."""
    return np.array(np.broadcast_arrays(rho, v1, v2, p), dtype=float)


def to_primitive(u, gas):
    """Decode conserved u into [rho, v1, v2, p] with p = (gamma-1)(E - rho v^2/2)."""
    rho = u[RHO]
    if np.any(rho == 0.0):
        raise DegenerateStateError("zero density state cannot be decoded")
    v1 = u[MX] / rho
    v2 = u[MY] / rho
    p = (gas.gamma - 1.0) * (u[EN] - 0.5 * rho * (v1 * v1 + v2 * v2))
    return np.stack([rho, v1, v2, p])


def to_conserved(w, gas):
    """Encode primitive w into [rho, m1, m2, E] with E = p/(gamma-1) + rho v^2/2."""
    rho = w[RHO]
    if np.any(rho <= 0.0):
        raise DegenerateStateError("primitive state requires rho > 0")
    m1 = rho * w[V1]
    m2 = rho * w[V2]
    energy = w[PRES] / (gas.gamma - 1.0) + 0.5 * rho * (w[V1] ** 2 + w[V2] ** 2)
    return np.stack([rho, m1, m2, energy])


def pressure(u, gas):
    """Pressure of a conserved state (no admissibility check)."""
    return (gas.gamma - 1.0) * (u[EN] - 0.5 * (u[MX] ** 2 + u[MY] ** 2) / u[RHO])


def flux_x(u, gas):
    """x-directed flux f(u) = [rho v1, rho v1^2 + p, rho v1 v2, (E+p) v1]."""
    if np.any(u[RHO] == 0.0):
        raise DegenerateStateError("zero density state has no flux")
    v1 = u[MX] / u[RHO]
    p = pressure(u, gas)
    return np.stack([u[MX], u[MX] * v1 + p, u[MY] * v1, (u[EN] + p) * v1])


def flux_y(u, gas):
    """y-directed flux g(u) = [rho v2, rho v1 v2, rho v2^2 + p, (E+p) v2]."""
    if np.any(u[RHO] == 0.0):
        raise DegenerateStateError("zero density state has no flux")
    v2 = u[MY] / u[RHO]
    p = pressure(u, gas)
    return np.stack([u[MY], u[MX] * v2, u[MY] * v2 + p, (u[EN] + p) * v2])


def is_admissible(u):
    """True where rho > 0 and the internal energy density is positive.

    Uses rho*E - (m1^2 + m2^2)/2 > 0, which for rho > 0 is the same sign test
    as E - rho v^2/2 > 0 but avoids the division.
    """
    rho_e = u[RHO] * u[EN] - 0.5 * (u[MX] ** 2 + u[MY] ** 2)
    return (u[RHO] > 0.0) & (rho_e > 0.0)


def local_wave_speed(u, gas):
    """|v| + sound speed, the largest characteristic speed in any direction."""
    if not np.all(is_admissible(u)):
        raise DegenerateStateError("wave speed requires an admissible state")
    rho = u[RHO]
    v1 = u[MX] / rho
    v2 = u[MY] / rho
    p = (gas.gamma - 1.0) * (u[EN] - 0.5 * rho * (v1 * v1 + v2 * v2))
    return np.sqrt(v1 * v1 + v2 * v2) + np.sqrt(gas.gamma * p / rho)


def max_wave_speed(u, gas):
    """Global maximum of local_wave_speed over all states in the array."""
    return float(np.max(local_wave_speed(u, gas)))


def swap_xy(u):
    """Exchange the x and y roles of a state (m1 <-> m2)."""
    return np.stack([u[RHO], u[MY], u[MX], u[EN]])
