"""Five-velocity (D2Q5) kinetic model: equilibria, admissible speeds, speed policy.

The lattice carries five waves with velocities (a,0), (-a,0), (0,a), (0,-a)
and (0,0).  Under exact streaming a*dt = dx, so each wave hops exactly one
cell per step; the integer upstream offsets are fixed while the physical
speed a is refreshed every step.
"""

from dataclasses import dataclass, field

import numpy as np

from . import euler

# upstream cell offset (di, dj) for each wave k=1..5: the cell a wave value
# streams FROM during one step
UPSTREAM_OFFSETS = ((-1, 0), (1, 0), (0, -1), (0, 1), (0, 0))

_UNIT_EX = np.array([1.0, -1.0, 0.0, 0.0, 0.0])
_UNIT_EY = np.array([0.0, 0.0, 1.0, -1.0, 0.0])


@dataclass
class KineticModel:
    """Run-level lattice parameters.

    alpha is the rest-wave weight; convex preservation of the first-order
    scheme requires 1/2 <= alpha < 1.  ``a`` holds the kinetic speed of the
    current step and is rewritten by the driver between steps.  ``fixed_a``
    pins the speed instead of deriving it from the wave-speed policy.
    """

    alpha: float = 0.5
    a: float = field(default=np.nan)
    fixed_a: float | None = None

    def __post_init__(self):
        if not 0.5 <= self.alpha < 1.0:
            raise ValueError(f"alpha must lie in [1/2, 1), got {self.alpha}")
        if self.fixed_a is not None and not self.fixed_a > 0.0:
            raise ValueError("fixed kinetic speed must be positive")

    @property
    def e_x(self):
        return self.a * _UNIT_EX

    @property
    def e_y(self):
        return self.a * _UNIT_EY


def maxwellian(k, u, model, gas):
    """Equilibrium distribution of wave k (1..5) at conserved state u.

    Waves 1/2 carry ((1-alpha)/4) u +- f(u)/(2a), waves 3/4 the same with
    g(u), wave 5 is alpha u.  Their sum is u and their first moments are the
    physical fluxes.
    """
    if not 1 <= k <= 5:
        raise ValueError(f"wave index must be 1..5, got {k}")
    if k == 5:
        return model.alpha * np.asarray(u, dtype=float)
    c = (1.0 - model.alpha) / 4.0
    if k in (1, 2):
        half_flux = euler.flux_x(u, gas) / (2.0 * model.a)
    else:
        half_flux = euler.flux_y(u, gas) / (2.0 * model.a)
    sign = 1.0 if k in (1, 3) else -1.0
    return c * u + sign * half_flux


def maxwellians_moving(u, f, g, model):
    """Equilibria of the four moving waves, stacked on a new leading axis.

    Takes precomputed fluxes so the per-step driver can share them; the rest
    wave alpha*u is left implicit.
    """
    c = (1.0 - model.alpha) / 4.0
    cu = c * u
    hf = f / (2.0 * model.a)
    hg = g / (2.0 * model.a)
    return np.stack([cu + hf, cu - hf, cu + hg, cu - hg])


def bouchut_min_speed(lambda_max, alpha):
    """Smallest kinetic speed with monotone nondecreasing equilibria.

    2*lambda/(1-alpha), where lambda bounds the spectral radii of both flux
    Jacobians.  Valid for any rest weight alpha in [0, 1).
    """
    if not lambda_max > 0.0:
        raise ValueError("lambda_max must be positive")
    if not 0.0 <= alpha < 1.0:
        raise ValueError(f"alpha must lie in [0, 1), got {alpha}")
    return 2.0 * lambda_max / (1.0 - alpha)


def kinetic_speed_policy(lambda_max, model):
    """Kinetic speed for the next step.

    Default: the critical Bouchut speed 2*lambda/(1-alpha) (= 4*lambda at
    alpha = 1/2).  A fixed override is accepted only while it stays at or
    above that minimum.
    """
    a_min = bouchut_min_speed(lambda_max, model.alpha)
    if model.fixed_a is None:
        return a_min
    if model.fixed_a < a_min:
        raise ValueError(
            f"fixed kinetic speed {model.fixed_a} violates the admissible "
            f"minimum {a_min} (lambda={lambda_max})"
        )
    return model.fixed_a
