"""Blended five-wave vectorial lattice Boltzmann solver for 2D compressible Euler.

A collide-and-stream kinetic scheme whose distributions are vectors of
conserved variables.  Face-wise convex limiters blend a convex-preserving
first-order update with a second-order one, guaranteeing positive density
and pressure (and optional local maximum principles for the density).
"""

from .euler import GasModel, conserved, primitive, to_conserved, to_primitive
from .kinetic import KineticModel
from .limiting import LimiterConfig
from .mesh import BoundaryPlan, DistributionField, Grid
from .driver import RunConfig, run, convergence_study
from .cases import builtin_cases, get_case

__all__ = [
    "GasModel", "KineticModel", "LimiterConfig", "BoundaryPlan",
    "DistributionField", "Grid", "RunConfig", "run", "convergence_study",
    "builtin_cases", "get_case", "conserved", "primitive",
    "to_conserved", "to_primitive",
]

__version__ = "0.1.0"
