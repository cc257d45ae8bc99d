"""Snapshot serialization: CSV field/profile/theta files and legacy VTK.

Floats are written with repr (shortest round-trip decimal), so re-parsing a
file reproduces the exact binary values.
"""

import json
from pathlib import Path

import numpy as np

from . import euler


def _rows_to_csv(path, header, columns):
    lines = [",".join(header)]
    stacked = [np.asarray(c).ravel() for c in columns]
    for row in zip(*stacked):
        lines.append(",".join(repr(float(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_field_csv(path, grid, fld, gas):
    """Interior cell centers with primitive variables: x,y,rho,v1,v2,p."""
    w = euler.to_primitive(fld.interior(grid), gas)
    x, y = grid.center_mesh()
    shape = (grid.nx, grid.ny)
    _rows_to_csv(
        path,
        ["x", "y", "rho", "v1", "v2", "p"],
        [np.broadcast_to(x, shape), np.broadcast_to(y, shape), w[0], w[1], w[2], w[3]],
    )


def write_theta_csv(path, grid, theta):
    """Face-centered blending parameters: orientation,x,y,theta."""
    xf = grid.x0 + np.arange(grid.nx + 1) * grid.dx  # vertical-face x positions
    yc = grid.centers_y()
    xc = grid.centers_x()
    yf = grid.y0 + np.arange(grid.ny + 1) * grid.dx
    lines = ["orientation,x,y,theta"]
    tx = theta.theta_x
    for i in range(tx.shape[0]):
        for j in range(tx.shape[1]):
            lines.append(f"x,{xf[i]!r},{yc[j]!r},{tx[i, j]!r}")
    ty = theta.theta_y
    for i in range(ty.shape[0]):
        for j in range(ty.shape[1]):
            lines.append(f"y,{xc[i]!r},{yf[j]!r},{ty[i, j]!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_profile_csv(path, grid, fld, gas):
    """Midline (j = ny/2) primitive profile for 1D strip cases."""
    j = grid.ny // 2
    w = euler.to_primitive(fld.interior(grid)[:, :, j], gas)
    _rows_to_csv(path, ["x", "rho", "v1", "v2", "p"],
                 [grid.centers_x(), w[0], w[1], w[2], w[3]])


def write_profile_theta_csv(path, grid, theta):
    """Midline x-face blending parameters: x,theta."""
    j = grid.ny // 2
    xf = grid.x0 + np.arange(grid.nx + 1) * grid.dx
    _rows_to_csv(path, ["x", "theta"], [xf, theta.theta_x[:, j]])


def write_exact_profile_csv(path, case, grid, t):
    """Midline exact reference profile, if the case has one."""
    x = grid.centers_x()
    y = np.full_like(x, float(grid.centers_y()[grid.ny // 2]))
    w = case.exact_primitive(x, y, t)
    _rows_to_csv(path, ["x", "rho", "v1", "v2", "p"], [x, w[0], w[1], w[2], w[3]])


def write_vtk(path, grid, fld, gas):
    """Legacy-VTK structured points file with the primitive fields."""
    w = euler.to_primitive(fld.interior(grid), gas)
    names = ["rho", "v1", "v2", "p"]
    lines = [
        "# vtk DataFile Version 2.0",
        "vlbm snapshot",
        "ASCII",
        "DATASET STRUCTURED_POINTS",
        f"DIMENSIONS {grid.nx} {grid.ny} 1",
        f"ORIGIN {grid.x0 + 0.5 * grid.dx!r} {grid.y0 + 0.5 * grid.dx!r} 0.0",
        f"SPACING {grid.dx!r} {grid.dx!r} 1.0",
        f"POINT_DATA {grid.nx * grid.ny}",
    ]
    for name, comp in zip(names, w):
        lines.append(f"SCALARS {name} double 1")
        lines.append("LOOKUP_TABLE default")
        # VTK structured points iterate x fastest
        lines.extend(repr(float(v)) for v in comp.T.ravel())
    Path(path).write_text("\n".join(lines) + "\n")


def read_field_csv(path):
    """Parse a field CSV back into a dict of 1D column arrays."""
    text = Path(path).read_text().strip().split("\n")
    header = text[0].split(",")
    data = np.array([[float(v) for v in line.split(",")] for line in text[1:]])
    return {name: data[:, k] for k, name in enumerate(header)}


def write_summary_json(path, summary):
    Path(path).write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
