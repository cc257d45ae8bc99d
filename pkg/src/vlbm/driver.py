"""Run orchestration: configuration, time loop, snapshots, convergence studies."""

import os
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import cases, euler, fastpath, kinetic, mesh, output, stepping
from .limiting import DENSITY_KINDS, LimiterConfig


class ConfigError(ValueError):
    """Invalid run configuration."""


@dataclass(frozen=True)
class RunConfig:
    """One solver run: case selection plus overrides.

    Mesh, limiter, final time and kinetic speed default to the case's own
    values when left as None.  Snapshots are written every ``snap_every``
    steps (and always at the final time) when an output directory is given.
    """

    case: str
    nx: int | None = None
    ny: int | None = None
    limiter: str | None = None
    alpha: float = 0.5
    kinetic_speed: float | None = None
    t_final: float | None = None
    outdir: str | None = None
    snap_every: int | None = None
    formats: tuple = ("csv",)
    pressure_limiter: bool = True
    progress_every: int = 0  # steps between progress prints; 0 = silent

    def __post_init__(self):
        if self.nx is not None and self.nx < 1:
            raise ConfigError("nx must be at least 1")
        if self.ny is not None and self.ny < 1:
            raise ConfigError("ny must be at least 1")
        if self.limiter is not None and self.limiter not in DENSITY_KINDS:
            raise ConfigError(
                f"unknown limiter {self.limiter!r}; choose from {DENSITY_KINDS}"
            )
        if self.snap_every is not None and self.snap_every < 1:
            raise ConfigError("snap_every must be positive")
        for fmt in self.formats:
            if fmt not in ("csv", "vtk"):
                raise ConfigError(f"unknown output format {fmt!r}")
        if self.kinetic_speed is not None and self.kinetic_speed <= 0:
            raise ConfigError("kinetic speed must be positive")


@dataclass
class RunSummary:
    case: str
    nx: int
    ny: int
    limiter: str
    steps: int
    t_final: float
    wall_time: float
    min_rho: float
    min_p: float
    conservation_drift: float
    errors: cases.ErrorReport | None = None
    outdir: str | None = None

    def as_dict(self):
        d = {
            "case": self.case, "nx": self.nx, "ny": self.ny,
            "limiter": self.limiter, "steps": self.steps,
            "t_final": self.t_final, "wall_time": self.wall_time,
            "min_rho": self.min_rho, "min_p": self.min_p,
            "conservation_drift": self.conservation_drift,
        }
        if self.errors is not None:
            d["errors"] = {
                "dx": self.errors.dx, "l1": self.errors.l1,
                "l2": self.errors.l2, "linf": self.errors.linf,
            }
        return d


def _final_time_tolerance(t_final):
    return 1e-12 * max(1.0, abs(t_final))


def setup_run(config):
    """Resolve a config into (case, grid, gas, model, limiter, field)."""
    case = cases.get_case(config.case)
    grid = cases.build_grid(case, config.nx, config.ny)
    gas = case.gas()
    fixed_a = config.kinetic_speed if config.kinetic_speed is not None else case.fixed_a
    model = kinetic.KineticModel(alpha=config.alpha, fixed_a=fixed_a)
    limiter = LimiterConfig(
        density_kind=config.limiter or case.default_limiter,
        pressure_on=config.pressure_limiter,
    )
    u0 = cases.initial_conserved(case, grid)
    lam0 = max(
        euler.max_wave_speed(u0[:, grid.ix, grid.iy], gas),
        mesh.boundary_wave_speed(case.plan, grid, 0.0, gas),
    )
    model.a = kinetic.kinetic_speed_policy(lam0, model)
    fld = mesh.init_distributions(u0, model, gas, grid)
    return case, grid, gas, model, limiter, fld


def run(config, step_callback=None):
    """Execute a run to its final time and return a RunSummary.

    step_callback(step, t, fld, theta) is invoked after every step; tests
    use it to audit invariants while the run is live.  Field buffers are
    recycled between steps: callbacks must copy anything they keep.
    """
    case, grid, gas, model, limiter, fld = setup_run(config)
    t_final = config.t_final if config.t_final is not None else case.t_final
    tol = _final_time_tolerance(t_final)

    outdir = Path(config.outdir) if config.outdir else None
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)

    def snapshot(tag, theta):
        if not outdir:
            return
        if "csv" in config.formats:
            output.write_field_csv(outdir / f"fields_{tag}.csv", grid, fld, gas)
            if theta is not None:
                output.write_theta_csv(outdir / f"faces_theta_{tag}.csv", grid, theta)
        if "vtk" in config.formats:
            output.write_vtk(outdir / f"fields_{tag}.vtk", grid, fld, gas)

    totals0 = fld.interior(grid).sum(axis=(1, 2))
    _, min_rho, min_p, _ = fastpath.field_stats(fld, grid, gas)
    t, steps, theta = 0.0, 0, None
    started = time.perf_counter()
    snapshot("000000", None)

    spare = None
    while t_final - t > tol:
        prev = fld
        fld, dt, theta, stats = stepping.advance(
            fld, t, grid, case.plan, limiter, model, gas, t_final=t_final,
            out=spare,
        )
        spare = prev  # double buffering: the pre-step field becomes scratch
        t += dt
        steps += 1
        min_rho, min_p = min(min_rho, stats[1]), min(min_p, stats[2])
        if step_callback is not None:
            step_callback(steps, t, fld, theta)
        if config.progress_every and steps % config.progress_every == 0:
            print(f"[{config.case}] step {steps}  t={t:.6g}  dt={dt:.3e}", flush=True)
        if config.snap_every and steps % config.snap_every == 0:
            snapshot(f"{steps:06d}", theta)

    wall = time.perf_counter() - started
    snapshot("final", theta)

    totals1 = fld.interior(grid).sum(axis=(1, 2))
    # one scale for all components: zero initial momentum must not blow up
    # the relative drift
    scale = max(float(np.max(np.abs(totals0))), 1e-300)
    drift = float(np.max(np.abs(totals1 - totals0)) / scale)

    errors = None
    if case.exact_primitive is not None:
        errors = cases.error_norms(
            fld.interior(grid)[euler.RHO], case.exact_primitive, grid, t_final
        )

    if outdir and case.is_1d:
        output.write_profile_csv(outdir / "profile.csv", grid, fld, gas)
        if theta is not None:
            output.write_profile_theta_csv(outdir / "profile_theta.csv", grid, theta)
        if case.exact_primitive is not None:
            output.write_exact_profile_csv(
                outdir / "profile_exact.csv", case, grid, t_final
            )

    summary = RunSummary(
        case=case.name, nx=grid.nx, ny=grid.ny, limiter=limiter.density_kind,
        steps=steps, t_final=t_final, wall_time=wall,
        min_rho=min_rho, min_p=min_p, conservation_drift=drift,
        errors=errors, outdir=str(outdir) if outdir else None,
    )
    if outdir:
        output.write_summary_json(outdir / "summary.json", summary.as_dict())
    return summary, fld, grid


def max_workers():
    """Worker cap for mesh-parallel studies, from VLBM_THREADS (default 1)."""
    value = os.environ.get("VLBM_THREADS", "1")
    try:
        return max(1, int(value))
    except ValueError:
        return 1


def convergence_study(config, nx_list):
    """Errors and rates over a mesh sequence; needs an exact reference.

    Meshes run in parallel processes when VLBM_THREADS allows it; results
    are ordered by mesh regardless.
    """
    case = cases.get_case(config.case)
    if case.exact_primitive is None:
        raise ConfigError(f"case {case.name!r} has no exact reference solution")
    configs = [replace(config, nx=nx, outdir=None) for nx in nx_list]

    workers = min(max_workers(), len(configs))
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            summaries = list(pool.map(_run_summary_only, configs))
    else:
        summaries = [_run_summary_only(c) for c in configs]

    reports = [s.errors for s in summaries]
    rates = cases.convergence_rates(reports) if len(reports) > 1 else []
    rows = []
    for k, (nx, rep) in enumerate(zip(nx_list, reports)):
        row = {"nx": nx, "dx": rep.dx, "l1": rep.l1, "l2": rep.l2, "linf": rep.linf}
        for norm in ("l1", "l2", "linf"):
            row[f"rate_{norm}"] = float(rates[k - 1][norm]) if k > 0 else None
        rows.append(row)

    if config.outdir:
        outdir = Path(config.outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        lines = ["nx,dx,l1,rate_l1,l2,rate_l2,linf,rate_linf"]
        for row in rows:
            cells = [str(row["nx"]), repr(row["dx"])]
            for norm in ("l1", "l2", "linf"):
                cells.append(repr(row[norm]))
                rate = row[f"rate_{norm}"]
                cells.append("" if rate is None else repr(rate))
            lines.append(",".join(cells))
        (outdir / f"convergence_{case.name}_{summaries[0].limiter}.csv").write_text(
            "\n".join(lines) + "\n"
        )
    return rows


def _run_summary_only(config):
    summary, _, _ = run(config)
    return summary
