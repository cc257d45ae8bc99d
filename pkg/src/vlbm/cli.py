"""Command-line front end: run, convergence, verify, list-cases.

Exit codes: 0 success, 1 configuration error, 2 solver abort (inadmissible
state), 3 verification failure.  A flat key=value config file can seed any
run flag; explicit command-line flags win.
"""

import argparse
import sys
from pathlib import Path

from . import cases, driver, verification
from .stepping import SolverAbort

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SOLVER = 2
EXIT_VERIFY = 3


def _parse_config_file(path):
    values = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise driver.ConfigError(f"bad config line (expected key=value): {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


_RUN_KEYS = {
    "case": str, "nx": int, "ny": int, "limiter": str, "alpha": float,
    "kinetic_speed": float, "t_final": float, "outdir": str,
    "snap_every": int, "formats": str, "pressure_limiter": str,
    "progress_every": int,
}


def _build_run_config(args):
    values = {}
    if args.config:
        raw = _parse_config_file(args.config)
        for key, text in raw.items():
            if key not in _RUN_KEYS:
                raise driver.ConfigError(f"unknown config key {key!r}")
            values[key] = _RUN_KEYS[key](text)
    for key in _RUN_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    if "case" not in values:
        raise driver.ConfigError("a case name is required (--case or config file)")
    if isinstance(values.get("formats"), str):
        values["formats"] = tuple(f.strip() for f in values["formats"].split(",") if f.strip())
    if isinstance(values.get("pressure_limiter"), str):
        values["pressure_limiter"] = values["pressure_limiter"].lower() not in ("0", "false", "off", "no")
    return driver.RunConfig(**values)


def _add_run_flags(p):
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--case", help="benchmark case name (see list-cases)")
    p.add_argument("--nx", type=int)
    p.add_argument("--ny", type=int)
    p.add_argument("--limiter", choices=("pp", "lmp", "rlmp", "none", "first_order"))
    p.add_argument("--alpha", type=float)
    p.add_argument("--kinetic-speed", dest="kinetic_speed", type=float,
                   help="fix the kinetic speed instead of the per-step policy")
    p.add_argument("--t-final", dest="t_final", type=float)
    p.add_argument("--outdir")
    p.add_argument("--snap-every", dest="snap_every", type=int)
    p.add_argument("--formats", help="comma-separated: csv,vtk")
    p.add_argument("--no-pressure-limiter", dest="pressure_limiter",
                   action="store_false", default=None)
    p.add_argument("--progress-every", dest="progress_every", type=int)


def main(argv=None):
    parser = argparse.ArgumentParser(prog="vlbm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one case to its final time")
    _add_run_flags(p_run)

    p_conv = sub.add_parser("convergence", help="error table over a mesh sequence")
    _add_run_flags(p_conv)
    p_conv.add_argument("--meshes", required=True,
                        help="comma-separated nx values, e.g. 20,40,80,160")

    p_verify = sub.add_parser("verify", help="run built-in property suites")
    p_verify.add_argument("what", nargs="?", default="all",
                          choices=("moments", "fd-oracle", "limiters", "all"))

    sub.add_parser("list-cases", help="list benchmark cases")

    args = parser.parse_args(argv)

    if args.command == "list-cases":
        for name, case in sorted(cases.builtin_cases().items()):
            kind = "1D strip" if case.is_1d else "2D"
            print(f"{name:18s} {kind:8s} gamma={case.gamma:<8g} "
                  f"t_final={case.t_final:<8g} default nx={case.default_nx}"
                  + (f"  [{case.notes}]" if case.notes else ""))
        return EXIT_OK

    if args.command == "verify":
        ok, lines = verification.verify(args.what)
        print("\n".join(lines))
        return EXIT_OK if ok else EXIT_VERIFY

    try:
        config = _build_run_config(args)
    except (driver.ConfigError, KeyError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "run":
            summary, _, _ = driver.run(config)
            for key, value in sorted(summary.as_dict().items()):
                print(f"{key}: {value}")
        else:
            nx_list = [int(v) for v in args.meshes.split(",")]
            rows = driver.convergence_study(config, nx_list)
            print("nx      L1            rate    L2            rate    Linf          rate")
            for row in rows:
                def fmt(norm):
                    rate = row[f"rate_{norm}"]
                    return f"{row[norm]:.6e} {'  -  ' if rate is None else f'{rate:5.2f}'}"
                print(f"{row['nx']:<7d} {fmt('l1')}  {fmt('l2')}  {fmt('linf')}")
    except (driver.ConfigError, KeyError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverAbort as exc:
        print(f"solver abort: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
