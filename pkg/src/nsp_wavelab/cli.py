"""Command-line entry point: ``nsp-wavelab <subcommand> ...``.

Exit codes: 0 success, 1 numerical failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from nsp_wavelab import __version__
from nsp_wavelab.config import ConfigError, RunConfig, parse_config
from nsp_wavelab.output import (REPORT_COLUMNS, SNAPSHOT_COLUMNS, array_rows, atomic_write, fmt,
                                snapshot_name, write_csv)
from nsp_wavelab.thermo import DomainError, GammaMembershipError, NotOnCurveError, solve_riemann

CONFIG_ERRORS = (ConfigError, GammaMembershipError, DomainError, NotOnCurveError)

FAN_KEYS = ("v_minus", "u_minus", "v_mid", "u_mid", "v_plus", "u_plus", "sigma",
            "delta_R", "delta_S", "phi_minus", "phi_mid", "phi_plus")


def _add_states(p: argparse.ArgumentParser) -> None:
    d = RunConfig()
    p.add_argument("--v-minus", type=float, default=d.v_minus)
    p.add_argument("--u-minus", type=float, default=d.u_minus)
    p.add_argument("--v-plus", type=float, default=d.v_plus)
    p.add_argument("--u-plus", type=float, default=d.u_plus)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nsp-wavelab",
                                     description="Composite-wave lab for isothermal Navier-Stokes-Poisson.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--output-dir", default=None, help="directory for output files")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("riemann", help="solve the Riemann problem and print the fan")
    _add_states(p)

    p = sub.add_parser("rarefaction", help="sample the approximate rarefaction")
    _add_states(p)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--samples", type=int, default=401)
    p.add_argument("--x-min", type=float, default=None)
    p.add_argument("--x-max", type=float, default=None)

    p = sub.add_parser("profile", help="compute and verify the shock profile")
    _add_states(p)
    p.add_argument("--half-length", type=float, default=None)
    p.add_argument("--tol", type=float, default=1e-10)

    sub.add_parser("poisson-test", help="manufactured-solution convergence study")

    p = sub.add_parser("simulate", help="run the time evolution from a config file")
    p.add_argument("--config", default=None, help="key = value config file")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config key (repeatable)")

    p = sub.add_parser("verify", help="run the bundled self-checks")
    p.add_argument("--verify-profile", choices=("quick", "full"), default="quick")
    return parser


def _outdir(args, default: str = "out") -> Path:
    return Path(args.output_dir if args.output_dir is not None else default)


def cmd_riemann(args) -> int:
    fan = solve_riemann(args.v_minus, args.u_minus, args.v_plus, args.u_plus)
    d = fan.as_dict()
    for k in FAN_KEYS:
        print(f"{k}={fmt(d[k])}")
    print(",".join(FAN_KEYS))
    print(",".join(fmt(d[k]) for k in FAN_KEYS))
    return 0


def cmd_rarefaction(args) -> int:
    from nsp_wavelab.rarefaction import RarefactionField, fan_window, rarefaction_derivatives, rarefaction_eval

    if args.samples < 2:
        raise ConfigError("samples: need at least 2")
    fan = solve_riemann(args.v_minus, args.u_minus, args.v_plus, args.u_plus)
    field = RarefactionField(fan)
    lo, hi = fan_window(field, args.t)
    x = np.linspace(args.x_min if args.x_min is not None else lo,
                    args.x_max if args.x_max is not None else hi, args.samples)
    v, u, phi = rarefaction_eval(field, args.t, x)
    ((vx, ux),) = rarefaction_derivatives(field, args.t, x, 1)
    cols = ("x", "v", "u", "phi", "vx", "ux")
    meta = {"command": "rarefaction", "t": args.t, "samples": args.samples}
    path = write_csv(_outdir(args) / "rarefaction.csv", cols,
                     array_rows(cols, dict(x=x, v=v, u=u, phi=phi, vx=vx, ux=ux)), meta)
    print(path)
    return 0


def cmd_profile(args) -> int:
    from nsp_wavelab.shock_profile import shode_residual, solve_profile, verify_tail

    fan = solve_riemann(args.v_minus, args.u_minus, args.v_plus, args.u_plus)
    if fan.delta_S == 0.0:
        raise ConfigError("v_plus/u_plus: the fan has no shock (delta_S = 0)")
    prof = solve_profile(fan, L=args.half_length, tol=args.tol)
    ev = prof.eval(prof.xi)
    cols = ("xi", "v", "u", "phi", "h", "vp", "up", "phip")
    arrays = {"xi": prof.xi, **{k: ev[k] for k in cols[1:]}}
    meta = {"command": "profile", "sigma": fan.sigma, "delta_S": fan.delta_S,
            "half_length": prof.L, "dxi": prof.dxi, "tol": args.tol}
    out = _outdir(args)
    write_csv(out / "profile.csv", cols, array_rows(cols, arrays), meta)
    records = [
        {"check": "shode_residual", **shode_residual(prof)},
        {"check": "anchor", "v0": float(prof.eval(np.array([0.0]))["v"][0]), "target": prof.anchor},
        {"check": "monotone", "v_increasing": bool(np.all(np.diff(prof.state[0]) > 0))},
        {"check": "tail", **verify_tail(prof).as_dict()},
    ]
    atomic_write(out / "profile_report.jsonl", "".join(json.dumps(r) + "\n" for r in records))
    print(out / "profile.csv")
    return 0


def cmd_poisson_test(args) -> int:
    from nsp_wavelab.poisson import manufactured_study

    rows = manufactured_study()
    cols = ("dxi", "error", "observed_order")
    path = write_csv(_outdir(args) / "poisson_convergence.csv", cols, rows, {"command": "poisson-test"})
    for r in rows:
        print(f"dxi={fmt(r['dxi'])} error={fmt(r['error'])} order={fmt(r['observed_order'])}")
    print(path)
    return 0


def _overrides(pairs) -> dict:
    out = {}
    for item in pairs:
        if "=" not in item:
            raise ConfigError(f"--set: expected KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def cmd_simulate(args) -> int:
    from nsp_wavelab.evolve import run

    overrides = _overrides(args.set)
    if args.output_dir is not None:
        overrides["output_dir"] = args.output_dir
    cfg = parse_config(args.config, overrides)
    out = Path(cfg.output_dir)
    res = run(cfg)
    meta = {"command": "simulate", "c0": cfg.c0, "grid_points": len(res.final.xi), "dxi": cfg.dxi,
            "sigma": res.wave.fan.sigma, "time_scheme": "heun+shift", "steps": res.steps}
    meta.update({f"config.{k}": (",".join(fmt(x) for x in v) if isinstance(v, tuple) else v)
                 for k, v in cfg.as_dict().items()})
    write_csv(out / "report.csv", REPORT_COLUMNS, (r.as_dict() for r in res.reports), meta)
    for t, snap in sorted(res.snapshots.items()):
        write_csv(out / snapshot_name(t), SNAPSHOT_COLUMNS, array_rows(SNAPSHOT_COLUMNS, snap),
                  {"command": "simulate", "t": t})
    atomic_write(out / "config.txt", cfg.as_text())
    print(out / "report.csv")
    return 0


def cmd_verify(args) -> int:
    from nsp_wavelab.checks import run_checks

    results = run_checks(args.verify_profile)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name} ({r.seconds:.2f}s) {r.detail}")
    return 0 if all(r.passed for r in results) else 1


COMMANDS = {"riemann": cmd_riemann, "rarefaction": cmd_rarefaction, "profile": cmd_profile,
            "poisson-test": cmd_poisson_test, "simulate": cmd_simulate, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else 2
    try:
        return COMMANDS[args.command](args)
    except CONFIG_ERRORS as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
