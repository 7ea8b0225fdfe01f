"""Command-line front end: ``spinlock {simulate,verify,sweep,steady}``.

Settings are resolved as preset, then config file, then explicit flags.
Output CSVs go to ``--out`` or, failing that, to ``$SPINLOCK_OUTPUT_DIR``
(default: the working directory).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import config as cfg
from .analysis import (
    steady_state_closed_form,
    steady_state_long_time,
    steady_state_nullspace,
    sweep,
)
from .errors import (
    DegenerateParams,
    DuplicateGridPoint,
    NonFiniteState,
    RankError,
    SpinlockError,
    StepSizeUnderflow,
)
from .hamiltonians import validate_regime
from .integrator import integrate
from .observable_ode import analytic_coefficients9, reduce_to_locked
from .verification import format_report, run_checks

OUTPUT_DIR_ENV = "SPINLOCK_OUTPUT_DIR"

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_CONFIG = 2
EXIT_INTEGRATION = 3

_FLAG_KEYS = (
    "omega1", "omega_d", "tau_c", "m0", "t_end", "dt", "engine", "method",
    "rtol", "sample_spacing", "out", "omega1_grid",
)


def _grid(text: str) -> tuple[float, ...]:
    return tuple(cfg.parse_number(v) for v in text.split(",") if v.strip())


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--preset", choices=cfg.PRESETS)
    p.add_argument("--omega1", type=cfg.parse_number, help="drive amplitude, rad/s (suffix *2pi allowed)")
    p.add_argument("--omega-d", dest="omega_d", type=cfg.parse_number, help="dipolar strength, rad/s")
    p.add_argument("--tau-c", dest="tau_c", type=cfg.parse_number, help="correlation time, s")
    p.add_argument("--m0", type=cfg.parse_number)
    p.add_argument("--t-end", dest="t_end", type=cfg.parse_number, help="s")
    p.add_argument("--dt", type=cfg.parse_number, help="RK4 step, s")
    p.add_argument("--engine", choices=("density", "observable9", "reduced3"))
    p.add_argument("--method", choices=("rk4", "adaptive"))
    p.add_argument("--rtol", type=cfg.parse_number)
    p.add_argument("--sample-spacing", dest="sample_spacing", type=cfg.parse_number, help="s")
    p.add_argument("--out", help="output CSV path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinlock", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate one parameter set and write a trajectory CSV")
    _add_run_flags(p)

    p = sub.add_parser("verify", help="check projected against closed-form coefficient matrices")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("sweep", help="steady values and lock times over a drive grid")
    _add_run_flags(p)
    p.add_argument("--omega1-grid", dest="omega1_grid", type=_grid, help="comma-separated rad/s values")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("steady", help="compare closed-form, null-space and long-time steady states")
    _add_run_flags(p)
    p.add_argument("--long-time", action="store_true", help="also integrate to t_end")
    return parser


def resolve_config(args: argparse.Namespace) -> cfg.RunConfig:
    overrides = {}
    if getattr(args, "config", None):
        overrides.update(cfg.loads(Path(args.config).read_text()))
    if getattr(args, "preset", None):
        overrides["preset"] = args.preset
    for key in _FLAG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    return cfg.build_config(overrides)


def _output_path(config: cfg.RunConfig, stem: str) -> Path:
    if config.out:
        return Path(config.out)
    return Path(os.environ.get(OUTPUT_DIR_ENV, ".")) / f"{stem}.csv"


def cmd_simulate(config: cfg.RunConfig) -> int:
    params = config.params
    for warning in validate_regime(params):
        print(f"warning: {warning}", file=sys.stderr)
    try:
        traj = integrate(
            config.engine,
            params,
            t_end=config.t_end,
            dt=config.dt,
            sample_spacing=config.sample_spacing,
            method=config.method,
            rtol=config.rtol,
        )
    except (NonFiniteState, StepSizeUnderflow) as exc:
        print(f"integration failed: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    except ValueError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    path = _output_path(config, f"{config.preset or 'simulate'}_{config.engine}")
    traj.to_csv(path)
    print(f"wrote {len(traj.times)} samples to {path}; final Mx = {traj.column('Mx')[-1]:.6g}")
    return EXIT_OK


def cmd_verify(trials: int = 100, seed: int = 0, **check_kwargs) -> int:
    """Print the check table; extra keyword arguments go to :func:`run_checks`."""
    results = run_checks(trials=trials, seed=seed, **check_kwargs)
    print(format_report(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_MISMATCH


def cmd_sweep(config: cfg.RunConfig, workers: int = 1) -> int:
    try:
        result = sweep(
            config.grid(),
            t_end=config.t_end,
            engine=config.engine,
            dt=config.dt,
            sample_spacing=config.sample_spacing,
            workers=workers,
        )
    except DuplicateGridPoint as exc:
        print(f"invalid grid: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    path = _output_path(config, f"{config.preset or 'sweep'}_sweep")
    result.to_csv(path)
    print(f"{'omega1 (rad/s)':>16} {'Mx_ss closed':>14} {'Mx numeric':>14} {'lock (s)':>12}  status")
    for pt in result.points:
        print(
            f"{pt.params.omega1:16.6g} {pt.mx_ss_closed:14.6g} {pt.mx_ss_numeric:14.6g} "
            f"{pt.lock_time:12.6g}  {pt.status}"
        )
    print(f"wrote {len(result)} rows to {path}")
    return EXIT_OK


def cmd_steady(config: cfg.RunConfig, long_time: bool = False) -> int:
    params = config.params
    try:
        closed = steady_state_closed_form(params)
        null = steady_state_nullspace(reduce_to_locked(analytic_coefficients9(params)))
    except (DegenerateParams, RankError) as exc:
        print(f"degenerate parameters: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    rows = [closed, null]
    if long_time:
        rows.append(
            steady_state_long_time(
                params, t_end=config.t_end, engine=config.engine, dt=config.dt,
                sample_spacing=config.sample_spacing,
            )
        )
    print(f"{'source':<12} {'Mx':>22} {'W':>22} {'Mzy':>12} {'|dMx|':>10} {'rel dMx':>10}")
    for s in rows:
        diff = abs(s.mx_ss - closed.mx_ss)
        rel = diff / abs(closed.mx_ss) if closed.mx_ss else float("nan")
        print(f"{s.source:<12} {s.mx_ss:22.15g} {s.w_ss:22.15g} {s.mzy_ss:12.3g} {diff:10.3g} {rel:10.3g}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        return cmd_verify(args.trials, args.seed)
    try:
        config = resolve_config(args)
        config.params
    except (ValueError, OSError, SpinlockError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "simulate":
        return cmd_simulate(config)
    if args.command == "sweep":
        return cmd_sweep(config, args.workers)
    return cmd_steady(config, args.long_time)


if __name__ == "__main__":
    sys.exit(main())
