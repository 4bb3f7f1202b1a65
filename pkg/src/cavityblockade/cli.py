"""Command-line interface.

Verbs: ``g2`` (single-point statistics), ``sweep`` (1-D/2-D grids to CSV),
``optimize`` (blockade-condition roots), ``nonreciprocal`` (working-point
search), ``validate-full`` (effective-vs-full-model check), ``figure``
(named presets).  Parameter flags mirror the config-file keys; ``--config``
is applied first and flags override it.

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from pathlib import Path

from . import figures, optimizer, steady_state, sweeps
from .dynamics import NonFiniteState
from .full_model import NotConverged, validate_effective
from .optimizer import DegenerateDetuning, NoRealSolution
from .params import (
    ConfigError,
    Direction,
    SystemParams,
    _FLOAT_FIELDS,
    parse_config,
    params_from_mapping,
    reference_params,
)
from .steady_state import SingularDenominator

NUMERICAL_ERRORS = (
    DegenerateDetuning,
    NoRealSolution,
    NonFiniteState,
    NotConverged,
    SingularDenominator,
    ZeroDivisionError,
    FloatingPointError,
)


class _Parser(argparse.ArgumentParser):
    """argparse's default error path calls sys.exit(2); route it through
    the config-error channel instead so exit codes follow the contract."""

    def error(self, message: str) -> None:
        raise ConfigError(message)


def _add_param_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--config",
        type=Path,
        help="key = value parameter file, applied before any flags",
    )
    group = parser.add_argument_group(
        "system parameters (defaults: the reference working point)"
    )
    for name in _FLOAT_FIELDS:
        group.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float)
    group.add_argument("--direction", choices=[d.value for d in Direction])


def _params_from_args(args: argparse.Namespace) -> SystemParams:
    base = reference_params()
    if args.config is not None:
        try:
            text = args.config.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        base = params_from_mapping(parse_config(text), base=base)
    overrides: dict[str, object] = {}
    for name in _FLOAT_FIELDS:
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    direction = getattr(args, "direction", None)
    if direction is not None:
        overrides["direction"] = Direction(direction)
    if "kappa1" in overrides and "kappa2" not in overrides:
        overrides["kappa2"] = 2.0 * overrides.get("kappa", base.kappa) - overrides["kappa1"]
    elif "kappa2" in overrides and "kappa1" not in overrides:
        overrides["kappa1"] = 2.0 * overrides.get("kappa", base.kappa) - overrides["kappa2"]
    return params_from_mapping(overrides, base=base)


def _parse_axis(text: str) -> sweeps.SweepAxis:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise ConfigError(
            f"axis must be 'name,min,max,n', got {text!r}"
        )
    name, lo, hi, n = parts
    try:
        return sweeps.SweepAxis(name, float(lo), float(hi), int(n))
    except ValueError as exc:
        raise ConfigError(f"bad axis {text!r}: {exc}") from exc


def _print_kv(pairs: list[tuple[str, object]]) -> None:
    for key, value in pairs:
        if isinstance(value, float):
            value = repr(value)
        print(f"{key} = {value}")


def _jobs(args: argparse.Namespace) -> int:
    if args.jobs is not None:
        if args.jobs < 1:
            raise ConfigError("--jobs must be at least 1")
        return args.jobs
    return os.cpu_count() or 1


def _cmd_g2(args: argparse.Namespace) -> int:
    params = _params_from_args(args)
    stats = steady_state.steady_stats(params, j=args.J, theta=args.theta)
    _print_kv(
        [
            ("direction", params.direction.value),
            ("delta_c", params.delta_c),
            ("g2", stats.g2),
            ("p1", stats.p1),
            ("p2", stats.p2),
            ("n_paper", stats.n_cavity_paper),
            ("n_full", stats.n_cavity_full),
        ]
    )
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    params = _params_from_args(args)
    overrides: dict[str, float] = {}
    if args.J is not None:
        overrides["J"] = args.J
    if args.theta is not None:
        overrides["theta"] = args.theta
    spec = sweeps.SweepSpec(
        axis1=_parse_axis(args.axis1),
        axis2=None if args.axis2 is None else _parse_axis(args.axis2),
        overrides=overrides,
        directions=sweeps.parse_directions(args.directions),
        observable=args.observable,
        optimal_j_theta=args.optimal_j_theta,
    )
    result = sweeps.run_sweep(spec, params, jobs=_jobs(args))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    files = sweeps.write_sweep_csv(result, out / f"{args.name}.csv")
    for name in files:
        print(out / name)
    return 0


def _cmd_optimize(args: argparse.Namespace) -> int:
    params = _params_from_args(args)
    point = optimizer.solve_optimal(params, fix_delta_c=args.fix_delta_c)
    at_optimum = dataclasses.replace(params, delta_c=point.delta_c_opt)
    stats = steady_state.steady_stats(at_optimum, j=point.J, theta=point.theta)
    _print_kv(
        [
            ("direction", point.direction.value),
            ("J", point.J),
            ("theta", point.theta),
            ("delta_c_opt", point.delta_c_opt),
            ("residual", point.residual),
            ("g2", stats.g2),
        ]
    )
    return 0


def _cmd_nonreciprocal(args: argparse.Namespace) -> int:
    params = _params_from_args(args)
    j, theta, report = optimizer.nonreciprocal_point(params, args.target_delta_c)
    _print_kv(
        [
            ("J", j),
            ("theta", theta),
            ("delta_c", report.delta_c),
            ("g2_forward", report.g2_forward),
            ("g2_backward", report.g2_backward),
            ("contrast", report.contrast),
        ]
    )
    return 0


def _cmd_validate_full(args: argparse.Namespace) -> int:
    params = _params_from_args(args)
    report = validate_effective(
        params, tolerance=args.tolerance, n_max=args.n_max, dt=args.dt
    )
    print(report.as_text())
    return 0


def _cmd_figure(args: argparse.Namespace) -> int:
    for name in figures.figure(args.name, args.out, jobs=_jobs(args)):
        print(Path(args.out) / name)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="cavityblockade",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("g2", help="steady-state photon statistics at one point")
    _add_param_flags(p)
    p.add_argument("--J", type=float, help="override the Raman coupling directly")
    p.add_argument("--theta", type=float, help="override the drive phase directly")
    p.set_defaults(func=_cmd_g2)

    p = sub.add_parser("sweep", help="evaluate statistics over a parameter grid")
    _add_param_flags(p)
    p.add_argument("--axis1", required=True, help="axis as 'name,min,max,n'")
    p.add_argument("--axis2", help="optional second axis as 'name,min,max,n'")
    p.add_argument(
        "--directions", default="both", help="forward, backward, or both"
    )
    p.add_argument("--observable", default="g2", choices=sweeps.OBSERVABLES)
    p.add_argument(
        "--optimal-j-theta",
        action="store_true",
        help="re-solve the blockade-optimal J and theta at every grid point",
    )
    p.add_argument("--J", type=float, help="fixed Raman coupling override")
    p.add_argument("--theta", type=float, help="fixed drive-phase override")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--name", default="sweep", help="output file stem")
    p.add_argument("--jobs", type=int, help="worker count (default: all cores)")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("optimize", help="solve the two-photon cancellation condition")
    _add_param_flags(p)
    p.add_argument(
        "--fix-delta-c",
        action="store_true",
        help="hold delta_c at its configured value instead of solving for it",
    )
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser(
        "nonreciprocal", help="find a working point with one-way blockade"
    )
    _add_param_flags(p)
    p.add_argument(
        "--target-delta-c",
        type=float,
        default=0.0,
        help="cavity detuning at which to place the nonreciprocal point",
    )
    p.set_defaults(func=_cmd_nonreciprocal)

    p = sub.add_parser(
        "validate-full",
        help="compare the effective model against the three-level simulation",
    )
    _add_param_flags(p)
    p.add_argument("--tolerance", type=float, default=0.2)
    p.add_argument("--n-max", dest="n_max", type=int, default=2)
    p.add_argument("--dt", type=float, default=1e-3)
    p.set_defaults(func=_cmd_validate_full)

    p = sub.add_parser("figure", help="regenerate a named figure preset")
    p.add_argument("name", help="figure name, e.g. one of: " + ", ".join(figures.FIGURE_NAMES))
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--jobs", type=int, help="worker count (default: all cores)")
    p.set_defaults(func=_cmd_figure)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ValueError, figures.UnknownFigure) as exc:
        # ConfigError and parameter-validation ValueErrors both mean the
        # request was malformed; solver exceptions are ValueErrors too but
        # the numerical clause above claims them first.
        message = exc.args[0] if exc.args else str(exc)
        print(f"error: {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
