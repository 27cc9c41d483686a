"""Command line entry point: ``rdhweno run | convergence | list``."""

from __future__ import annotations

import argparse
import logging
import math
import sys

from rdhweno.driver import DIVERGED, RunConfig, run_to_steady
from rdhweno.harness import (
    convergence_study,
    emit_outputs,
    read_config,
    run_errors,
    shock_location,
)
from rdhweno.problems import ALIASES, PROBLEMS, get_problem

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DIVERGED = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _grid_list(text: str) -> list[int]:
    try:
        grids = [int(g) for g in text.split(",") if g.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed grid list {text!r}") from None
    if not grids or min(grids) <= 0:
        raise argparse.ArgumentTypeError(f"malformed grid list {text!r}")
    return grids


def _param(text: str) -> tuple[str, float]:
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        return key.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"parameter {key!r} needs a number") from None


# flag name -> (argparse kwargs); shared by the CLI and the config file
_SOLVER_FLAGS = {
    "n": dict(type=_positive_int, help="cells in x (1D: cells)"),
    "m": dict(type=_positive_int, help="cells in y (2D only)"),
    "cfl": dict(type=float),
    "sigma": dict(type=float, help="2D dissipation coefficient"),
    "delta": dict(type=float, help="entropy-fix width of the upwind ramp"),
    "epsilon": dict(type=float, help="HWENO weight regularizer"),
    "max-iters": dict(type=int),
    "tol": dict(type=float, help="relative residue tolerance"),
    "stagnation-window": dict(type=_positive_int),
    "precision": dict(choices=("double", "extended")),
    "out": dict(help="output directory"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rdhweno", description="Steady-state residual distribution HWENO solver")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    for name, helptext in (("run", "solve one problem on one grid"),
                           ("convergence", "grid refinement study with error table")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--problem", help="problem id (see `list`)")
        p.add_argument("--config", help="key=value file; command-line flags override it")
        for flag, kwargs in _SOLVER_FLAGS.items():
            p.add_argument(f"--{flag}", default=None, **kwargs)
        p.add_argument("--param", action="append", type=_param, default=[],
                       metavar="KEY=VALUE", help="problem parameter, e.g. beta=2")
        if name == "convergence":
            p.add_argument("--grids", type=_grid_list, default=None, help="e.g. 20,40,80")
    sub.add_parser("list", help="print the problem registry")
    return parser


def _merge_config(args) -> None:
    """Fill unset flags from ``--config``; explicit flags win."""
    if not args.config:
        return
    try:
        entries = read_config(args.config)
    except OSError as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}") from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    parser = build_parser()
    for key, value in entries.items():
        if key.startswith("param."):
            args.param = [(key[6:], float(value))] + list(args.param)
            continue
        dest = key.replace("-", "_")
        if key == "problem" or key == "grids" or key in _SOLVER_FLAGS:
            if getattr(args, dest, None) is not None:
                continue
            try:
                if key == "grids":
                    setattr(args, dest, _grid_list(value))
                elif key == "problem":
                    args.problem = value
                else:
                    sub = parser.parse_args(["run", f"--{key}", value])
                    setattr(args, dest, getattr(sub, dest))
            except (UsageError, argparse.ArgumentTypeError, ValueError) as exc:
                raise UsageError(f"{args.config}: bad value for {key}: {exc}") from None
        else:
            raise UsageError(f"{args.config}: unknown key {key!r}")


def _config_from_args(args) -> RunConfig:
    if not args.problem:
        raise UsageError("--problem is required")
    try:
        spec = get_problem(args.problem)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    params = dict(args.param)
    unknown = set(params) - set(spec.params)
    if unknown:
        raise UsageError(f"{spec.id} has no parameter(s) {sorted(unknown)}")
    fields = dict(problem=spec.id, n=args.n, m=args.m, cfl=args.cfl, sigma=args.sigma,
                  delta=args.delta, residue_tol=args.tol, precision=args.precision,
                  params=params, out=args.out)
    if args.epsilon is not None:
        fields["epsilon"] = args.epsilon
    if args.max_iters is not None:
        fields["max_iters"] = args.max_iters
    if args.stagnation_window is not None:
        fields["stagnation_window"] = args.stagnation_window
    cfg = RunConfig(**fields)
    try:
        cfg.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return cfg


def _fmt(x: float) -> str:
    return "-" if math.isnan(x) else f"{x:.3e}"


def cmd_list() -> int:
    reverse = {v: k for k, v in ALIASES.items()}
    for pid, spec in PROBLEMS.items():
        alias = f" (alias {reverse[pid]})" if pid in reverse else ""
        params = ", ".join(f"{k}={v}" for k, v in spec.params.items())
        print(f"{pid}{alias}: {spec.dimension}D, {spec.title}; sigma={spec.sigma:g} "
              f"delta={spec.delta:g} cfl={spec.cfl:g}" + (f"; {params}" if params else ""))
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = _config_from_args(args)
    report = run_to_steady(cfg)
    rc = report.config
    grid = str(rc.n) if rc.m is None else f"{rc.n}x{rc.m}"
    print(f"problem {rc.problem} grid {grid}: {report.termination} after "
          f"{report.iterations} iterations, residue {report.initial_residue:.3e} -> "
          f"{report.final_residue:.3e} ({report.wall_time:.1f} s)")
    if report.diverged:
        print(f"diverged: {report.message}", file=sys.stderr)
        if cfg.out:
            emit_outputs(report, cfg.out)
        return EXIT_DIVERGED
    spec = get_problem(rc.problem)
    if spec.has_exact:
        l1, l2, linf = run_errors(report)
        print(f"errors: L1 {_fmt(l1)}  L2 {_fmt(l2)}  Linf {_fmt(linf)}")
    if rc.problem in ("burgers1d-interior-shock", "burgers1d-coupled-source",
                      "burgers2d-diagonal-shock"):
        print(f"steepest-gradient location: {shock_location(report):.4f}")
    if cfg.out:
        for path in emit_outputs(report, cfg.out):
            print(f"wrote {path}")
    return EXIT_OK


def cmd_convergence(args) -> int:
    cfg = _config_from_args(args)
    spec = get_problem(cfg.problem)
    if not spec.has_exact:
        raise UsageError(f"{spec.id} has no exact solution; a convergence study needs one")
    grids = args.grids or list(spec.grids)
    rows = convergence_study(spec.id, grids, cfg, out=cfg.out)
    print(f"{'N':>9} {'L1':>10} {'order':>6} {'L2':>10} {'order':>6} {'Linf':>10} {'order':>6}  status")
    for r in rows:
        orders = [("" if math.isnan(o) else f"{o:.2f}") for o in (r.l1_order, r.l2_order, r.linf_order)]
        print(f"{r.label:>9} {_fmt(r.l1):>10} {orders[0]:>6} {_fmt(r.l2):>10} {orders[1]:>6} "
              f"{_fmt(r.linf):>10} {orders[2]:>6}  {r.status}")
    return EXIT_DIVERGED if any(r.status == DIVERGED for r in rows) else EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        if args.command == "list":
            return cmd_list()
        if args.command is None:
            raise UsageError(parser.format_usage().strip())
        _merge_config(args)
        if args.command == "run":
            return cmd_run(args)
        return cmd_convergence(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main_entry() -> None:
    sys.exit(main())
