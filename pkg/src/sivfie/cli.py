"""Command-line entry point.

Exit codes: 0 success, 1 I/O or self-test failure, 2 singular system,
3 invalid configuration or arguments.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .basis import build_basis, normalize_kind
from .harness import (
    DIAGONAL_POINTS,
    ReportError,
    absolute_errors,
    compare_bases,
    emit_report,
    render,
    run_trials,
)
from .problems import problem_from_config
from .selftest import run_selftest
from .solver import SingularSystem, solve_sivfie
from .stochastic import DEFAULT_GRID, sample_brownian_path

EXIT_OK, EXIT_IO, EXIT_SINGULAR, EXIT_CONFIG = 0, 1, 2, 3

DEFAULTS = {
    "problem": "1",
    "basis": "chelyshkov",
    "N": 2,
    "seed": 0,
    "seed0": 0,
    "n": 10,
    "grid": DEFAULT_GRID,
    "format": "csv",
    "out": None,
    "literal_ito": False,
}


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _common(p, *, basis=True, n=False, seed_name="seed"):
    p.add_argument("--config", help="JSON file whose keys mirror the flags")
    p.add_argument("--problem", help="built-in problem: 1 or 2")
    if basis:
        p.add_argument("--basis", help="chelyshkov or slp")
    p.add_argument("--N", type=int, help="basis degree")
    p.add_argument(f"--{seed_name}", type=int, help="64-bit seed")
    if n:
        p.add_argument("--n", type=int, help="number of trials")
    p.add_argument("--grid", type=int, help="Brownian grid size M (power of two)")
    p.add_argument("--out", help="output file")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--literal-ito", dest="literal_ito", action="store_const", const=True,
                   help="problem 2: Ito term without the f(s,t) factor")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sivfie", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _common(sub.add_parser("solve", help="solve one realisation"))
    _common(sub.add_parser("trials", help="Monte-Carlo statistics"), n=True,
            seed_name="seed0")
    _common(sub.add_parser("compare", help="Chelyshkov vs shifted Legendre"), basis=False)
    sub.add_parser("selftest", help="run the invariant checks")
    return parser


def _resolve(args) -> dict:
    cfg = {}
    if getattr(args, "config", None):
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(cfg) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    opts = dict(DEFAULTS)
    opts.update(cfg)
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            opts[key] = value
    if opts["out"] is None:
        raise ConfigError("an output path is required (--out)")
    try:
        opts["basis"] = normalize_kind(str(opts["basis"]))
        for key in ("N", "seed", "seed0", "n", "grid"):
            opts[key] = int(opts[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    if opts["N"] < 0 or opts["n"] < 2 or opts["seed"] < 0 or opts["seed0"] < 0:
        raise ConfigError("N >= 0, n >= 2 and nonnegative seeds are required")
    grid = opts["grid"]
    if grid < 2 or grid & (grid - 1):
        raise ConfigError(f"grid must be a power of two >= 2, got {grid}")
    if opts["format"] not in ("csv", "json"):
        raise ConfigError(f"unknown format {opts['format']!r}")
    try:
        problem = problem_from_config(opts["problem"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid problem definition: {exc}") from exc
    if opts["literal_ito"]:
        from dataclasses import replace
        problem = replace(problem, ito_acts_on_solution=False)
    opts["problem_spec"] = problem
    return opts


def _solve(opts) -> None:
    problem = opts["problem_spec"]
    basis = build_basis(opts["basis"], opts["N"])
    path = sample_brownian_path(opts["grid"], opts["seed"])
    result = solve_sivfie(problem, basis, path)
    if problem.exact is not None:
        table = absolute_errors(result, problem)
        print(f"MAE over diagonal points: {table.mae:.6e}")
    else:
        table = None
    if opts["format"] == "json":
        payload = {
            "problem": problem.name, "basis": basis.kind, "N": basis.degree,
            "seed": path.seed, "grid": path.M, "F": [float(x) for x in result.F],
            "residual_norm": result.residual_norm,
            "table": table.to_dict() if table else None,
        }
        text = render(payload, "json")
        _write(opts["out"], text)
    elif table is not None:
        emit_report(table, "csv", opts["out"])
    else:
        pts = np.asarray(DIAGONAL_POINTS, dtype=float)
        rows = ["zeta,eta,approx,exact,abs_error"]
        for (z, e) in pts:
            rows.append(f"{z!r},{e!r},{float(result(z, e))!r},,")
        _write(opts["out"], "\n".join(rows) + "\n")


def _write(dest, text):
    try:
        Path(dest).write_text(text)
    except OSError as exc:
        raise ReportError(f"cannot write report to {dest}: {exc}") from exc


def _trials(opts) -> None:
    stats = run_trials(opts["problem_spec"], opts["basis"], opts["N"], opts["n"],
                       opts["seed0"], opts["grid"])
    print(f"mean {stats.mean:.6e}  sd {stats.sd:.6e}  "
          f"95% CI [{stats.ci_lo:.6e}, {stats.ci_hi:.6e}]")
    emit_report(stats, opts["format"], opts["out"])


def _compare(opts) -> None:
    cmp = compare_bases(opts["problem_spec"], opts["N"], opts["seed"], opts["grid"])
    print(f"MAE chelyshkov {cmp.chelyshkov.mae:.6e}  slp {cmp.slp.mae:.6e}")
    emit_report(cmp, opts["format"], opts["out"])


COMMANDS = {"solve": _solve, "trials": _trials, "compare": _compare}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "selftest":
            return EXIT_OK if run_selftest() else EXIT_IO
        opts = _resolve(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    start = time.perf_counter()
    try:
        COMMANDS[args.command](opts)
    except SingularSystem as exc:
        print(f"error: {exc} (seed {exc.seed})", file=sys.stderr)
        return EXIT_SINGULAR
    except ReportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    # wall-clock goes to stderr only, so output files stay reproducible
    print(f"elapsed {time.perf_counter() - start:.3f} s", file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
