"""Command-line driver: ``gdtl check|norm|elab|run|props``.

Results go to stdout, diagnostics to stderr, and the exit code is a
function of the outcome category alone:

    0 ok   1 type error   2 runtime error   3 parse error
    4 fuel exhausted      5 property counterexample

Usage:
    gdtl check programs/head_nil.gdtl
    gdtl run programs/omega.gdtl --fuel 1000 --json
    gdtl props --seed 42 --count 100
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .config import FUEL_ENV_VAR, GdtlConfig
from .core import Context, pretty
from .enums import Status, Verdict
from .errors import FuelExhausted, GdtlTypeError, ParseError
from .evidence import (
    OutOfFuel,
    RuntimeErr,
    Value,
    elaborate_program,
    erase,
    run,
    trace,
)
from .harness import check_guarantees, read_header, safety_audit
from .static import Stuck, srun, ssynth
from .surface import parse_or_raise, resolve
from .typecheck import check_program

logger = logging.getLogger(__name__)


# =============================================================================
# Outcomes
# =============================================================================

@dataclass
class Outcome:
    """What one command produced.

    ``fields`` holds the JSON payload besides ``status``; ``text`` is the
    human-readable result for stdout and ``diagnostic`` the stderr line.
    """
    status: Status
    fields: dict = field(default_factory=dict)
    text: Optional[str] = None
    diagnostic: Optional[str] = None
    trace: list[str] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return self.status.exit_code

    def to_dict(self) -> dict:
        return {"status": self.status.value, **self.fields}


def emit_json(outcome: Outcome) -> str:
    """One JSON object: ``{status, type?, value?, error?, steps?, fuelUsed?}``."""
    return json.dumps(outcome.to_dict(), ensure_ascii=False, separators=(",", ":"))


def _parse_failure(path: str, exc: ParseError) -> Outcome:
    first = exc.diagnostics[0] if exc.diagnostics else None
    error = {"message": first.message if first else str(exc)}
    if first is not None:
        error.update(line=first.line, column=first.column)
    lines = [f"{path}:{d}" for d in exc.diagnostics] or [f"{path}: {exc}"]
    return Outcome(Status.PARSE_ERROR, {"error": error}, diagnostic="\n".join(lines))


def _type_failure(path: str, exc: GdtlTypeError, unicode: bool) -> Outcome:
    error: dict = {"message": exc.message}
    for key in ("expected", "actual"):
        value = getattr(exc, key)
        if value is not None:
            error[key] = value if isinstance(value, str) else pretty(value, unicode=unicode)
    where = path
    if exc.span is not None:
        error.update(line=exc.span.line, column=exc.span.column)
        where = f"{path}:{exc.span.line}:{exc.span.column}"
    return Outcome(Status.TYPE_ERROR, {"error": error},
                   diagnostic=f"{where}: type error: {exc.message}")


def _fuel_failure(fuel_used: int, what: str) -> Outcome:
    return Outcome(Status.FUEL, {"fuelUsed": fuel_used},
                   diagnostic=f"{what} fuel exhausted after {fuel_used} steps")


def _load(source: str, path: str):
    return resolve(parse_or_raise(source, path))


# =============================================================================
# Commands
# =============================================================================

def check_source(source: str, path: str, config: GdtlConfig) -> Outcome:
    """Typecheck a program and report the type of its main expression."""
    try:
        checked = check_program(_load(source, path), config.norm_fuel)
    except ParseError as exc:
        return _parse_failure(path, exc)
    except GdtlTypeError as exc:
        return _type_failure(path, exc, config.unicode_evidence)
    except FuelExhausted as exc:
        return _fuel_failure(exc.fuel_used, "normalization")
    ty = pretty(checked.ty, verbose=config.verbose_levels)
    return Outcome(Status.OK, {"type": ty}, text=ty)


def normalize_source(source: str, path: str, config: GdtlConfig) -> Outcome:
    """Typecheck a program and report its canonical normal form."""
    try:
        checked = check_program(_load(source, path), config.norm_fuel)
    except ParseError as exc:
        return _parse_failure(path, exc)
    except GdtlTypeError as exc:
        return _type_failure(path, exc, config.unicode_evidence)
    except FuelExhausted as exc:
        return _fuel_failure(exc.fuel_used, "normalization")
    value = pretty(checked.value, verbose=config.verbose_levels)
    ty = pretty(checked.ty, verbose=config.verbose_levels)
    return Outcome(Status.OK, {"type": ty, "value": value}, text=value)


def elaborate_source(source: str, path: str, config: GdtlConfig) -> Outcome:
    """Elaborate a program and report its evidence term."""
    try:
        et, ty = elaborate_program(_load(source, path), config.norm_fuel)
    except ParseError as exc:
        return _parse_failure(path, exc)
    except GdtlTypeError as exc:
        return _type_failure(path, exc, config.unicode_evidence)
    except FuelExhausted as exc:
        return _fuel_failure(exc.fuel_used, "normalization")
    value = pretty(et, verbose=config.verbose_levels, unicode=config.unicode_evidence)
    return Outcome(Status.OK, {"type": pretty(ty, verbose=config.verbose_levels), "value": value},
                   text=value)


def run_source(source: str, path: str, config: GdtlConfig,
               show_trace: bool = False) -> Outcome:
    """Elaborate and execute a program with ``config.fuel`` steps."""
    try:
        et, ty = elaborate_program(_load(source, path), config.norm_fuel)
    except ParseError as exc:
        return _parse_failure(path, exc)
    except GdtlTypeError as exc:
        return _type_failure(path, exc, config.unicode_evidence)
    except FuelExhausted as exc:
        return _fuel_failure(exc.fuel_used, "normalization")
    unicode = config.unicode_evidence
    lines: list[str] = []
    if show_trace:
        result = None
        for item in trace(et, config.fuel, config.norm_fuel):
            if isinstance(item, tuple):
                rule, state = item
                lines.append(f"{rule} | {pretty(state, unicode=unicode)}")
            else:
                result = item
    else:
        result = run(et, config.fuel, config.norm_fuel)
    if isinstance(result, Value):
        value = pretty(erase(result.term))
        lines.append(f"VALUE | {pretty(result.term, unicode=unicode)}")
        outcome = Outcome(Status.OK, {"type": pretty(ty), "value": value, "steps": result.steps},
                          text=value)
    elif isinstance(result, RuntimeErr):
        message = result.describe(unicode)
        lines.append(f"ERR | {message}")
        error = {}
        if result.left is not None and result.right is not None:
            error = {"left": pretty(result.left), "right": pretty(result.right)}
        outcome = Outcome(Status.RUNTIME_ERROR, {"error": error}, diagnostic=message)
    else:
        assert isinstance(result, OutOfFuel)
        lines.append(f"FUEL | {result.fuel_used}")
        outcome = _fuel_failure(result.fuel_used, "runtime")
    if show_trace:
        outcome.trace = lines
    return outcome


def static_check_source(source: str, path: str, config: GdtlConfig) -> Outcome:
    """``check`` through the static checker alone."""
    try:
        ty = ssynth(Context(), _load(source, path))
    except ParseError as exc:
        return _parse_failure(path, exc)
    except GdtlTypeError as exc:
        return _type_failure(path, exc, config.unicode_evidence)
    text = pretty(ty, verbose=config.verbose_levels)
    return Outcome(Status.OK, {"type": text}, text=text)


def static_run_source(source: str, path: str, config: GdtlConfig) -> Outcome:
    """``run`` through the static checker and the static stepper."""
    try:
        term = _load(source, path)
        ty = ssynth(Context(), term)
        result = srun(term, config.fuel)
    except ParseError as exc:
        return _parse_failure(path, exc)
    except GdtlTypeError as exc:
        return _type_failure(path, exc, config.unicode_evidence)
    except FuelExhausted as exc:
        return _fuel_failure(exc.fuel_used, "runtime")
    if isinstance(result, Stuck):
        message = f"stuck at {pretty(result.term)}"
        return Outcome(Status.RUNTIME_ERROR, {"error": {"message": message}}, diagnostic=message)
    value = pretty(result)
    return Outcome(Status.OK, {"type": pretty(ty), "value": value}, text=value)


def props(seed: int, count: int, config: GdtlConfig, fuel: Optional[int] = None,
          safety: bool = False) -> tuple[int, list[str]]:
    """Run the property harness; returns the exit code and the JSON report lines."""
    reports = check_guarantees(seed, count, fuel, config)
    if safety:
        reports += safety_audit(seed, count, fuel, config)
    found = any(r.verdict is Verdict.COUNTEREXAMPLE for r in reports)
    status = Status.COUNTEREXAMPLE if found else Status.OK
    return status.exit_code, [r.to_json() for r in reports]


# =============================================================================
# Argument parsing
# =============================================================================

class _Parser(argparse.ArgumentParser):
    """Usage errors exit like parse errors, keeping exit code 2 for runtime errors."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(Status.PARSE_ERROR.exit_code, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--fuel", type=int, default=None,
                        help="runtime step budget (default 100000, or $GDTL_FUEL)")
    common.add_argument("--norm-fuel", type=int, default=None,
                        help="eliminator unfoldings allowed while normalizing types (default 10000)")
    common.add_argument("-v", "--verbose", action="count", default=0,
                        help="log more (-v info, -vv debug)")
    common.add_argument("--verbose-levels", action="store_true",
                        help="print universe levels on arrows")
    common.add_argument("--ascii", action="store_true", help="print evidence as <U>")
    common.add_argument("--static", action="store_true", help=argparse.SUPPRESS)

    parser = _Parser(prog="gdtl", description="Gradual dependently-typed language")
    commands = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("check", "typecheck FILE and print the type of its main expression"),
        ("norm", "print the canonical normal form of FILE"),
        ("elab", "print the evidence term FILE elaborates to"),
        ("run", "execute FILE"),
    ):
        sub = commands.add_parser(name, parents=[common], help=text)
        sub.add_argument("file", type=Path)
        if name == "run":
            sub.add_argument("--trace", action="store_true",
                             help="print every step as `rule | term`")
    sub = commands.add_parser("props", parents=[common], help="run the property harness")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--count", type=int, default=100)
    sub.add_argument("--safety", action="store_true", help="also audit every machine state")
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(stream=sys.stderr, level=level,
                        format="%(levelname)s %(name)s: %(message)s")


def _config(args: argparse.Namespace) -> GdtlConfig:
    data = GdtlConfig.from_env().to_dict()
    if args.fuel is not None:
        data["fuel"] = args.fuel
    if args.norm_fuel is not None:
        data["norm_fuel"] = args.norm_fuel
    data["verbose_levels"] = args.verbose_levels
    data["unicode_evidence"] = not args.ascii
    return GdtlConfig.from_dict(data)


def _header_fuel(config: GdtlConfig, args: argparse.Namespace, source: str) -> GdtlConfig:
    """Use the program's ``-- fuel:`` header unless --fuel or GDTL_FUEL set a budget."""
    if args.fuel is not None or os.environ.get(FUEL_ENV_VAR):
        return config
    _, _, fuel = read_header(source)
    if fuel is None:
        return config
    data = config.to_dict()
    data["fuel"] = fuel
    return GdtlConfig.from_dict(data)


def _emit(outcome: Outcome, as_json: bool) -> int:
    if outcome.trace:
        print("\n".join(outcome.trace), file=sys.stderr if as_json else sys.stdout)
    if as_json:
        print(emit_json(outcome))
    elif outcome.text is not None:
        print(outcome.text)
    if outcome.diagnostic:
        print(outcome.diagnostic, file=sys.stderr)
    return outcome.exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point; returns the exit code."""
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    try:
        config = _config(args)
    except ValueError as exc:
        print(f"gdtl: {exc}", file=sys.stderr)
        return Status.PARSE_ERROR.exit_code

    if args.command == "props":
        code, lines = props(args.seed, args.count, config, args.fuel, args.safety)
        for line in lines:
            print(line)
        return code

    path = str(args.file)
    try:
        source = args.file.read_text(encoding="utf-8")
    except OSError as exc:
        print(f"{path}: cannot read: {exc.strerror or exc}", file=sys.stderr)
        return Status.PARSE_ERROR.exit_code
    config = _header_fuel(config, args, source)
    logger.info("%s %s (fuel %d, norm fuel %d)", args.command, path, config.fuel, config.norm_fuel)

    if args.static and args.command in ("check", "run"):
        command = static_check_source if args.command == "check" else static_run_source
        return _emit(command(source, path, config), args.json)
    if args.command == "check":
        outcome = check_source(source, path, config)
    elif args.command == "norm":
        outcome = normalize_source(source, path, config)
    elif args.command == "elab":
        outcome = elaborate_source(source, path, config)
    else:
        outcome = run_source(source, path, config, show_trace=args.trace)
    return _emit(outcome, args.json)


if __name__ == "__main__":
    sys.exit(main())
