"""GDTL MCP Server: typecheck, normalize, elaborate and run programs as tools.

Usage:
    claude mcp add --transport stdio gdtl -- python -m gdtl.mcp
"""

import logging
from contextlib import asynccontextmanager
from typing import Optional

from fastmcp import FastMCP

from gdtl.cli import (
    check_source,
    elaborate_source,
    normalize_source,
    run_source,
)
from gdtl.config import GdtlConfig
from gdtl.enums import Verdict
from gdtl.harness import check_guarantees

logger = logging.getLogger(__name__)

# Global configuration, initialized during lifespan
_config: Optional[GdtlConfig] = None


@asynccontextmanager
async def lifespan(server):
    """Read GDTL_FUEL into the server's configuration."""
    global _config
    _config = GdtlConfig.from_env()
    try:
        yield
    finally:
        _config = None


mcp = FastMCP(
    "gdtl",
    instructions=(
        "GDTL is a gradual dependently-typed language. Use these tools to typecheck, "
        "normalize, elaborate and run GDTL programs, and to check the gradual "
        "guarantees on generated programs. `?` may be used as a type or a term."
    ),
    lifespan=lifespan,
)


def _get_config() -> GdtlConfig:
    """Get the active configuration, raising if not initialized."""
    if _config is None:
        raise RuntimeError("GDTL config not initialized: server lifespan not started")
    return _config


def _with_fuel(fuel: int | None) -> GdtlConfig:
    config = _get_config()
    if fuel is None:
        return config
    return GdtlConfig.from_dict({**config.to_dict(), "fuel": fuel})


# ============================================================================
# PROGRAM TOOLS
# ============================================================================


@mcp.tool
def check_program(source: str) -> dict:
    """Typecheck a program and return the type of its main expression.

    Args:
        source: Program text: declarations `name : T = t;` followed by an expression.

    Returns:
        {"status": "ok", "type": ...}, or {"status": "type"|"parse", "error": {...}}.
    """
    logger.info("check_program (%d chars)", len(source))
    return check_source(source, "<tool>", _get_config()).to_dict()


@mcp.tool
def normalize_program(source: str) -> dict:
    """Return the canonical normal form of a program's main expression.

    Normalization is approximate: where exact evaluation could diverge or
    fail, the result contains `?`.

    Args:
        source: Program text.

    Returns:
        {"status": "ok", "type": ..., "value": ...} or an error object.
    """
    logger.info("normalize_program (%d chars)", len(source))
    return normalize_source(source, "<tool>", _get_config()).to_dict()


@mcp.tool
def elaborate_program(source: str) -> dict:
    """Return the evidence term a program elaborates to.

    Args:
        source: Program text.

    Returns:
        {"status": "ok", "type": ..., "value": ...} with `⟨U⟩ e` evidence wrappers.
    """
    logger.info("elaborate_program (%d chars)", len(source))
    return elaborate_source(source, "<tool>", _get_config()).to_dict()


@mcp.tool
def run_program(source: str, fuel: int | None = None, trace: bool = False) -> dict:
    """Run a program to a value, a runtime type error, or fuel exhaustion.

    Args:
        source: Program text.
        fuel: Step budget; defaults to the server configuration.
        trace: Include every step as "rule | term" lines.

    Returns:
        {"status": "ok", "value": ..., "steps": n}, {"status": "err", "error": {"left", "right"}},
        or {"status": "fuel", "fuelUsed": n}.
    """
    logger.info("run_program (%d chars, fuel %s)", len(source), fuel)
    if fuel is not None and fuel < 0:
        return {"status": "parse", "error": {"message": f"fuel must be non-negative, got {fuel}"}}
    outcome = run_source(source, "<tool>", _with_fuel(fuel), show_trace=trace)
    result = outcome.to_dict()
    if trace:
        result["trace"] = outcome.trace
    return result


# ============================================================================
# HARNESS AND CONFIGURATION TOOLS
# ============================================================================


@mcp.tool
def check_properties(seed: int = 0, count: int = 20, fuel: int | None = None) -> dict:
    """Check the gradual guarantees on generated programs.

    Args:
        seed: First case seed; case i uses seed + i.
        count: Number of generated programs.
        fuel: Step budget per program run; defaults to the configured property fuel.

    Returns:
        Dict with "status" ("ok" or "counterexample") and the failing "reports".
    """
    logger.info("check_properties seed=%d count=%d", seed, count)
    reports = check_guarantees(seed, count, fuel, _get_config())
    failing = [r.to_dict() for r in reports if r.verdict is Verdict.COUNTEREXAMPLE]
    return {
        "status": "counterexample" if failing else "ok",
        "cases": count,
        "reports": failing,
    }


@mcp.tool
def get_config() -> dict:
    """Return the current budgets and printing settings."""
    return _get_config().to_dict()


@mcp.tool
def configure(preset: str | None = None, fuel: int | None = None,
              norm_fuel: int | None = None) -> dict:
    """Change the server's budgets.

    Args:
        preset: Optional preset name: "default", "quick", "thorough".
                Applied before the individual overrides.
        fuel: Runtime step budget.
        norm_fuel: Eliminator unfoldings allowed while normalizing types.

    Returns:
        Dict with the resulting configuration, or an error.
    """
    global _config
    base = _get_config()
    if preset:
        presets = {
            "default": GdtlConfig.default,
            "quick": GdtlConfig.quick,
            "thorough": GdtlConfig.thorough,
        }
        factory = presets.get(preset)
        if factory is None:
            return {"error": f"Unknown preset '{preset}'. Options: {list(presets.keys())}"}
        base = factory()
    data = base.to_dict()
    if fuel is not None:
        data["fuel"] = fuel
    if norm_fuel is not None:
        data["norm_fuel"] = norm_fuel
    try:
        _config = GdtlConfig.from_dict(data)
    except ValueError as exc:
        return {"error": str(exc)}
    return _config.to_dict()
