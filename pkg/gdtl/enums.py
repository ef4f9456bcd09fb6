"""Enumeration types shared across the GDTL pipeline."""

from enum import Enum


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


class Status(Enum):
    """Outcome category of one CLI or tool invocation."""
    OK = "ok"
    TYPE_ERROR = "type"
    RUNTIME_ERROR = "err"
    PARSE_ERROR = "parse"
    FUEL = "fuel"
    COUNTEREXAMPLE = "counterexample"

    @property
    def exit_code(self) -> int:
        return _EXIT_CODES[self]


_EXIT_CODES = {
    Status.OK: 0,
    Status.TYPE_ERROR: 1,
    Status.RUNTIME_ERROR: 2,
    Status.PARSE_ERROR: 3,
    Status.FUEL: 4,
    Status.COUNTEREXAMPLE: 5,
}


class Property(Enum):
    """Metatheory properties checked by the harness."""
    STATIC = "static"
    NORMALIZATION = "normalization"
    DYNAMIC = "dynamic"
    CONSERVATIVE = "conservative"
    SAFETY = "safety"


class Verdict(Enum):
    OK = "ok"
    COUNTEREXAMPLE = "counterexample"
    SKIPPED = "skipped"
