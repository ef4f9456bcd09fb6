"""Exception types raised by the GDTL pipeline.

Runtime type errors are not exceptions: the evaluator reports them as
``RuntimeErr`` results. Everything here signals that a program was
rejected or a budget ran out.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Any, Optional

if TYPE_CHECKING:
    from .core import Span
    from .surface import Diagnostic


class GdtlError(Exception):
    """Base class for all errors raised on purpose by gdtl."""


class ParseError(GdtlError):
    """Source text could not be parsed or resolved."""

    def __init__(self, diagnostics: list["Diagnostic"]):
        self.diagnostics = list(diagnostics)
        first = self.diagnostics[0] if self.diagnostics else None
        if first is None:
            message = "parse error"
        else:
            message = f"{first.line}:{first.column}: {first.message}"
        super().__init__(message)


class GdtlTypeError(GdtlError):
    """A term failed to typecheck.

    Attributes:
        expected: The type the context required, if there was one
        actual: The type that was found, if one was synthesized
        span: Source position of the offending term, when known
    """

    def __init__(
        self,
        message: str,
        expected: Any = None,
        actual: Any = None,
        span: Optional["Span"] = None,
    ):
        self.message = message
        self.expected = expected
        self.actual = actual
        self.span = span
        super().__init__(self._render())

    def _render(self) -> str:
        text = self.message
        if self.span is not None:
            text = f"{self.span.line}:{self.span.column}: {text}"
        return text

    def with_span(self, span: Optional["Span"]) -> "GdtlTypeError":
        """Attach a position if the error does not have one yet."""
        if self.span is None and span is not None:
            self.span = span
            self.args = (self._render(),)
        return self


class FuelExhausted(GdtlError):
    """An evaluation budget ran out before a result was reached."""

    def __init__(self, fuel_used: int):
        self.fuel_used = fuel_used
        super().__init__(f"fuel exhausted after {fuel_used} steps")


class StuckError(GdtlError):
    """A runtime state that is neither a value, an error, nor steppable."""
