"""Concrete syntax: parsing, numeral desugaring and name resolution.

A program is a list of declarations followed by an optional main
expression::

    -- comments run to the end of the line
    id : (A : Type 1) -> A -> A = fun A x => x;
    two = Succ (Succ Zero);
    id Nat two

Declarations are inlined at their use sites, so the resolved program is
one closed term. An annotated declaration ``d : T = t`` becomes
``(t :: T)``.
"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedInput, VisitError

from .core import (
    BUILTINS,
    App,
    Ascribe,
    Lam,
    Pi,
    Span,
    Succ,
    Term,
    TypeU,
    Unknown,
    Var,
    map_children,
    numeral,
    shift,
)
from .enums import Severity
from .errors import GdtlTypeError, ParseError

logger = logging.getLogger(__name__)


GRAMMAR = r"""
    program: (decl ";")* main?
    term: expr
    main: expr ";"?

    decl: NAME ":" expr "=" expr    -> typed_decl
        | NAME "=" expr             -> plain_decl

    ?expr: lam
         | ascr

    lam: "fun" NAME+ "=>" expr
       | "\\" NAME+ "." expr

    ?ascr: ascr "::" arrow          -> ascribe
         | arrow

    ?arrow: sum "->" arrow          -> fun_type
          | binder+ "->" arrow      -> dep_arrow
          | sum

    binder: "(" NAME+ ":" expr ")"

    ?sum: sum "+" INT               -> plus
        | app

    ?app: app atom                  -> apply
        | atom

    ?atom: NAME                     -> name
         | INT                      -> num
         | "?"                      -> unknown
         | "Type" INT               -> universe
         | "(" expr ")"

    NAME: /(?!(?:fun|Type)(?![A-Za-z0-9_']))[A-Za-z_][A-Za-z0-9_']*/
    COMMENT: /--[^\n]*/

    %import common.INT
    %import common.WS
    %ignore WS
    %ignore COMMENT
"""


# =============================================================================
# Surface-only nodes
# =============================================================================

@dataclass(frozen=True)
class Name(Term):
    """An identifier before resolution."""
    text: str


@dataclass(frozen=True)
class Numeral(Term):
    value: int


@dataclass(frozen=True)
class Plus(Term):
    """``t + n`` before desugaring."""
    term: Term
    amount: int


@dataclass(frozen=True)
class Declaration:
    name: str
    ty: Optional[Term]
    body: Term
    span: Optional[Span] = field(default=None, compare=False)


@dataclass(frozen=True)
class SourceFile:
    path: str
    contents: str
    declarations: tuple[Declaration, ...]
    main: Optional[Term] = None


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    message: str
    line: int
    column: int

    def __post_init__(self):
        if self.line < 1 or self.column < 1:
            raise ValueError(f"diagnostic position must be >= 1, got {self.line}:{self.column}")

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.severity.value}: {self.message}"


class _ZeroUniverse(Exception):
    def __init__(self, span: Span):
        self.span = span


# =============================================================================
# Parse tree -> surface terms
# =============================================================================

def _span(meta) -> Optional[Span]:
    if getattr(meta, "empty", True):
        return None
    return Span(meta.line, meta.column)


@v_args(meta=True)
class _ToTerm(Transformer):
    def name(self, meta, children):
        return Name(str(children[0]), span=_span(meta))

    def num(self, meta, children):
        return Numeral(int(children[0]), span=_span(meta))

    def unknown(self, meta, children):
        return Unknown(span=_span(meta))

    def universe(self, meta, children):
        level = int(children[0])
        if level < 1:
            raise _ZeroUniverse(_span(meta) or Span(1, 1))
        return TypeU(level, span=_span(meta))

    def apply(self, meta, children):
        fn, arg = children
        return App(fn, arg, span=_span(meta))

    def plus(self, meta, children):
        term, amount = children
        return Plus(term, int(amount), span=_span(meta))

    def ascribe(self, meta, children):
        term, ty = children
        return Ascribe(term, ty, span=_span(meta))

    def fun_type(self, meta, children):
        dom, cod = children
        return Pi("_", dom, cod, span=_span(meta))

    def binder(self, meta, children):
        *names, ty = children
        return [(str(n), ty) for n in names]

    def dep_arrow(self, meta, children):
        *groups, cod = children
        result = cod
        for name, ty in reversed([pair for group in groups for pair in group]):
            result = Pi(name, ty, result, span=_span(meta))
        return result

    def lam(self, meta, children):
        *names, body = children
        result = body
        for name in reversed(names):
            result = Lam(str(name), result, span=_span(meta))
        return result

    def typed_decl(self, meta, children):
        name, ty, body = children
        return Declaration(str(name), ty, body, _span(meta))

    def plain_decl(self, meta, children):
        name, body = children
        return Declaration(str(name), None, body, _span(meta))

    def term(self, meta, children):
        return children[0]

    def main(self, meta, children):
        return children[0]

    def program(self, meta, children):
        decls = tuple(c for c in children if isinstance(c, Declaration))
        mains = [c for c in children if isinstance(c, Term)]
        return decls, (mains[0] if mains else None)


@functools.cache
def _parser(start: str) -> Lark:
    return Lark(GRAMMAR, start=start, parser="earley", propagate_positions=True)


def _clamp(source: str, line: int, column: int) -> tuple[int, int]:
    if line < 1:
        lines = source.split("\n")
        return len(lines), len(lines[-1]) + 1
    return line, max(column, 1)


def _parse_tree(source: str, start: str):
    """Run the grammar; return the transformed tree or a diagnostic list."""
    try:
        tree = _parser(start).parse(source)
        return _ToTerm().transform(tree)
    except UnexpectedInput as exc:
        line, column = _clamp(source, getattr(exc, "line", -1), getattr(exc, "column", -1))
        message = "unexpected end of input" if getattr(exc, "line", -1) < 1 else _describe(exc)
        return [Diagnostic(Severity.ERROR, message, line, column)]
    except VisitError as exc:
        if isinstance(exc.orig_exc, _ZeroUniverse):
            span = exc.orig_exc.span
            return [Diagnostic(Severity.ERROR, "universe levels start at 1", span.line, span.column)]
        raise


def _describe(exc: UnexpectedInput) -> str:
    token = getattr(exc, "token", None)
    if isinstance(token, Token):
        if token.type == "$END":
            return "unexpected end of input"
        return f"unexpected {token.value!r}"
    char = getattr(exc, "char", None)
    if char is not None:
        return f"unexpected character {char!r}"
    return "syntax error"


# =============================================================================
# Public parsing API
# =============================================================================

def parse(source: str, path: str = "<input>") -> Union[SourceFile, list[Diagnostic]]:
    """Parse a program.

    Args:
        source: Program text
        path: File name recorded in the result

    Returns:
        The parsed file, or the diagnostics explaining why it failed
    """
    result = _parse_tree(source, "program")
    if isinstance(result, list):
        return result
    decls, main = result
    seen: dict[str, Declaration] = {}
    for decl in decls:
        if decl.name in seen:
            span = decl.span or Span(1, 1)
            return [Diagnostic(Severity.ERROR, f"duplicate declaration {decl.name!r}",
                               span.line, span.column)]
        seen[decl.name] = decl
    return SourceFile(path, source, decls, main)


def parse_or_raise(source: str, path: str = "<input>") -> SourceFile:
    result = parse(source, path)
    if isinstance(result, list):
        raise ParseError(result)
    return result


def desugar_numerals(t: Term) -> Term:
    """Replace numerals and ``t + n`` with ``Succ`` chains."""
    if isinstance(t, Numeral):
        return numeral(t.value)
    if isinstance(t, Plus):
        result = desugar_numerals(t.term)
        for _ in range(t.amount):
            result = Succ(result, span=t.span)
        return result
    return map_children(t, lambda child, bound: desugar_numerals(child))


# =============================================================================
# Resolution
# =============================================================================

class _Resolver:
    def __init__(self, definitions: dict[str, Term], depth: int = 0):
        # definitions are resolved over the first `depth` names of every scope
        self.definitions = definitions
        self.depth = depth

    def resolve(self, t: Term, scope: tuple[str, ...]) -> Term:
        match t:
            case Name() | App():
                return self.spine(t, scope)
            case Lam(name=name, body=body):
                return Lam(name, self.resolve(body, scope + (name,)), span=t.span)
            case Pi(name=name, dom=dom, cod=cod):
                return Pi(name, self.resolve(dom, scope), self.resolve(cod, scope + (name,)), span=t.span)
        return map_children(t, lambda child, bound: self.resolve(child, scope))

    def spine(self, t: Term, scope: tuple[str, ...]) -> Term:
        args = []
        head = t
        while isinstance(head, App):
            args.append(head.arg)
            head = head.fn
        args.reverse()
        resolved_args = [self.resolve(a, scope) for a in args]
        if isinstance(head, Name):
            result, used = self.name(head, resolved_args, scope)
        else:
            result, used = self.resolve(head, scope), 0
        for arg in resolved_args[used:]:
            result = App(result, arg, span=t.span)
        return result

    def name(self, head: Name, args: list[Term], scope: tuple[str, ...]) -> tuple[Term, int]:
        text = head.text
        if text != "_" and text in scope:
            return Var(scope[::-1].index(text), text, span=head.span), 0
        if text in self.definitions:
            return shift(self.definitions[text], len(scope) - self.depth), 0
        builtin = BUILTINS.get(text)
        if builtin is None:
            raise GdtlTypeError(f"unbound name {text!r}", span=head.span)
        if len(args) < builtin.arity:
            raise GdtlTypeError(
                f"{text} expects {builtin.arity} arguments, got {len(args)}",
                expected=builtin.signature, span=head.span,
            )
        return builtin.term_cls(*args[:builtin.arity], span=head.span), builtin.arity


def resolve(source_file: SourceFile, names: tuple[str, ...] = ()) -> Term:
    """Inline declarations and turn names into de Bruijn indices.

    Args:
        source_file: A parsed program
        names: Free variables available to the program, outermost first

    Returns:
        The main expression as one closed term (or open over ``names``)

    Raises:
        GdtlTypeError: for unbound names and under-applied builtins
        ParseError: when the file has neither a main expression nor declarations
    """
    definitions: dict[str, Term] = {}
    resolver = _Resolver(definitions, len(names))
    last = None
    for decl in source_file.declarations:
        body = desugar_numerals(decl.body)
        term = resolver.resolve(body, tuple(names))
        if decl.ty is not None:
            ty = resolver.resolve(desugar_numerals(decl.ty), tuple(names))
            term = Ascribe(term, ty, span=decl.span)
        logger.debug("inlined declaration %s", decl.name)
        definitions[decl.name] = term
        last = term
    if source_file.main is not None:
        return resolver.resolve(desugar_numerals(source_file.main), tuple(names))
    if "main" in definitions:
        return definitions["main"]
    if last is None:
        raise ParseError([Diagnostic(Severity.ERROR, "program has no main expression", 1, 1)])
    return last


def parse_term(text: str, names: tuple[str, ...] = ()) -> Term:
    """Parse and resolve a single expression.

    Raises:
        ParseError: when ``text`` is not an expression
        GdtlTypeError: for unbound names and under-applied builtins
    """
    result = _parse_tree(text, "term")
    if isinstance(result, list):
        raise ParseError(result)
    return _Resolver({}).resolve(desugar_numerals(result), tuple(names))


def parse_program(source: str, path: str = "<input>") -> Term:
    """Parse a whole program and resolve it to its main term."""
    return resolve(parse_or_raise(source, path))


def load_program(path: Union[str, Path]) -> Term:
    path = Path(path)
    return parse_program(path.read_text(encoding="utf-8"), str(path))
