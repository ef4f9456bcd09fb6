"""The fully static fragment: no ``?``, no inductives.

This is the baseline the gradual language must conservatively extend.
It has its own checker (equality instead of consistency), its own
hereditary substitution without approximation, and a plain
call-by-value stepper in which ascriptions are simply dropped.

``untyped_eval`` is a separate untyped call-by-value interpreter with
its own substitution; it shares nothing with the gradual runtime, so it
can serve as a differential oracle for embedded untyped programs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Union

from .core import (
    App,
    Ascribe,
    Atomic,
    Canonical,
    CLam,
    Context,
    CPi,
    CType,
    Lam,
    Level,
    Node,
    Pi,
    Term,
    TypeU,
    Unknown,
    Var,
    level_max,
    map_children,
    pretty,
    shift,
    subst,
)
from .errors import FuelExhausted, GdtlTypeError, StuckError
from .normalize import eta_expand

logger = logging.getLogger(__name__)

_STATIC_FORMS = (Var, Lam, App, Pi, TypeU, Ascribe)


def is_static(t: Node) -> bool:
    """True when ``t`` uses only variables, functions, arrows, universes and ascriptions."""
    if not isinstance(t, _STATIC_FORMS):
        return False
    return all(is_static(child) for child, _ in _term_children(t))


def _term_children(t: Term):
    match t:
        case Lam(body=body):
            return [(body, 1)]
        case App(fn=fn, arg=arg):
            return [(fn, 0), (arg, 0)]
        case Pi(dom=dom, cod=cod):
            return [(dom, 0), (cod, 1)]
        case Ascribe(term=term, ty=ty):
            return [(term, 0), (ty, 0)]
    return []


# =============================================================================
# Static hereditary substitution
# =============================================================================

def shsub(v: Canonical, index: int, X: Optional[Canonical], target: Node) -> Node:
    """Hereditary substitution without approximation.

    Terminates on statically well-typed inputs; ``X`` (the type of the
    substituted variable) types each redex it creates.
    """
    if isinstance(target, Atomic):
        spine = tuple(shsub(v, index, X, entry) for entry in target.spine)
        if target.index != index:
            new_index = target.index if target.index < index else target.index - 1
            return Atomic(new_index, spine, target.name)
        result = shift(v, index)
        ty = shift(X, index) if X is not None else None
        for arg in spine:
            result, ty = _sapply(result, ty, arg)
        return result
    return map_children(target, lambda child, bound: shsub(v, index + bound, X, child))


def _sapply(fn: Canonical, fn_ty: Optional[Canonical], arg: Canonical):
    arg_ty = fn_ty.dom if isinstance(fn_ty, CPi) else None
    result_ty = shsub(arg, 0, arg_ty, fn_ty.cod) if isinstance(fn_ty, CPi) else None
    if isinstance(fn, CLam):
        return shsub(arg, 0, arg_ty, fn.body), result_ty
    if isinstance(fn, Atomic):
        return Atomic(fn.index, fn.spine + (arg,), fn.name), result_ty
    raise ValueError(f"cannot apply {type(fn).__name__} in the static fragment")


# =============================================================================
# Static typing
# =============================================================================

class StaticChecker:
    """Bidirectional checking for the static fragment, returning normal forms."""

    def _not_static(self, t: Term) -> GdtlTypeError:
        return GdtlTypeError(f"{type(t).__name__} is not part of the static language", span=t.span)

    def synth(self, ctx: Context, t: Term) -> tuple[Canonical, Canonical]:
        try:
            return self._synth(ctx, t)
        except GdtlTypeError as exc:
            raise exc.with_span(t.span)

    def check(self, ctx: Context, t: Term, U: Canonical) -> Canonical:
        try:
            return self._check(ctx, t, U)
        except GdtlTypeError as exc:
            raise exc.with_span(t.span)

    def type_level(self, ctx: Context, T: Term) -> tuple[Canonical, Level]:
        u, S = self.synth(ctx, T)
        if not isinstance(S, CType):
            raise GdtlTypeError(
                f"expected a type, got a term of type {pretty(S, ctx.names)}", actual=S,
            )
        return u, S.level

    def _synth(self, ctx: Context, t: Term) -> tuple[Canonical, Canonical]:
        match t:
            case Var(index=i, name=name):
                U = ctx.lookup(i)
                return eta_expand(i, U, name), U
            case TypeU(level=level):
                return CType(level), CType(level + 1)
            case Ascribe(term=term, ty=ty):
                U, _ = self.type_level(ctx, ty)
                return self.check(ctx, term, U), U
            case App(fn=fn, arg=arg):
                uf, Uf = self.synth(ctx, fn)
                if not isinstance(Uf, CPi):
                    raise GdtlTypeError(
                        f"expected a function, got a term of type {pretty(Uf, ctx.names)}",
                        actual=Uf, span=fn.span,
                    )
                ua = self.check(ctx, arg, Uf.dom)
                value, _ = _sapply(uf, Uf, ua)
                return value, shsub(ua, 0, Uf.dom, Uf.cod)
            case Pi(name=name, dom=A, cod=B):
                UA, i = self.type_level(ctx, A)
                UB, j = self.type_level(ctx.extend(name, UA), B)
                level = level_max(i, j)
                return CPi(name, UA, UB, level), CType(level)
            case Lam():
                raise GdtlTypeError("cannot infer the type of a function; add an ascription")
        raise self._not_static(t)

    def _check(self, ctx: Context, t: Term, U: Canonical) -> Canonical:
        match t, U:
            case Lam(name=name, body=body), CPi(dom=A, cod=B):
                return CLam(name, self.check(ctx.extend(name, A), body, B))
            case Lam(), _:
                raise GdtlTypeError(
                    f"expected a term of type {pretty(U, ctx.names)}, found a function",
                    expected=U,
                )
            case Pi(name=name, dom=A, cod=B), CType(level=level):
                uA = self.check(ctx, A, U)
                return CPi(name, uA, self.check(ctx.extend(name, uA), B, U), level)
        u, S = self.synth(ctx, t)
        if S == U or (isinstance(S, CType) and isinstance(U, CType) and S.level <= U.level):
            return u
        raise GdtlTypeError(
            f"type mismatch: expected {pretty(U, ctx.names)}, got {pretty(S, ctx.names)}",
            expected=U, actual=S,
        )


def ssynth(ctx: Context, t: Term) -> Canonical:
    """The static type of ``t``; raises GdtlTypeError outside the fragment."""
    return StaticChecker().synth(ctx, t)[1]


def scheck(ctx: Context, t: Term, U: Canonical) -> None:
    StaticChecker().check(ctx, t, U)


# =============================================================================
# Static evaluation
# =============================================================================

@dataclass(frozen=True)
class Stuck:
    """No step applies; ``value`` tells a finished term from a stuck one."""
    term: Term
    value: bool


def _is_svalue(t: Term) -> bool:
    return isinstance(t, (Lam, Pi, TypeU))


def sstep(t: Term) -> Union[Term, Stuck]:
    """One call-by-value step, left to right; ascriptions on values are dropped."""
    if _is_svalue(t):
        return Stuck(t, True)
    match t:
        case Ascribe(term=term):
            if _is_svalue(term):
                return term
            inner = sstep(term)
            if isinstance(inner, Stuck):
                return Stuck(t, False)
            return Ascribe(inner, t.ty, span=t.span)
        case App(fn=fn, arg=arg):
            if not _is_svalue(fn):
                inner = sstep(fn)
                return Stuck(t, False) if isinstance(inner, Stuck) else App(inner, arg, span=t.span)
            if not _is_svalue(arg):
                inner = sstep(arg)
                return Stuck(t, False) if isinstance(inner, Stuck) else App(fn, inner, span=t.span)
            if isinstance(fn, Lam):
                return subst(fn.body, arg)
    return Stuck(t, False)


def srun(t: Term, fuel: int) -> Union[Term, Stuck]:
    """Step ``t`` to a value.

    Returns:
        The value, or ``Stuck`` with ``value=False`` for a stuck state

    Raises:
        FuelExhausted: after ``fuel`` steps without reaching either
    """
    for _ in range(fuel):
        result = sstep(t)
        if isinstance(result, Stuck):
            return result.term if result.value else result
        t = result
    if _is_svalue(t):
        return t
    raise FuelExhausted(fuel)


def strip_ascriptions(t: Term) -> Term:
    if isinstance(t, Ascribe):
        return strip_ascriptions(t.term)
    return map_children(t, lambda child, bound: strip_ascriptions(child))


# =============================================================================
# Embeddings
# =============================================================================

def embed_static(t: Term) -> Term:
    """Static terms are gradual terms as they stand."""
    if not is_static(t):
        raise ValueError(f"{type(t).__name__} term is not static")
    return t


def untyped_embed(t: Term) -> Term:
    """Ascribe every function in an untyped term to ``?``."""
    match t:
        case Var():
            return t
        case Lam(name=name, body=body):
            return Ascribe(Lam(name, untyped_embed(body), span=t.span), Unknown(), span=t.span)
        case App(fn=fn, arg=arg):
            return App(untyped_embed(fn), untyped_embed(arg), span=t.span)
    raise ValueError(f"untyped terms are built from variables, functions and applications, "
                     f"not {type(t).__name__}")


# =============================================================================
# Untyped oracle
# =============================================================================

def _ushift(t: Term, amount: int, cutoff: int) -> Term:
    if isinstance(t, Var):
        return Var(t.index + amount, t.name) if t.index >= cutoff else t
    if isinstance(t, Lam):
        return Lam(t.name, _ushift(t.body, amount, cutoff + 1))
    return App(_ushift(t.fn, amount, cutoff), _ushift(t.arg, amount, cutoff))


def _usubst(t: Term, value: Term, depth: int) -> Term:
    if isinstance(t, Var):
        if t.index == depth:
            return _ushift(value, depth, 0)
        return Var(t.index - 1, t.name) if t.index > depth else t
    if isinstance(t, Lam):
        return Lam(t.name, _usubst(t.body, value, depth + 1))
    return App(_usubst(t.fn, value, depth), _usubst(t.arg, value, depth))


def untyped_eval(t: Term, fuel: int) -> Term:
    """Call-by-value evaluation of a closed untyped term.

    Raises:
        FuelExhausted: after ``fuel`` beta steps
        StuckError: on a free variable in head position
    """
    spent = 0

    def go(term: Term) -> Term:
        nonlocal spent
        while isinstance(term, App):
            fn, arg = go(term.fn), go(term.arg)
            if not isinstance(fn, Lam):
                raise StuckError(f"cannot apply {type(fn).__name__}")
            spent += 1
            if spent > fuel:
                raise FuelExhausted(fuel)
            term = _usubst(fn.body, arg, 0)
        if isinstance(term, Var):
            raise StuckError(f"free variable #{term.index}")
        return term

    return go(t)
