"""Gradual bidirectional typechecking.

``synth`` and ``check`` are the typing judgments for source terms. They
run the approximate normalizer, since a dependent typechecker has to
normalize the arguments it substitutes into types.

``check_canonical`` is the typing judgment for normal forms. It accepts
only eta-long forms and is what the preservation tests run every
normalizer output through.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Union

from .core import (
    Atomic,
    Canonical,
    CCons,
    CEq,
    CLam,
    CNat,
    CNil,
    Context,
    CPi,
    CRefl,
    CSucc,
    CType,
    CUnknown,
    CVec,
    CZero,
    EqElimF,
    Frame,
    NatElimF,
    Term,
    VecElimF,
    pretty,
)
from .errors import GdtlTypeError
from .gradops import consistent, dom
from .normalize import DEFAULT_NORM_FUEL, Normalizer, cumulative
from .surface import SourceFile, resolve

logger = logging.getLogger(__name__)


# =============================================================================
# Source terms
# =============================================================================

def synth(ctx: Context, t: Term, norm_fuel: int = DEFAULT_NORM_FUEL) -> Canonical:
    """The type ``t`` synthesizes in ``ctx``.

    Raises:
        GdtlTypeError: when ``t`` is ill-typed
        FuelExhausted: when eliminators in types unfold past ``norm_fuel``
    """
    _, ty = Normalizer(norm_fuel).synth(ctx, t)
    return ty


def check(ctx: Context, t: Term, U: Canonical, norm_fuel: int = DEFAULT_NORM_FUEL) -> None:
    """Check ``t`` against ``U``; raises GdtlTypeError on failure."""
    Normalizer(norm_fuel).check(ctx, t, U)


@dataclass(frozen=True)
class Checked:
    """A closed program that typechecked."""
    term: Term
    ty: Canonical
    value: Canonical


def check_program(program: Union[SourceFile, Term],
                  norm_fuel: int = DEFAULT_NORM_FUEL) -> Checked:
    """Resolve (if needed) and typecheck a whole program.

    Returns:
        The resolved main term with its type and normal form
    """
    term = resolve(program) if isinstance(program, SourceFile) else program
    value, ty = Normalizer(norm_fuel).synth(Context(), term)
    logger.debug("program synthesizes %s", pretty(ty))
    return Checked(term, ty, value)


def normalize_program(program: Union[SourceFile, Term],
                      norm_fuel: int = DEFAULT_NORM_FUEL) -> Canonical:
    return check_program(program, norm_fuel).value


# =============================================================================
# Canonical forms
# =============================================================================

class _CanonicalChecker:
    def __init__(self, norm_fuel: int):
        self.norm = Normalizer(norm_fuel)

    def fail(self, ctx: Context, u, message: str, expected=None, actual=None):
        raise GdtlTypeError(
            f"{message}: {pretty(u, ctx.names)}", expected=expected, actual=actual,
        )

    def check_type(self, ctx: Context, U: Canonical) -> None:
        """``U`` is a type at some level, or ``?``."""
        match U:
            case CUnknown() | CType() | CNat():
                return
            case CPi(name=name, dom=A, cod=B):
                self.check_type(ctx, A)
                self.check_type(ctx.extend(name, A), B)
            case CVec(elem=A, length=n):
                self.check_type(ctx, A)
                self.check(ctx, n, CNat())
            case CEq(ty=A, lhs=x, rhs=y):
                self.check_type(ctx, A)
                self.check(ctx, x, A)
                self.check(ctx, y, A)
            case Atomic():
                S = self.synth_atomic(ctx, U)
                if not isinstance(S, (CType, CUnknown)):
                    self.fail(ctx, U, "not a type", actual=S)
            case _:
                self.fail(ctx, U, "not a type")

    def check(self, ctx: Context, u: Canonical, U: Canonical) -> None:
        match u, U:
            case CUnknown(), _:
                return
            case CLam(name=name, body=body), CPi(dom=A, cod=B):
                self.check(ctx.extend(name, A), body, B)
            case CLam(name=name, body=body), CUnknown():
                self.check(ctx.extend(name, CUnknown()), body, CUnknown())
            case CLam(), _:
                self.fail(ctx, u, "function at a non-function type", expected=U)
            case (CPi() | CNat() | CVec() | CEq()), (CType() | CUnknown()):
                self.check_type(ctx, u)
            case CType(level=i), CType(level=j) if i < j:
                return
            case CType(), CUnknown():
                return
            case CZero(), _:
                self._expect(ctx, u, CNat(), U)
            case CSucc(pred=k), _:
                self.check(ctx, k, CNat())
                self._expect(ctx, u, CNat(), U)
            case CNil(elem=A), _:
                self.check_type(ctx, A)
                self._expect(ctx, u, CVec(A, CZero()), U)
            case CCons(elem=A, length=n, head=h, tail=tl), _:
                self.check_type(ctx, A)
                self.check(ctx, n, CNat())
                self.check(ctx, h, A)
                self.check(ctx, tl, CVec(A, n))
                self._expect(ctx, u, CVec(A, CSucc(n)), U)
            case CRefl(ty=A, value=x), _:
                self.check_type(ctx, A)
                self.check(ctx, x, A)
                self._expect(ctx, u, CEq(A, x, x), U)
            case Atomic(), _:
                S = self.synth_atomic(ctx, u)
                if isinstance(S, CPi):
                    self.fail(ctx, u, "neutral form at a function type is not eta-long", actual=S)
                self._expect(ctx, u, S, U)
            case _:
                self.fail(ctx, u, f"does not have type {pretty(U, ctx.names)}", expected=U)

    def _expect(self, ctx: Context, u, actual: Canonical, expected: Canonical) -> None:
        if cumulative(actual, expected) or consistent(actual, expected):
            return
        self.fail(ctx, u, f"has type {pretty(actual, ctx.names)}, expected "
                          f"{pretty(expected, ctx.names)}", expected=expected, actual=actual)

    def synth_atomic(self, ctx: Context, atom: Atomic) -> Canonical:
        try:
            ty = ctx.lookup(atom.index)
        except ValueError as exc:
            raise GdtlTypeError(str(exc))
        so_far = Atomic(atom.index, (), atom.name)
        for entry in atom.spine:
            if isinstance(entry, Frame):
                ty = self.frame_type(ctx, entry, so_far, ty)
            else:
                A = dom(ty)
                if A is None:
                    self.fail(ctx, so_far, "applied, but not a function", actual=ty)
                self.check(ctx, entry, A)
                ty = self.norm.cod_sub(entry, ty)
            so_far = Atomic(so_far.index, so_far.spine + (entry,), so_far.name)
        return ty

    def frame_type(self, ctx: Context, frame: Frame, scrutinee: Atomic,
                   scrutinee_ty: Canonical) -> Canonical:
        norm = self.norm
        if isinstance(frame, NatElimF):
            self._expect(ctx, scrutinee, scrutinee_ty, CNat())
            self.check(ctx, frame.base, norm.apply_nat_motive(frame.motive, CZero()))
            self.check(ctx, frame.step, norm.nat_step_type(frame.motive))
            return norm.apply_nat_motive(frame.motive, scrutinee)
        if isinstance(frame, VecElimF):
            self.check_type(ctx, frame.elem)
            self._expect(ctx, scrutinee, scrutinee_ty, CVec(frame.elem, frame.length))
            base_ty = norm.apply_vec_motive(frame.elem, frame.motive, CZero(), CNil(frame.elem))
            self.check(ctx, frame.base, base_ty)
            self.check(ctx, frame.step, norm.vec_step_type(frame.elem, frame.motive))
            return norm.apply_vec_motive(frame.elem, frame.motive, frame.length, scrutinee)
        assert isinstance(frame, EqElimF)
        self.check_type(ctx, frame.ty)
        self._expect(ctx, scrutinee, scrutinee_ty, CEq(frame.ty, frame.lhs, frame.rhs))
        self.check(ctx, frame.method, norm.eq_method_type(frame.ty, frame.motive))
        return norm.apply_eq_motive(frame.ty, frame.motive, frame.lhs, frame.rhs, scrutinee)


def check_canonical(ctx: Context, u: Canonical, U: Canonical,
                    norm_fuel: int = DEFAULT_NORM_FUEL) -> None:
    """Accept exactly the well-formed, eta-long canonical forms of type ``U``.

    Raises:
        GdtlTypeError: naming the offending subterm
    """
    _CanonicalChecker(norm_fuel).check(ctx, u, U)


def wf_context(ctx: Context, norm_fuel: int = DEFAULT_NORM_FUEL) -> None:
    """Every binding's type is a type under the bindings to its left.

    Raises:
        GdtlTypeError: naming the first bad binding
    """
    checker = _CanonicalChecker(norm_fuel)
    prefix = Context()
    for name, ty in ctx.entries:
        try:
            checker.check_type(prefix, ty)
        except GdtlTypeError as exc:
            raise GdtlTypeError(f"bad binding {name!r}: {exc.message}") from exc
        prefix = prefix.extend(name, ty)
