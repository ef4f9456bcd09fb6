"""Approximate normalization and hereditary substitution.

Normalization turns a gradual term into its canonical form while
checking it. It always terminates:

- Substituting a function for a variable and then applying it is only
  done while the argument type's level measure is strictly below the
  measure of the substituted variable's type. Otherwise the result is
  ``?``.
- Applying something whose type is ``?`` yields ``?``.
- Unfolding an eliminator spends normalization fuel. Running out raises
  ``FuelExhausted``.
- Where the synthesized type is not at least as imprecise as the
  expected one, the normal form is approximated by ``?``.
"""

from __future__ import annotations

import logging
from collections import Counter
from typing import Optional, Sequence

from .core import (
    OMEGA,
    App,
    Ascribe,
    Atomic,
    Canonical,
    CEq,
    CLam,
    CNat,
    CNil,
    CCons,
    Cons,
    Context,
    CPi,
    CRefl,
    CSucc,
    CType,
    CUnknown,
    CVec,
    CZero,
    Eq,
    EqElim,
    EqElimF,
    Err,
    Frame,
    Lam,
    Level,
    Nat,
    NatElim,
    NatElimF,
    Nil,
    Node,
    Omega,
    Pi,
    Refl,
    Succ,
    Term,
    TypeU,
    Unknown,
    Var,
    Vec,
    VecElim,
    VecElimF,
    WithEv,
    Zero,
    children,
    level_le,
    level_max,
    map_children,
    occurs,
    pretty,
    shift,
)
from .errors import FuelExhausted, GdtlTypeError
from .gradops import consistent, dom, precision

logger = logging.getLogger(__name__)

DEFAULT_NORM_FUEL = 10_000


class Fuel:
    """A step budget shared by one normalization or evaluation run."""

    def __init__(self, limit: int):
        if limit < 0:
            raise ValueError(f"fuel must be non-negative, got {limit}")
        self.limit = limit
        self.used = 0

    def spend(self, amount: int = 1) -> None:
        if self.used + amount > self.limit:
            self.used = self.limit
            raise FuelExhausted(self.limit)
        self.used += amount

    @property
    def remaining(self) -> int:
        return self.limit - self.used


# =============================================================================
# Level measure
# =============================================================================

def level_measure(U: Node) -> Counter:
    """Multiset of the level annotations on every arrow inside ``U``."""
    found: Counter = Counter()
    stack = [U]
    while stack:
        node = stack.pop()
        if isinstance(node, CPi):
            found[node.level] += 1
        stack.extend(child for child, _ in children(node))
    return found


def _level_lt(a: Level, b: Level) -> bool:
    return a != b and level_le(a, b)


def measure_less(m1: Counter, m2: Counter) -> bool:
    """Multiset ordering: ``m1`` is ``m2`` with some elements replaced by smaller ones."""
    m1 = +m1
    m2 = +m2
    if m1 == m2:
        return False
    for x, count in m1.items():
        if count > m2[x]:
            if not any(_level_lt(x, y) and m2[y] > m1[y] for y in m2):
                return False
    return True


# =============================================================================
# Eta
# =============================================================================

def eta_expand_atomic(atom: Atomic, U: Canonical) -> Canonical:
    """Eta-expand a neutral form until it is no longer at an arrow type."""
    if not isinstance(U, CPi):
        return atom
    arg = eta_expand_atomic(Atomic(0, (), U.name), shift(U.dom, 1))
    inner = Atomic(
        atom.index + 1,
        tuple(shift(entry, 1) for entry in atom.spine) + (arg,),
        atom.name,
    )
    return CLam(U.name, eta_expand_atomic(inner, U.cod))


def eta_expand(index: int, U: Canonical, name: str = "x") -> Canonical:
    """The eta-long form of variable ``index`` at type ``U``."""
    return eta_expand_atomic(Atomic(index, (), name), U)


def eta_contract(u: Canonical) -> Optional[Canonical]:
    """Undo eta-expansion of a neutral form; None when ``u`` is a real function."""
    if not isinstance(u, CLam):
        return u
    body = eta_contract(u.body)
    if (
        isinstance(body, Atomic)
        and body.index != 0
        and body.spine
        and body.spine[-1] == Atomic(0)
        and not any(occurs(entry, 0) for entry in body.spine[:-1])
    ):
        return shift(Atomic(body.index, body.spine[:-1], body.name), -1)
    return None


def _arrows(doms: Sequence[tuple[str, Canonical]], result: Canonical) -> Canonical:
    """Build ``(x1 : A1) -> ... -> result``; each Ai lives under the binders before it."""
    for name, ty in reversed(doms):
        result = CPi(name, ty, result, OMEGA)
    return result


def universe(level: Level) -> Canonical:
    return CUnknown() if isinstance(level, Omega) else CType(level)


# =============================================================================
# The normalizer
# =============================================================================

class Normalizer:
    """Hereditary substitution and approximate normalization under one fuel budget.

    Example:
        normalizer = Normalizer(fuel=1000)
        value, ty = normalizer.synth(Context(), term)
    """

    def __init__(self, fuel: int = DEFAULT_NORM_FUEL):
        self.fuel = Fuel(fuel)

    # --- hereditary substitution -------------------------------------------

    def hsub(self, v: Canonical, index: int, X: Optional[Canonical], target: Node) -> Node:
        """Substitute ``v`` (of type ``X``) for variable ``index`` in ``target``.

        With ``X`` set to None the substitution is unchecked: every redex it
        creates is contracted and pays one unit of fuel.
        """
        if isinstance(target, Atomic):
            return self.hsub_atomic(v, index, X, target)[0]
        return map_children(target, lambda child, bound: self.hsub(v, index + bound, X, child))

    def hsub_atomic(self, v: Canonical, index: int, X: Optional[Canonical],
                    atom: Atomic) -> tuple[Canonical, Optional[Canonical]]:
        """Substitute into a neutral form.

        Returns:
            The result and, when the head is the substituted variable and
            ``X`` is known, its type. Otherwise the type is None.
        """
        spine = tuple(self.hsub(v, index, X, entry) for entry in atom.spine)
        if atom.index != index:
            new_index = atom.index if atom.index < index else atom.index - 1
            return Atomic(new_index, spine, atom.name), None
        head = shift(v, index)
        head_ty = shift(X, index) if X is not None else None
        return self.apply_spine(head, head_ty, spine, X)

    def apply_spine(self, head: Canonical, head_ty: Optional[Canonical],
                    spine: Sequence[Node], bound: Optional[Canonical]):
        result, ty = head, head_ty
        for entry in spine:
            if isinstance(entry, Frame):
                result, ty = self.reduce_elim(entry, result), self._elim_type(entry, result, ty)
            else:
                result, ty = self.happly(result, ty, entry, bound)
        return result, ty

    def happly(self, fn: Canonical, fn_ty: Optional[Canonical], arg: Canonical,
               bound: Optional[Canonical]) -> tuple[Canonical, Optional[Canonical]]:
        """Apply a canonical function to a canonical argument.

        ``bound`` is the type of the variable whose substitution created
        this redex; the argument type must measure strictly below it.
        """
        if isinstance(fn_ty, CUnknown):
            return CUnknown(), CUnknown()
        result_ty = None
        if isinstance(fn_ty, CPi):
            result_ty = self.hsub(arg, 0, fn_ty.dom, fn_ty.cod)
        if isinstance(fn, CUnknown):
            return CUnknown(), result_ty
        if isinstance(fn, Atomic):
            return Atomic(fn.index, fn.spine + (arg,), fn.name), result_ty
        if not isinstance(fn, CLam):
            logger.debug("applying a non-function %s; approximating", type(fn).__name__)
            return CUnknown(), result_ty
        if fn_ty is None:
            self.fuel.spend()
            return self.hsub(arg, 0, None, fn.body), None
        if not isinstance(fn_ty, CPi):
            return CUnknown(), CUnknown()
        if bound is None:
            self.fuel.spend()
            return self.hsub(arg, 0, fn_ty.dom, fn.body), result_ty
        if measure_less(level_measure(fn_ty.dom), level_measure(bound)):
            return self.hsub(arg, 0, fn_ty.dom, fn.body), result_ty
        logger.debug("level measure did not decrease; approximating redex with ?")
        return CUnknown(), result_ty

    def apply(self, fn: Canonical, fn_ty: Canonical, args: Sequence[Canonical]) -> Canonical:
        """Apply ``fn : fn_ty`` to ``args``.

        Each contraction pays fuel and substitutes at the known domain, so
        redexes it creates are measure-checked like any other.
        """
        for arg in args:
            fn, fn_ty = self.happly(fn, fn_ty, arg, None)
        return fn

    def apply_nat_motive(self, um: Canonical, n: Canonical) -> Canonical:
        return self.apply(um, _arrows([("n", CNat())], CUnknown()), [n])

    def apply_vec_motive(self, UA: Canonical, um: Canonical, n: Canonical,
                         v: Canonical) -> Canonical:
        return self.apply(um, _arrows(self.vec_motive_doms(UA), CUnknown()), [n, v])

    def apply_eq_motive(self, UA: Canonical, um: Canonical, x: Canonical, y: Canonical,
                        p: Canonical) -> Canonical:
        return self.apply(um, _arrows(self.eq_motive_doms(UA), CUnknown()), [x, y, p])

    # --- eliminators --------------------------------------------------------

    def reduce_elim(self, frame: Frame, scrutinee: Canonical) -> Canonical:
        """Run an eliminator on a canonical scrutinee.

        Neutral scrutinees keep the frame in their spine; ``?`` eliminates
        to ``?`` except for equality, where it acts as reflexivity.
        """
        if isinstance(frame, NatElimF):
            return self._nat_elim(frame, scrutinee)
        if isinstance(frame, VecElimF):
            return self._vec_elim(frame, scrutinee)
        return self._eq_elim(frame, scrutinee)

    def _stuck(self, frame: Frame, scrutinee: Canonical) -> Canonical:
        if isinstance(scrutinee, Atomic):
            return Atomic(scrutinee.index, scrutinee.spine + (frame,), scrutinee.name)
        return CUnknown()

    def _nat_elim(self, frame: NatElimF, scrutinee: Canonical) -> Canonical:
        preds = []
        while isinstance(scrutinee, CSucc):
            preds.append(scrutinee.pred)
            scrutinee = scrutinee.pred
        if isinstance(scrutinee, CZero):
            acc = frame.base
        else:
            acc = self._stuck(frame, scrutinee)
        if preds:
            step_ty = self.nat_step_type(frame.motive)
        for k in reversed(preds):
            self.fuel.spend()
            acc = self.apply(frame.step, step_ty, [k, acc])
        return acc

    def _vec_elim(self, frame: VecElimF, scrutinee: Canonical) -> Canonical:
        cells = []
        while isinstance(scrutinee, CCons):
            cells.append(scrutinee)
            scrutinee = scrutinee.tail
        if isinstance(scrutinee, CNil):
            acc = frame.base
        elif cells and isinstance(scrutinee, Atomic):
            inner = cells[-1]
            acc = self._stuck(VecElimF(frame.elem, inner.length, frame.motive, frame.base, frame.step), scrutinee)
        else:
            acc = self._stuck(frame, scrutinee)
        if cells:
            step_ty = self.vec_step_type(frame.elem, frame.motive)
        for cell in reversed(cells):
            self.fuel.spend()
            acc = self.apply(frame.step, step_ty, [cell.length, cell.head, cell.tail, acc])
        return acc

    def _eq_elim(self, frame: EqElimF, scrutinee: Canonical) -> Canonical:
        if isinstance(scrutinee, (CRefl, CUnknown)):
            self.fuel.spend()
            value = scrutinee.value if isinstance(scrutinee, CRefl) else CUnknown()
            return self.apply(frame.method, self.eq_method_type(frame.ty, frame.motive), [value])
        return self._stuck(frame, scrutinee)

    def _elim_type(self, frame: Frame, scrutinee: Canonical,
                   scrutinee_ty: Optional[Canonical]) -> Optional[Canonical]:
        if scrutinee_ty is None:
            return None
        if isinstance(frame, NatElimF):
            return self.apply_nat_motive(frame.motive, scrutinee)
        if isinstance(frame, VecElimF):
            return self.apply_vec_motive(frame.elem, frame.motive, frame.length, scrutinee)
        return self.apply_eq_motive(frame.ty, frame.motive, frame.lhs, frame.rhs, scrutinee)

    # --- lifted operations --------------------------------------------------

    def cod_sub(self, arg: Canonical, U: Canonical) -> Optional[Canonical]:
        if isinstance(U, CPi):
            return self.hsub(arg, 0, U.dom, U.cod)
        if isinstance(U, CUnknown):
            return CUnknown()
        return None

    def body_sub(self, arg: Canonical, arg_ty: Canonical, fn: Canonical) -> Canonical:
        if isinstance(fn, CLam):
            return self.hsub(arg, 0, arg_ty, fn.body)
        if isinstance(fn, Atomic):
            return Atomic(fn.index, fn.spine + (arg,), fn.name)
        return CUnknown()

    # --- fitting synthesized results ---------------------------------------

    def fit(self, u: Canonical, U: Canonical) -> Canonical:
        """Shape a normal form for the type it is being used at.

        Functions used at a non-arrow type are eta-contracted (or become
        ``?``); neutral forms used at an arrow type are eta-expanded.
        """
        if isinstance(u, CLam):
            if isinstance(U, CPi):
                return CLam(u.name, self.fit(u.body, U.cod))
            if isinstance(U, CUnknown):
                return u
            contracted = eta_contract(u)
            return CUnknown() if contracted is None else contracted
        if isinstance(u, Atomic) and isinstance(U, CPi):
            return eta_expand_atomic(u, U)
        return u

    def settle(self, ctx: Context, u: Canonical, actual: Canonical, expected: Canonical,
               term: Optional[Term] = None, lenient: bool = False) -> Canonical:
        """Decide the normal form of a synthesized term checked at ``expected``."""
        if cumulative(actual, expected):
            return u
        if not consistent(actual, expected):
            if lenient:
                return CUnknown()
            raise GdtlTypeError(
                f"type mismatch: expected {pretty(expected, ctx.names)}, "
                f"got {pretty(actual, ctx.names)}",
                expected=expected, actual=actual,
                span=term.span if term is not None else None,
            )
        if precision(expected, actual):
            return self.fit(u, expected)
        logger.debug("approximating normal form at %s", pretty(expected, ctx.names))
        return CUnknown()

    # --- normalization ------------------------------------------------------

    def synth(self, ctx: Context, t: Term) -> tuple[Canonical, Canonical]:
        """Normal form and synthesized type of ``t``."""
        try:
            return self._synth(ctx, t)
        except GdtlTypeError as exc:
            raise exc.with_span(t.span)
        except RecursionError:
            raise FuelExhausted(self.fuel.used) from None

    def check(self, ctx: Context, t: Term, U: Canonical) -> Canonical:
        """Normal form of ``t`` checked against ``U``."""
        try:
            return self._check(ctx, t, U)
        except GdtlTypeError as exc:
            raise exc.with_span(t.span)
        except RecursionError:
            raise FuelExhausted(self.fuel.used) from None

    def type_level(self, ctx: Context, T: Term) -> tuple[Canonical, Level]:
        """Normal form of a type together with the least universe it lives in."""
        u, S = self.synth(ctx, T)
        if isinstance(S, CType):
            return self.fit(u, S), S.level
        if isinstance(S, CUnknown):
            contracted = eta_contract(u)
            return (CUnknown() if contracted is None else contracted), OMEGA
        raise GdtlTypeError(
            f"expected a type, got a term of type {pretty(S, ctx.names)}",
            actual=S, span=T.span,
        )

    def _synth(self, ctx: Context, t: Term) -> tuple[Canonical, Canonical]:
        match t:
            case Var(index=i, name=name):
                U = ctx.lookup(i)
                if isinstance(U, CUnknown):
                    return CLam("y", Atomic(i + 1, (Atomic(0, (), "y"),), name)), U
                return eta_expand(i, U, name), U
            case TypeU(level=level):
                return CType(level), CType(level + 1)
            case Unknown() | Err():
                return CUnknown(), CUnknown()
            case Ascribe(term=term, ty=ty):
                U, _ = self.type_level(ctx, ty)
                return self.check(ctx, term, U), U
            case App(fn=fn, arg=arg):
                return self._synth_app(ctx, fn, arg)
            case Pi(name=name, dom=A, cod=B):
                UA, i = self.type_level(ctx, A)
                UB, j = self.type_level(ctx.extend(name, UA), B)
                level = level_max(i, j)
                return CPi(name, UA, UB, level), universe(level)
            case Lam():
                raise GdtlTypeError("cannot infer the type of a function; add an ascription")
            case WithEv(evidence=ev, term=inner):
                return self._check_lenient(ctx, inner, ev.witness), ev.witness
            case Nat():
                return CNat(), CType(1)
            case Zero():
                return CZero(), CNat()
            case Succ(pred=pred):
                return CSucc(self.check(ctx, pred, CNat())), CNat()
            case Vec(elem=A, length=n):
                UA, level = self.type_level(ctx, A)
                return CVec(UA, self.check(ctx, n, CNat())), universe(level)
            case Nil(elem=A):
                UA, _ = self.type_level(ctx, A)
                return CNil(UA), CVec(UA, CZero())
            case Cons(elem=A, length=n, head=h, tail=tl):
                UA, _ = self.type_level(ctx, A)
                un = self.check(ctx, n, CNat())
                uh = self.check(ctx, h, UA)
                ut = self.check(ctx, tl, CVec(UA, un))
                return CCons(UA, un, uh, ut), CVec(UA, CSucc(un))
            case Eq(ty=A, lhs=x, rhs=y):
                UA, level = self.type_level(ctx, A)
                return CEq(UA, self.check(ctx, x, UA), self.check(ctx, y, UA)), universe(level)
            case Refl(ty=A, value=x):
                UA, _ = self.type_level(ctx, A)
                ux = self.check(ctx, x, UA)
                return CRefl(UA, ux), CEq(UA, ux, ux)
            case NatElim():
                return self._synth_nat_elim(ctx, t)
            case VecElim():
                return self._synth_vec_elim(ctx, t)
            case EqElim():
                return self._synth_eq_elim(ctx, t)
        raise GdtlTypeError(f"cannot typecheck {type(t).__name__} nodes")

    def _synth_app(self, ctx: Context, fn: Term, arg: Term) -> tuple[Canonical, Canonical]:
        uf, Uf = self.synth(ctx, fn)
        A = dom(Uf)
        if A is None:
            raise GdtlTypeError(
                f"expected a function, got a term of type {pretty(Uf, ctx.names)}",
                actual=Uf, span=fn.span,
            )
        ua = self.check(ctx, arg, A)
        return self.body_sub(ua, A, uf), self.cod_sub(ua, Uf)

    def _check(self, ctx: Context, t: Term, U: Canonical) -> Canonical:
        match t, U:
            case Lam(name=name, body=body), CPi(dom=A, cod=B):
                return CLam(name, self.check(ctx.extend(name, A), body, B))
            case Lam(name=name, body=body), CUnknown():
                return CLam(name, self.check(ctx.extend(name, CUnknown()), body, CUnknown()))
            case Lam(), _:
                raise GdtlTypeError(
                    f"expected a term of type {pretty(U, ctx.names)}, found a function",
                    expected=U, span=t.span,
                )
            case Pi(name=name, dom=A, cod=B), CType(level=level):
                uA = self.check(ctx, A, U)
                uB = self.check(ctx.extend(name, uA), B, U)
                return CPi(name, uA, uB, level)
            case Pi(name=name, dom=A, cod=B), CUnknown():
                uA = self.check(ctx, A, U)
                uB = self.check(ctx.extend(name, uA), B, U)
                return CPi(name, uA, uB, OMEGA)
        u, S = self.synth(ctx, t)
        return self.settle(ctx, u, S, U, t)

    def _check_lenient(self, ctx: Context, t: Term, U: Canonical) -> Canonical:
        """Like ``check`` but inconsistent runtime states normalize to ``?``."""
        if isinstance(t, (Lam, Pi)):
            try:
                return self.check(ctx, t, U)
            except GdtlTypeError:
                return CUnknown()
        u, S = self.synth(ctx, t)
        return self.settle(ctx, u, S, U, t, lenient=True)

    # --- eliminators ---------------------------------------------------------

    def motive(self, ctx: Context, m: Term,
               doms: Sequence[tuple[str, Canonical]]) -> tuple[Canonical, Canonical]:
        """Normalize an eliminator motive over the given index telescope.

        Returns:
            The motive's normal form and its type, an arrow chain ending in
            the universe its body lives in
        """
        inner, names, scope = m, [], ctx
        while isinstance(inner, Lam) and len(names) < len(doms):
            scope = scope.extend(inner.name, doms[len(names)][1])
            names.append(inner.name)
            inner = inner.body
        if names and len(names) == len(doms):
            _, level = self.type_level(scope, inner)
            named = [(n, ty) for n, (_, ty) in zip(names, doms)]
            Um = _arrows(named, universe(level))
            return self.check(ctx, m, Um), Um
        if isinstance(m, Lam):
            Um = _arrows(doms, CUnknown())
            return self.check(ctx, m, Um), Um
        um, Um = self.synth(ctx, m)
        expected = _arrows(doms, CUnknown())
        if not consistent(Um, expected):
            raise GdtlTypeError(
                f"motive has type {pretty(Um, ctx.names)}, expected {pretty(expected, ctx.names)}",
                expected=expected, actual=Um, span=m.span,
            )
        return um, Um

    # --- eliminator signatures ---------------------------------------------

    @staticmethod
    def vec_motive_doms(UA: Canonical) -> list[tuple[str, Canonical]]:
        return [("k", CNat()), ("v", CVec(shift(UA, 1), Atomic(0, (), "k")))]

    @staticmethod
    def eq_motive_doms(UA: Canonical) -> list[tuple[str, Canonical]]:
        return [
            ("x", UA),
            ("y", shift(UA, 1)),
            ("p", CEq(shift(UA, 2), eta_expand(1, shift(UA, 2), "x"), eta_expand(0, shift(UA, 2), "y"))),
        ]

    def nat_step_type(self, um: Canonical) -> Canonical:
        """``(k : Nat) -> m k -> m (Succ k)``"""
        return CPi("k", CNat(), CPi(
            "r", self.apply_nat_motive(shift(um, 1), Atomic(0, (), "k")),
            self.apply_nat_motive(shift(um, 2), CSucc(Atomic(1, (), "k"))),
        ))

    def vec_step_type(self, UA: Canonical, um: Canonical) -> Canonical:
        """``(k : Nat) -> (h : A) -> (t : Vec A k) -> m k t -> m (Succ k) (Cons A k h t)``"""
        k, h, tl = Atomic(3, (), "k"), eta_expand(2, shift(UA, 4), "h"), Atomic(1, (), "t")
        return CPi("k", CNat(), CPi(
            "h", shift(UA, 1), CPi(
                "t", CVec(shift(UA, 2), Atomic(1, (), "k")), CPi(
                    "r", self.apply_vec_motive(
                        shift(UA, 3), shift(um, 3), Atomic(2, (), "k"), Atomic(0, (), "t")),
                    self.apply_vec_motive(
                        shift(UA, 4), shift(um, 4), CSucc(k), CCons(shift(UA, 4), k, h, tl)),
                ))))

    def eq_method_type(self, UA: Canonical, um: Canonical) -> Canonical:
        """``(z : A) -> m z z (Refl A z)``"""
        z = eta_expand(0, shift(UA, 1), "z")
        refl = CRefl(shift(UA, 1), z)
        return CPi("z", UA, self.apply_eq_motive(shift(UA, 1), shift(um, 1), z, z, refl))

    def _synth_nat_elim(self, ctx: Context, t: NatElim) -> tuple[Canonical, Canonical]:
        um, _ = self.motive(ctx, t.motive, [("n", CNat())])
        uz = self.check(ctx, t.base, self.apply_nat_motive(um, CZero()))
        us = self.check(ctx, t.step, self.nat_step_type(um))
        un = self.check(ctx, t.scrutinee, CNat())
        return self.reduce_elim(NatElimF(um, uz, us), un), self.apply_nat_motive(um, un)

    def _synth_vec_elim(self, ctx: Context, t: VecElim) -> tuple[Canonical, Canonical]:
        UA, _ = self.type_level(ctx, t.elem)
        un = self.check(ctx, t.length, CNat())
        um, _ = self.motive(ctx, t.motive, self.vec_motive_doms(UA))
        ub = self.check(ctx, t.base, self.apply_vec_motive(UA, um, CZero(), CNil(UA)))
        us = self.check(ctx, t.step, self.vec_step_type(UA, um))
        uv = self.check(ctx, t.scrutinee, CVec(UA, un))
        frame = VecElimF(UA, un, um, ub, us)
        return self.reduce_elim(frame, uv), self.apply_vec_motive(UA, um, un, uv)

    def _synth_eq_elim(self, ctx: Context, t: EqElim) -> tuple[Canonical, Canonical]:
        UA, _ = self.type_level(ctx, t.ty)
        um, _ = self.motive(ctx, t.motive, self.eq_motive_doms(UA))
        umethod = self.check(ctx, t.method, self.eq_method_type(UA, um))
        ux = self.check(ctx, t.lhs, UA)
        uy = self.check(ctx, t.rhs, UA)
        up = self.check(ctx, t.proof, CEq(UA, ux, uy))
        frame = EqElimF(UA, um, umethod, ux, uy)
        return self.reduce_elim(frame, up), self.apply_eq_motive(UA, um, ux, uy, up)


def cumulative(actual: Canonical, expected: Canonical) -> bool:
    return (
        isinstance(actual, CType)
        and isinstance(expected, CType)
        and actual.level <= expected.level
    )


# =============================================================================
# Module-level entry points
# =============================================================================

def hsub(v: Canonical, index: int, X: Optional[Canonical], target: Node,
         fuel: int = DEFAULT_NORM_FUEL) -> Node:
    """Hereditary substitution of ``v : X`` for variable ``index`` in ``target``."""
    return Normalizer(fuel).hsub(v, index, X, target)


def hsub_atomic(v: Canonical, index: int, X: Optional[Canonical], atom: Atomic,
                fuel: int = DEFAULT_NORM_FUEL) -> tuple[Canonical, Optional[Canonical]]:
    return Normalizer(fuel).hsub_atomic(v, index, X, atom)


def reduce_elim(frame: Frame, scrutinee: Canonical, fuel: int = DEFAULT_NORM_FUEL) -> Canonical:
    return Normalizer(fuel).reduce_elim(frame, scrutinee)


def norm_synth(ctx: Context, t: Term, fuel: int = DEFAULT_NORM_FUEL) -> tuple[Canonical, Canonical]:
    return Normalizer(fuel).synth(ctx, t)


def norm_check(ctx: Context, t: Term, U: Canonical, fuel: int = DEFAULT_NORM_FUEL) -> Canonical:
    return Normalizer(fuel).check(ctx, t, U)


def norm_type_synth_level(ctx: Context, T: Term,
                          fuel: int = DEFAULT_NORM_FUEL) -> tuple[Canonical, Level]:
    return Normalizer(fuel).type_level(ctx, T)
