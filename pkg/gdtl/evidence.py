"""Evidence terms and the runtime.

Elaboration turns a typechecked term into an evidence term: ascriptions
disappear, and every place where a synthesized type met an expected
one gets wrapped as ``⟨W⟩ e``, where the witness ``W`` is the meet of
the two types. Functions always carry the evidence of the type they were
checked against.

The runtime is a call-by-value small-step machine over evidence terms.
Stacked evidence is collapsed by taking the meet. When a meet is
undefined, the program fails with a runtime type error.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Iterator, Optional, Union

from .core import (
    OMEGA,
    App,
    Ascribe,
    Canonical,
    CNat,
    CNil,
    Cons,
    Context,
    CPi,
    CType,
    CUnknown,
    CVec,
    CZero,
    Eq,
    EqElim,
    Err,
    EvTerm,
    Evidence,
    Lam,
    Nat,
    NatElim,
    Nil,
    Node,
    Pi,
    Refl,
    Succ,
    Term,
    TypeU,
    Unknown,
    Var,
    Vec,
    VecElim,
    WithEv,
    Zero,
    CEq,
    CSucc,
    children,
    map_children,
    pretty,
)
from .errors import FuelExhausted, GdtlTypeError, StuckError
from .gradops import consistent, dom, meet, precision
from .normalize import DEFAULT_NORM_FUEL, Normalizer, cumulative, universe

logger = logging.getLogger(__name__)

DYN_ARROW = CPi("_", CUnknown(), CUnknown(), OMEGA)


def _wrap(witness: Canonical, e: EvTerm) -> EvTerm:
    return WithEv(Evidence(witness), e, span=e.span)


# =============================================================================
# Elaboration
# =============================================================================

class Elaborator:
    """Typechecks a term and produces its evidence term at the same time."""

    def __init__(self, norm_fuel: int = DEFAULT_NORM_FUEL):
        self.norm = Normalizer(norm_fuel)

    def synth(self, ctx: Context, t: Term) -> tuple[EvTerm, Canonical]:
        try:
            return self._synth(ctx, t)
        except GdtlTypeError as exc:
            raise exc.with_span(t.span)

    def check(self, ctx: Context, t: Term, U: Canonical) -> EvTerm:
        try:
            return self._check(ctx, t, U)
        except GdtlTypeError as exc:
            raise exc.with_span(t.span)

    def type_of(self, ctx: Context, T: Term) -> tuple[EvTerm, Canonical, object]:
        """Elaborate a type; also return its normal form and level."""
        eT, _ = self.synth(ctx, T)
        U, level = self.norm.type_level(ctx, T)
        return eT, U, level

    def _synth(self, ctx: Context, t: Term) -> tuple[EvTerm, Canonical]:
        norm = self.norm
        match t:
            case Var(index=i):
                return t, ctx.lookup(i)
            case TypeU(level=level):
                return t, CType(level + 1)
            case Unknown():
                return _wrap(CUnknown(), t), CUnknown()
            case Ascribe(term=term, ty=ty):
                U, _ = norm.type_level(ctx, ty)
                return self.check(ctx, term, U), U
            case App(fn=fn, arg=arg):
                ef, Uf = self.synth(ctx, fn)
                A = dom(Uf)
                if A is None:
                    raise GdtlTypeError(
                        f"expected a function, got a term of type {pretty(Uf, ctx.names)}",
                        actual=Uf, span=fn.span,
                    )
                if isinstance(Uf, CUnknown):
                    ef = _wrap(DYN_ARROW, ef)
                ea = self.check(ctx, arg, A)
                ua = norm.check(ctx, arg, A)
                return App(ef, ea, span=t.span), norm.cod_sub(ua, Uf)
            case Pi(name=name, dom=A, cod=B):
                eA, UA, _ = self.type_of(ctx, A)
                eB, _, _ = self.type_of(ctx.extend(name, UA), B)
                _, S = norm.synth(ctx, t)
                return Pi(name, eA, eB, span=t.span), S
            case Lam():
                raise GdtlTypeError("cannot infer the type of a function; add an ascription")
            case Nat() | Zero():
                return t, norm.synth(ctx, t)[1]
            case Succ(pred=pred):
                return Succ(self.check(ctx, pred, CNat()), span=t.span), CNat()
            case Vec(elem=A, length=n):
                eA, _, level = self.type_of(ctx, A)
                return Vec(eA, self.check(ctx, n, CNat()), span=t.span), universe(level)
            case Nil(elem=A):
                eA, UA, _ = self.type_of(ctx, A)
                return Nil(eA, span=t.span), CVec(UA, CZero())
            case Cons(elem=A, length=n, head=h, tail=tl):
                eA, UA, _ = self.type_of(ctx, A)
                en = self.check(ctx, n, CNat())
                un = norm.check(ctx, n, CNat())
                eh = self.check(ctx, h, UA)
                et = self.check(ctx, tl, CVec(UA, un))
                return Cons(eA, en, eh, et, span=t.span), CVec(UA, CSucc(un))
            case Eq(ty=A, lhs=x, rhs=y):
                eA, UA, level = self.type_of(ctx, A)
                ex, ey = self.check(ctx, x, UA), self.check(ctx, y, UA)
                return Eq(eA, ex, ey, span=t.span), universe(level)
            case Refl(ty=A, value=x):
                eA, UA, _ = self.type_of(ctx, A)
                ux = norm.check(ctx, x, UA)
                return Refl(eA, self.check(ctx, x, UA), span=t.span), CEq(UA, ux, ux)
            case NatElim(motive=m, base=z, step=s, scrutinee=n):
                um, Um = norm.motive(ctx, m, [("n", CNat())])
                em = self.check(ctx, m, Um)
                ez = self.check(ctx, z, norm.apply_nat_motive(um, CZero()))
                es = self.check(ctx, s, norm.nat_step_type(um))
                en = self.check(ctx, n, CNat())
                un = norm.check(ctx, n, CNat())
                return NatElim(em, ez, es, en, span=t.span), norm.apply_nat_motive(um, un)
            case VecElim(elem=A, length=n, motive=m, base=b, step=s, scrutinee=v):
                eA, UA, _ = self.type_of(ctx, A)
                en = self.check(ctx, n, CNat())
                un = norm.check(ctx, n, CNat())
                um, Um = norm.motive(ctx, m, norm.vec_motive_doms(UA))
                em = self.check(ctx, m, Um)
                eb = self.check(ctx, b, norm.apply_vec_motive(UA, um, CZero(), CNil(UA)))
                es = self.check(ctx, s, norm.vec_step_type(UA, um))
                ev = self.check(ctx, v, CVec(UA, un))
                uv = norm.check(ctx, v, CVec(UA, un))
                result_ty = norm.apply_vec_motive(UA, um, un, uv)
                return VecElim(eA, en, em, eb, es, ev, span=t.span), result_ty
            case EqElim(ty=A, motive=m, method=mth, lhs=x, rhs=y, proof=p):
                eA, UA, _ = self.type_of(ctx, A)
                um, Um = norm.motive(ctx, m, norm.eq_motive_doms(UA))
                em = self.check(ctx, m, Um)
                emth = self.check(ctx, mth, norm.eq_method_type(UA, um))
                ux, uy = norm.check(ctx, x, UA), norm.check(ctx, y, UA)
                ex, ey = self.check(ctx, x, UA), self.check(ctx, y, UA)
                ep = self.check(ctx, p, CEq(UA, ux, uy))
                up = norm.check(ctx, p, CEq(UA, ux, uy))
                result_ty = norm.apply_eq_motive(UA, um, ux, uy, up)
                return EqElim(eA, em, emth, ex, ey, ep, span=t.span), result_ty
        raise GdtlTypeError(f"cannot elaborate {type(t).__name__} nodes")

    def _check(self, ctx: Context, t: Term, U: Canonical) -> EvTerm:
        match t, U:
            case Lam(name=name, body=body), CPi(dom=A, cod=B):
                inner = self.check(ctx.extend(name, A), body, B)
                return _wrap(U, Lam(name, inner, span=t.span))
            case Lam(name=name, body=body), CUnknown():
                inner = self.check(ctx.extend(name, CUnknown()), body, CUnknown())
                return _wrap(DYN_ARROW, Lam(name, inner, span=t.span))
            case Lam(), _:
                raise GdtlTypeError(
                    f"expected a term of type {pretty(U, ctx.names)}, found a function",
                    expected=U,
                )
            case Pi(name=name, dom=A, cod=B), (CType() | CUnknown()):
                eA = self.check(ctx, A, U)
                uA = self.norm.check(ctx, A, U)
                return Pi(name, eA, self.check(ctx.extend(name, uA), B, U), span=t.span)
        e, S = self.synth(ctx, t)
        if cumulative(S, U) or S == U:
            return e
        witness = meet(S, U)
        if witness is None:
            raise GdtlTypeError(
                f"type mismatch: expected {pretty(U, ctx.names)}, got {pretty(S, ctx.names)}",
                expected=U, actual=S, span=t.span,
            )
        return _wrap(witness, e)


def elab_synth(ctx: Context, t: Term,
               norm_fuel: int = DEFAULT_NORM_FUEL) -> tuple[EvTerm, Canonical]:
    return Elaborator(norm_fuel).synth(ctx, t)


def elab_check(ctx: Context, t: Term, U: Canonical,
               norm_fuel: int = DEFAULT_NORM_FUEL) -> EvTerm:
    return Elaborator(norm_fuel).check(ctx, t, U)


def compose_evidence(e1: Evidence, e2: Evidence) -> Optional[Evidence]:
    """Consistent transitivity: the meet of two witnesses, None when undefined."""
    witness = meet(e1.witness, e2.witness)
    return None if witness is None else Evidence(witness)


def erase(et: Node) -> Node:
    """Drop every evidence wrapper."""
    while isinstance(et, WithEv):
        et = et.term
    return map_children(et, lambda child, bound: erase(child))


# =============================================================================
# Evidence-term typing
# =============================================================================

class _EvTyper:
    def __init__(self, norm_fuel: int):
        self.norm = Normalizer(norm_fuel)

    def type_of(self, ctx: Context, e: EvTerm) -> Canonical:
        match e:
            case Var(index=i):
                return ctx.lookup(i)
            case Err() | Unknown():
                return CUnknown()
            case Lam():
                raise GdtlTypeError("function without evidence", span=e.span)
            case WithEv(evidence=ev, term=inner):
                W = ev.witness
                if isinstance(inner, Lam):
                    self.check_lam(ctx, inner, W)
                elif isinstance(inner, WithEv):
                    # the next step composes the two witnesses or fails
                    self.type_of(ctx, inner)
                else:
                    self.check_evidence(ctx, inner, W)
                return W
            case App(fn=fn, arg=arg):
                Uf = self.type_of(ctx, fn)
                A = dom(Uf)
                if A is None:
                    raise GdtlTypeError(
                        f"applying a term of type {pretty(Uf, ctx.names)}", actual=Uf, span=e.span,
                    )
                self.check(ctx, arg, A)
                return self.norm.cod_sub(self.norm.check(ctx, arg, A), Uf)
            case Pi(name=name, dom=A, cod=B):
                self.type_of(ctx, A)
                UA, _ = self.norm.type_level(ctx, A)
                self.type_of(ctx.extend(name, UA), B)
                return self.norm.synth(ctx, e)[1]
        for child, bound in _term_children(e):
            self.type_of(ctx, child)
        return self.norm.synth(ctx, e)[1]

    def check_lam(self, ctx: Context, lam: Lam, U: Canonical) -> None:
        if isinstance(U, CPi):
            self.check(ctx.extend(lam.name, U.dom), lam.body, U.cod)
        elif isinstance(U, CUnknown):
            self.check(ctx.extend(lam.name, CUnknown()), lam.body, CUnknown())
        else:
            raise GdtlTypeError(f"function carries evidence {pretty(U, ctx.names)}",
                                expected=U, span=lam.span)

    def check_evidence(self, ctx: Context, inner: EvTerm, W: Canonical) -> None:
        """``⟨W⟩ inner``: a raw value needs W ⊑ T ⊓ W for its type T, anything else consistency."""
        T = self.type_of(ctx, inner)
        if cumulative(T, W):
            return
        if is_raw_value(inner):
            M = meet(T, W)
            if M is not None and precision(W, M):
                return
        elif consistent(T, W):
            return
        raise GdtlTypeError(
            f"evidence {pretty(W, ctx.names)} does not refine {pretty(T, ctx.names)}",
            expected=T, actual=W, span=inner.span,
        )

    def check(self, ctx: Context, e: EvTerm, U: Canonical) -> None:
        T = self.type_of(ctx, e)
        if cumulative(T, U) or consistent(T, U):
            return
        raise GdtlTypeError(
            f"evidence term has type {pretty(T, ctx.names)}, expected {pretty(U, ctx.names)}",
            expected=U, actual=T, span=e.span,
        )


def _term_children(e: Term):
    return [(child, bound) for child, bound in children(e) if isinstance(child, Term)]


def ev_type(ctx: Context, et: EvTerm, norm_fuel: int = DEFAULT_NORM_FUEL) -> Canonical:
    """The type of an evidence term.

    ``⟨W⟩ e`` has type ``W``; the inner term must be consistent with it.

    Raises:
        GdtlTypeError: for an ill-typed machine state
    """
    return _EvTyper(norm_fuel).type_of(ctx, et)


def ev_check(ctx: Context, et: EvTerm, U: Canonical, norm_fuel: int = DEFAULT_NORM_FUEL) -> None:
    _EvTyper(norm_fuel).check(ctx, et, U)


# =============================================================================
# Values
# =============================================================================

_CONSTRUCTORS = (Succ, Vec, Nil, Cons, Eq, Refl)


def is_raw_value(e: Node) -> bool:
    if isinstance(e, (Lam, Pi, TypeU, Nat, Zero, Unknown)):
        return True
    if isinstance(e, _CONSTRUCTORS):
        return all(is_value(child) for child, _ in _term_children(e))
    return False


def is_value(e: Node) -> bool:
    """A raw value, optionally under exactly one evidence wrapper."""
    if isinstance(e, WithEv):
        return is_raw_value(e.term)
    return is_raw_value(e)


def _split(v: EvTerm) -> tuple[Optional[Canonical], EvTerm]:
    if isinstance(v, WithEv):
        return v.evidence.witness, v.term
    return None, v


# =============================================================================
# Step results
# =============================================================================

@dataclass(frozen=True)
class Stepped:
    term: EvTerm
    rule: str


@dataclass(frozen=True)
class Value:
    term: EvTerm
    steps: int = field(default=0, compare=False)


@dataclass(frozen=True)
class RuntimeErr:
    """A failed evidence composition: ``⟨left⟩ ⊓ ⟨right⟩`` is undefined."""
    left: Optional[Canonical]
    right: Optional[Canonical]
    rule: str = "StepAscrFail"
    steps: int = field(default=0, compare=False)

    def describe(self, unicode: bool = True) -> str:
        if self.left is None or self.right is None:
            return "runtime type error"
        left = pretty(Evidence(self.left), unicode=unicode)
        right = pretty(Evidence(self.right), unicode=unicode)
        meet_sign = "⊓" if unicode else "/\\"
        return f"runtime type error: {left} {meet_sign} {right} undefined"


@dataclass(frozen=True)
class OutOfFuel:
    """The step budget ran out; stands in for divergence."""
    fuel_used: int
    term: Optional[EvTerm] = field(default=None, compare=False)


StepResult = Union[Stepped, Value, RuntimeErr]
RunResult = Union[Value, RuntimeErr, OutOfFuel]


# =============================================================================
# The machine
# =============================================================================

# Evaluation order of the subterms each form evaluates before it reduces.
_EVAL_FIELDS: dict[type, tuple[str, ...]] = {
    WithEv: ("term",),
    App: ("fn", "arg"),
    Ascribe: ("term",),
    Succ: ("pred",),
    Vec: ("elem", "length"),
    Nil: ("elem",),
    Cons: ("elem", "length", "head", "tail"),
    Eq: ("ty", "lhs", "rhs"),
    Refl: ("ty", "value"),
    NatElim: ("motive", "base", "step", "scrutinee"),
    VecElim: ("elem", "length", "motive", "base", "step", "scrutinee"),
    EqElim: ("ty", "motive", "method", "lhs", "rhs", "proof"),
}


def _next_field(e: EvTerm) -> Optional[str]:
    for name in _EVAL_FIELDS.get(type(e), ()):
        if not is_value(getattr(e, name)):
            return name
    return None


class _Failure(Exception):
    def __init__(self, err: RuntimeErr):
        self.err = err


class Machine:
    """Runs an evidence term, keeping the evaluation context between steps.

    The context is a stack of ``(parent, field)`` pairs, so deep chains of
    pending evidence are handled without recursion.
    """

    def __init__(self, et: EvTerm, norm_fuel: int = DEFAULT_NORM_FUEL):
        self.focus: EvTerm = et
        self.path: list[tuple[EvTerm, str]] = []
        self.norm_fuel = norm_fuel

    def term(self) -> EvTerm:
        """The whole current state, with the focus plugged back in."""
        result = self.focus
        for parent, name in reversed(self.path):
            result = replace(parent, **{name: result})
        return result

    def settle(self) -> Optional[Union[Value, RuntimeErr]]:
        """Move the focus to the next redex; return the result if there is none."""
        while True:
            focus = self.focus
            if isinstance(focus, Err):
                if self.path:
                    return None
                return RuntimeErr(focus.left, focus.right, "StepContextErr")
            if is_value(focus):
                if not self.path:
                    return Value(focus)
                parent, name = self.path.pop()
                self.focus = replace(parent, **{name: focus})
                continue
            name = _next_field(focus)
            if name is None:
                return None
            self.path.append((focus, name))
            self.focus = getattr(focus, name)

    def step(self) -> Union[str, Value, RuntimeErr]:
        """Perform one step; return the rule name, or the final result."""
        done = self.settle()
        if done is not None:
            return done
        if isinstance(self.focus, Err):
            self.path.clear()
            return "StepContextErr"
        try:
            rule, self.focus = _contract(self.focus, self.norm_fuel)
        except _Failure as failure:
            logger.debug("evidence composition failed: %s", failure.err.describe())
            return failure.err
        return rule


def _contract(e: EvTerm, norm_fuel: int) -> tuple[str, EvTerm]:
    """Reduce a redex whose evaluated subterms are all values."""
    norm = Normalizer(norm_fuel)
    match e:
        case WithEv(evidence=outer, term=WithEv(evidence=inner, term=raw)):
            witness = meet(inner.witness, outer.witness)
            if witness is None:
                raise _Failure(RuntimeErr(inner.witness, outer.witness, "StepAscrFail"))
            return "StepAscr", _wrap(witness, raw)
        case Ascribe(term=term):
            return "StepAscr", term
        case App(fn=fn, arg=arg):
            return _apply(fn, arg, norm)
        case NatElim():
            return _nat_elim(e, norm)
        case VecElim():
            return _vec_elim(e, norm)
        case EqElim():
            return _eq_elim(e, norm)
        case Var():
            raise StuckError(f"free variable #{e.index} at runtime")
    raise StuckError(f"no rule applies to {type(e).__name__}")


def _argument_evidence(raw: EvTerm, witness: Optional[Canonical], norm: Normalizer) -> Canonical:
    if witness is not None:
        return witness
    if isinstance(raw, (Lam, Unknown)):
        return CUnknown()
    return norm.synth(Context(), raw)[1]


def _apply(fn: EvTerm, arg: EvTerm, norm: Normalizer) -> tuple[str, EvTerm]:
    W1, rf = _split(fn)
    W2, ra = _split(arg)
    fn_ev = CUnknown() if W1 is None else W1
    arg_ev = _argument_evidence(ra, W2, norm)
    if not isinstance(rf, (Lam, Unknown)):
        raise _Failure(RuntimeErr(fn_ev, DYN_ARROW, "StepAppFailTrans"))
    expected = dom(fn_ev)
    witness = None if expected is None else meet(arg_ev, expected)
    if witness is None:
        raise _Failure(RuntimeErr(arg_ev, expected or DYN_ARROW, "StepAppFailTrans"))
    replacement = _wrap(witness, ra)
    u = norm.check(Context(), replacement, witness)
    result_ev = norm.cod_sub(u, fn_ev)
    if isinstance(rf, Unknown):
        return "StepAppDyn", _wrap(result_ev, Unknown())
    body = eval_subst(replacement, u, witness, rf.body, norm)
    return ("StepAppEvRaw" if W1 is None else "StepAppEv"), _wrap(result_ev, body)


def eval_subst(replacement: EvTerm, u: Canonical, X: Canonical, body: EvTerm,
               norm: Optional[Normalizer] = None) -> EvTerm:
    """Substitute a closed value for variable 0 of ``body``.

    Term occurrences become ``replacement``; evidence witnesses get the
    normal form ``u`` (of type ``X``) by hereditary substitution.
    """
    norm = norm or Normalizer()

    def go(n: Node, depth: int) -> Node:
        if isinstance(n, Var):
            if n.index == depth:
                return replacement
            return Var(n.index - 1, n.name, span=n.span) if n.index > depth else n
        if isinstance(n, Evidence):
            return Evidence(norm.hsub(u, depth, X, n.witness))
        return map_children(n, lambda child, bound: go(child, depth + bound))

    return go(body, 0)


# --- eliminators ---------------------------------------------------------------

def _nf(e: EvTerm, U: Canonical, norm: Normalizer) -> Canonical:
    try:
        return norm.check(Context(), e, U)
    except GdtlTypeError:
        return CUnknown()


def _motive_nf(m: EvTerm, norm: Normalizer) -> Canonical:
    return norm.synth(Context(), m)[0]


def _nat_elim(e: NatElim, norm: Normalizer) -> tuple[str, EvTerm]:
    _, raw = _split(e.scrutinee)
    if isinstance(raw, Zero):
        return "StepNatElimZero", e.base
    if isinstance(raw, Succ):
        k = raw.pred
        recursive = NatElim(e.motive, e.base, e.step, k, span=e.span)
        return "StepNatElimSucc", App(App(e.step, k), recursive)
    if isinstance(raw, Unknown):
        um = _motive_nf(e.motive, norm)
        return "StepNatElimDyn", _wrap(norm.apply_nat_motive(um, CUnknown()), Unknown())
    raise StuckError(f"natElim on {type(raw).__name__}")


def _vec_elim(e: VecElim, norm: Normalizer) -> tuple[str, EvTerm]:
    _, raw = _split(e.scrutinee)
    um = _motive_nf(e.motive, norm)
    un = _nf(e.length, CNat(), norm)
    UA = norm.type_level(Context(), e.elem)[0]
    uv = _nf(e.scrutinee, CVec(UA, un), norm)
    result_ty = norm.apply_vec_motive(UA, um, un, uv)
    if isinstance(raw, Nil):
        return "StepVecElimNil", _wrap(result_ty, e.base)
    if isinstance(raw, Cons):
        recursive = VecElim(e.elem, raw.length, e.motive, e.base, e.step, raw.tail, span=e.span)
        call = App(App(App(App(e.step, raw.length), raw.head), raw.tail), recursive)
        return "StepVecElimCons", _wrap(result_ty, call)
    if isinstance(raw, Unknown):
        return "StepVecElimDyn", _wrap(result_ty, Unknown())
    raise StuckError(f"vecElim on {type(raw).__name__}")


def _eq_elim(e: EqElim, norm: Normalizer) -> tuple[str, EvTerm]:
    _, raw = _split(e.proof)
    um = _motive_nf(e.motive, norm)
    UA = norm.type_level(Context(), e.ty)[0]
    ux, uy = _nf(e.lhs, UA, norm), _nf(e.rhs, UA, norm)
    up = _nf(e.proof, CEq(UA, ux, uy), norm)
    result_ty = norm.apply_eq_motive(UA, um, ux, uy, up)
    if isinstance(raw, Refl):
        return "StepEqElimRefl", _wrap(result_ty, App(e.method, raw.value))
    if isinstance(raw, Unknown):
        return "StepEqElimDyn", _wrap(result_ty, App(e.method, _wrap(CUnknown(), Unknown())))
    raise StuckError(f"eqElim on {type(raw).__name__}")


# =============================================================================
# Driving the machine
# =============================================================================

def step(et: EvTerm, norm_fuel: int = DEFAULT_NORM_FUEL) -> StepResult:
    """One small step of the whole term.

    Raises:
        StuckError: when no rule applies to a non-value
    """
    machine = Machine(et, norm_fuel)
    outcome = machine.step()
    if isinstance(outcome, str):
        return Stepped(machine.term(), outcome)
    return outcome


def _drive(machine: Machine, fuel: int) -> Iterator[Union[str, RunResult]]:
    """Yield rule names as the machine steps, then one final result."""
    if fuel < 0:
        raise ValueError(f"fuel must be non-negative, got {fuel}")
    steps = 0
    while True:
        if steps >= fuel:
            done = machine.settle()
            yield OutOfFuel(steps) if done is None else replace(done, steps=steps)
            return
        try:
            outcome = machine.step()
        except (FuelExhausted, RecursionError):
            logger.debug("normalization budget ran out at runtime after %d steps", steps)
            yield OutOfFuel(steps)
            return
        if not isinstance(outcome, str):
            yield replace(outcome, steps=steps)
            return
        steps += 1
        yield outcome


def run(et: EvTerm, fuel: int, norm_fuel: int = DEFAULT_NORM_FUEL) -> RunResult:
    """Step ``et`` until it is a value, fails, or ``fuel`` steps have been taken.

    Args:
        et: A closed, elaborated program
        fuel: Maximum number of steps
        norm_fuel: Budget for each normalization the machine performs

    Returns:
        ``Value``, ``RuntimeErr`` or ``OutOfFuel``
    """
    for outcome in _drive(Machine(et, norm_fuel), fuel):
        if not isinstance(outcome, str):
            return outcome
    raise AssertionError("machine stopped without a result")


def trace(et: EvTerm, fuel: int,
          norm_fuel: int = DEFAULT_NORM_FUEL) -> Iterator[Union[tuple[str, EvTerm], RunResult]]:
    """Yield ``(rule, state)`` after every step, then the final result."""
    machine = Machine(et, norm_fuel)
    for outcome in _drive(machine, fuel):
        if isinstance(outcome, str):
            yield outcome, machine.term()
        else:
            yield outcome


def elaborate_program(term: Term, norm_fuel: int = DEFAULT_NORM_FUEL) -> tuple[EvTerm, Canonical]:
    """Elaborate a closed program; returns the evidence term and its type."""
    return Elaborator(norm_fuel).synth(Context(), term)
