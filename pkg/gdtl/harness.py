"""Random well-typed programs and executable metatheory checks.

The generator is type-directed: it picks a goal type from a fixed menu
and builds a term for it, then re-checks the result, so every triple it
returns typechecks. ``check_guarantees`` lowers the precision of
generated programs and checks that typing, normal forms and runtime
behaviour degrade the way the gradual guarantees say they must.
``safety_audit`` re-types every machine state, and ``lattice_oracle``
compares the structural lattice operations with their set-based reading.

Example:
    reports = check_guarantees(seed=42, count=100)
    failures = [r for r in reports if r.verdict is Verdict.COUNTEREXAMPLE]
"""

from __future__ import annotations

import json
import logging
import random
import re
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterator, NamedTuple, Optional, Union

from .config import GdtlConfig
from .core import (
    App,
    Ascribe,
    Atomic,
    Canonical,
    CLam,
    Context,
    CPi,
    CType,
    CUnknown,
    Cons,
    Eq,
    EqElim,
    EvTerm,
    Frame,
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
    Zero,
    alpha_eq,
    child_pairs,
    children,
    numeral,
    pretty,
    rebuild,
    shift,
    subst,
    to_term,
)
from .enums import Property, Verdict
from .errors import FuelExhausted, GdtlTypeError, ParseError, StuckError
from .evidence import (
    OutOfFuel,
    RuntimeErr,
    Value,
    elaborate_program,
    erase,
    ev_check,
    run,
    trace,
)
from .gradops import (
    consistent,
    gradual_universe,
    level_precision,
    meet,
    oracle_consistent,
    oracle_meet,
    oracle_precision,
    precision,
    same_head,
)
from .normalize import DEFAULT_NORM_FUEL, Normalizer
from .static import Stuck, is_static, scheck, srun, strip_ascriptions
from .surface import parse_program

logger = logging.getLogger(__name__)


# =============================================================================
# Reports
# =============================================================================

@dataclass(frozen=True)
class PropertyReport:
    """The verdict of one property on one generated case."""
    seed: int
    property: Property
    verdict: Verdict
    counterexample: Optional[str] = None

    def to_dict(self) -> dict:
        data = {"seed": self.seed, "property": self.property.value, "verdict": self.verdict.value}
        if self.counterexample is not None:
            data["counterexample"] = self.counterexample
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False)


def counterexamples(reports: list[PropertyReport]) -> list[PropertyReport]:
    return [r for r in reports if r.verdict is Verdict.COUNTEREXAMPLE]


# =============================================================================
# Generation
# =============================================================================

class Goal(NamedTuple):
    """A generator goal: a type from the menu, with its index for Vec and Eq."""
    kind: str
    index: int = 0


GRADUAL_GOALS = ("Nat", "Type", "Nat->Nat", "poly", "Vec", "Eq", "dyn", "A", "A->A")
STATIC_GOALS = ("A", "A->A", "poly", "Type")

# The generator's free variables: A : Type 1, a : A, f : A -> A.
_BASE_LOCALS = (("A", "Type"), ("a", "A"), ("f", "A->A"))


def base_context() -> Context:
    return (
        Context()
        .extend("A", CType(1))
        .extend("a", Atomic(0, (), "A"))
        .extend("f", CPi("x", Atomic(1, (), "A"), Atomic(2, (), "A"), 1))
    )


def _pick_goal(rng: random.Random, kinds: tuple[str, ...]) -> Goal:
    kind = rng.choice(kinds)
    return Goal(kind, rng.randint(0, 2) if kind in ("Vec", "Eq") else 0)


class _Generator:
    def __init__(self, rng: random.Random, static: bool, unknown_rate: float):
        self.rng = rng
        self.static = static
        self.rate = unknown_rate
        self.locals: list[tuple[str, str]] = list(_BASE_LOCALS)

    @contextmanager
    def binding(self, name: str, key: str) -> Iterator[None]:
        self.locals.append((name, key))
        try:
            yield
        finally:
            self.locals.pop()

    def vars_of(self, key: str) -> list[Var]:
        depth = len(self.locals)
        return [Var(depth - 1 - pos, name) for pos, (name, k) in enumerate(self.locals) if k == key]

    def latest(self, key: str) -> Var:
        return self.vars_of(key)[-1]

    def goal_type(self, goal: Goal) -> Term:
        match goal.kind:
            case "Nat":
                return Nat()
            case "Type":
                return TypeU(1)
            case "A":
                return self.latest("Type")
            case "B":
                return self.latest("B:Type")
            case "A->A":
                with self.binding("_", "-"):
                    cod = self.latest("Type")
                return Pi("_", self.latest("Type"), cod)
            case "Nat->Nat":
                return Pi("_", Nat(), Nat())
            case "poly":
                return Pi("B", TypeU(1), Pi("_", Var(0, "B"), Var(1, "B")))
            case "Vec":
                return Vec(Nat(), numeral(goal.index))
            case "Eq":
                return Eq(Nat(), numeral(goal.index), numeral(goal.index))
        return Unknown()

    def term(self, goal: Goal, depth: int) -> Term:
        if not self.static and self.rng.random() < self.rate:
            return self.imprecise(goal, depth)
        options = self.leaves(goal)
        if depth > 1:
            options += self.compounds(goal, depth - 1)
            options.append(lambda: Ascribe(self.term(goal, depth - 1), self.goal_type(goal)))
        return self.rng.choice(options)()

    def imprecise(self, goal: Goal, depth: int) -> Term:
        roll = self.rng.random()
        if roll < 1 / 3 or depth <= 1:
            return Unknown()
        inner = self.term(goal, depth - 1)
        return Ascribe(inner, Unknown() if roll < 2 / 3 else self.goal_type(goal))

    def function(self, goal: Goal, depth: int) -> Term:
        """A term for an arrow goal that also synthesizes."""
        fn = self.term(goal, depth)
        return Ascribe(fn, self.goal_type(goal)) if isinstance(fn, Lam) else fn

    def leaves(self, goal: Goal) -> list[Callable[[], Term]]:
        gradual = not self.static
        match goal.kind:
            case "Nat":
                return [Zero] + [lambda v=v: v for v in self.vars_of("Nat")]
            case "A":
                return [lambda v=v: v for v in self.vars_of("A")]
            case "B":
                return [lambda: self.latest("B")]
            case "A->A":
                return [lambda: self.latest("A->A")]
            case "Nat->Nat":
                return [lambda: self.lam("x", "Nat", lambda: Var(0, "x"))]
            case "poly":
                return [lambda: self.poly(lambda: self.latest("B"))]
            case "Type":
                options = [lambda: self.latest("Type")]
                return options + [Nat] if gradual else options
            case "Vec":
                return [lambda: _vector(goal.index)]
            case "Eq":
                return [lambda: Refl(Nat(), numeral(goal.index))]
        return [Unknown]

    def compounds(self, goal: Goal, depth: int) -> list[Callable[[], Term]]:
        nat = Goal("Nat")
        match goal.kind:
            case "Nat":
                k = self.rng.randint(0, 2)
                return [
                    lambda: Succ(self.term(nat, depth)),
                    lambda: NatElim(Lam("_", Nat()), self.term(nat, depth),
                                    Lam("k", Lam("r", Succ(Var(0, "r")))), self.term(nat, depth)),
                    lambda: App(self.function(Goal("Nat->Nat"), depth), self.term(nat, depth)),
                    lambda: VecElim(Nat(), numeral(k), Lam("k", Lam("v", Nat())), Zero(),
                                    Lam("k", Lam("h", Lam("t", Lam("r", Var(2, "h"))))),
                                    self.term(Goal("Vec", k), depth)),
                    lambda: EqElim(Nat(), Lam("x", Lam("y", Lam("p", Nat()))), Lam("z", Var(0, "z")),
                                   numeral(k), numeral(k), self.term(Goal("Eq", k), depth)),
                ]
            case "A":
                arg = Goal("A")
                return [
                    lambda: App(self.latest("A->A"), self.term(arg, depth)),
                    lambda: App(self.function(Goal("A->A"), depth), self.term(arg, depth)),
                ]
            case "B":
                return [lambda: Ascribe(self.latest("B"), self.latest("B:Type"))]
            case "A->A":
                return [lambda: self.lam("x", "A", lambda: self.term(Goal("A"), depth))]
            case "Nat->Nat":
                return [lambda: self.lam("x", "Nat", lambda: self.term(nat, depth))]
            case "poly":
                return [lambda: self.poly(lambda: self.term(Goal("B"), depth))]
            case "Type":
                options = [lambda: self.arrow_type(depth)]
                if not self.static:
                    options += [
                        lambda: Vec(Nat(), self.term(nat, depth)),
                        lambda: Eq(Nat(), self.term(nat, depth), self.term(nat, depth)),
                        lambda: Pi("_", Nat(), Nat()),
                    ]
                return options
            case "Vec" if goal.index > 0:
                n = goal.index - 1
                return [lambda: Cons(Nat(), numeral(n), self.term(nat, depth),
                                     self.term(Goal("Vec", n), depth))]
            case "dyn":
                menu = tuple(kind for kind in GRADUAL_GOALS if kind != "dyn")
                inner = _pick_goal(self.rng, menu)
                return [
                    lambda: Ascribe(self.term(inner, depth), self.goal_type(inner)),
                    lambda: Ascribe(self.term(inner, depth), Unknown()),
                ]
        return []

    def lam(self, name: str, key: str, body: Callable[[], Term]) -> Term:
        with self.binding(name, key):
            return Lam(name, body())

    def poly(self, body: Callable[[], Term]) -> Term:
        with self.binding("B", "B:Type"):
            with self.binding("y", "B"):
                return Lam("B", Lam("y", body()))

    def arrow_type(self, depth: int) -> Term:
        dom = self.term(Goal("Type"), depth)
        with self.binding("x", "-"):
            cod = self.term(Goal("Type"), depth)
        return Pi("x", dom, cod)


def _vector(length: int) -> Term:
    result: Term = Nil(Nat())
    for n in range(length):
        result = Cons(Nat(), numeral(n), Zero(), result)
    return result


def gen_well_typed(seed: int, size: int,
                   config: Optional[GdtlConfig] = None) -> tuple[Context, Term, Canonical]:
    """Generate a deterministic ``(ctx, t, U)`` with ``t`` checking against ``U``.

    Seeds divisible by 3 draw from the fragment without ``?`` and inductives.

    Raises:
        ValueError: if ``size`` is less than 1
    """
    if size < 1:
        raise ValueError(f"size must be at least 1, got {size}")
    config = config or GdtlConfig.default()
    rng = random.Random(seed)
    static = seed % 3 == 0
    goal = _pick_goal(rng, STATIC_GOALS if static else GRADUAL_GOALS)
    fallback = Goal("A") if static else Goal("dyn")
    ctx = base_context()
    while True:
        for attempt in range(config.max_retries):
            gen = _Generator(rng, static, config.unknown_rate)
            t = gen.term(goal, size)
            if static and not is_static(t):
                continue
            norm = Normalizer(config.norm_fuel)
            try:
                U, _ = norm.type_level(ctx, gen.goal_type(goal))
                norm.check(ctx, t, U)
            except (GdtlTypeError, FuelExhausted) as exc:
                logger.debug("seed %d attempt %d rejected: %s", seed, attempt, exc)
                continue
            return ctx, t, U
        if size > 1:
            size -= 1
        elif goal != fallback:
            goal = fallback
        else:
            return ctx, Var(1, "a"), ctx.lookup(1)


# =============================================================================
# Precision mutation
# =============================================================================

Position = tuple[int, ...]


def _positions(node: Node, is_top: Callable[[Node], bool],
               kind: type) -> list[Position]:
    found: list[Position] = []

    def go(n: Node, path: Position) -> None:
        if not isinstance(n, kind):
            return
        if not is_top(n):
            found.append(path)
        for i, (child, _) in enumerate(children(n)):
            go(child, path + (i,))

    go(node, ())
    return found


def _replace_at(node: Node, path: Position, new: Node) -> Optional[Node]:
    """``node`` with the subterm at ``path`` replaced; None if the path is gone."""
    if not path:
        return new
    kids = [child for child, _ in children(node)]
    head, rest = path[0], path[1:]
    if head >= len(kids):
        return None
    inner = _replace_at(kids[head], rest, new)
    if inner is None:
        return None
    kids[head] = inner
    return rebuild(node, kids)


def _term_positions(t: Term) -> list[Position]:
    return _positions(t, lambda n: isinstance(n, Unknown), Term)


def lower_precision(t: Term, seed: int) -> Term:
    """Replace one uniformly chosen non-``?`` subterm of ``t`` with ``?``."""
    positions = _term_positions(t)
    if not positions:
        return t
    path = random.Random(seed).choice(positions)
    return _replace_at(t, path, Unknown())


def lower_canonical(u: Canonical, seed: int) -> Canonical:
    """Like ``lower_precision`` for canonical forms; frames are left alone."""
    positions = _positions(u, lambda n: isinstance(n, CUnknown), Canonical)
    if not positions:
        return u
    path = random.Random(seed).choice(positions)
    return _replace_at(u, path, CUnknown())


def eta_step(atom: Atomic, name: str = "x") -> CLam:
    """One eta-expansion of a neutral form: ``n`` becomes ``fun x => n x``."""
    spine = tuple(shift(entry, 1) for entry in atom.spine) + (Atomic(0, (), name),)
    return CLam(name, Atomic(atom.index + 1, spine, atom.name))


def eta_precision(a: Node, b: Node) -> bool:
    """``a ⊑ b`` after expanding neutral forms to the lambda depth of the other side.

    Both sides are expanded in lock step, so ``fun x => f x`` and
    ``fun x => f ?`` compare body to body instead of ``f`` against a lambda.
    """
    if isinstance(a, CLam) and isinstance(b, Atomic):
        b = eta_step(b, a.name)
    elif isinstance(a, Atomic) and isinstance(b, CLam):
        a = eta_step(a, b.name)
    if isinstance(a, Frame) != isinstance(b, Frame):
        return False
    if isinstance(b, CUnknown):
        return True
    if isinstance(a, CUnknown) or not same_head(a, b):
        return False
    if isinstance(a, CPi) and not level_precision(a.level, b.level):
        return False
    return all(eta_precision(x, y) for x, y in child_pairs(a, b))


def precision_mod_eta(u1: Canonical, U1: Canonical, u2: Canonical, U2: Canonical) -> bool:
    """``u1 : U1`` is at least as precise as ``u2 : U2`` up to eta."""
    return eta_precision(u1, u2) and eta_precision(U1, U2)


def term_precision(t1: Node, t2: Node) -> bool:
    """Precision on erased terms: ``?`` is above everything."""
    if isinstance(t2, Unknown):
        return True
    if type(t1) is not type(t2):
        return False
    if isinstance(t1, (Var, TypeU)) and t1 != t2:
        return False
    return all(term_precision(x, y) for x, y in child_pairs(t1, t2))


# =============================================================================
# Gradual guarantees
# =============================================================================

# Closes programs over the generator's context: A := Nat, a := 0, f := succ.
_CLOSING = (
    Ascribe(Lam("x", Succ(Var(0, "x"))), Pi("_", Nat(), Nat())),
    Zero(),
    Nat(),
)


def close_program(t: Term) -> Term:
    for value in _CLOSING:
        t = subst(t, value)
    return t


def _closed(t: Term, U: Canonical, norm_fuel: int) -> tuple[EvTerm, Canonical]:
    program = Ascribe(close_program(t), close_program(to_term(U)))
    return elaborate_program(program, norm_fuel)


Outcome = tuple[Verdict, Optional[str]]


@dataclass(frozen=True)
class _Case:
    ctx: Context
    precise: Term
    lowered: Term
    ty: Canonical
    seed: int = 0


def _static_guarantee(case: _Case, config: GdtlConfig) -> Outcome:
    try:
        Normalizer(config.norm_fuel).check(case.ctx, case.lowered, case.ty)
    except GdtlTypeError as exc:
        return Verdict.COUNTEREXAMPLE, (
            f"{pretty(case.lowered, case.ctx.names)} no longer checks: {exc}"
        )
    except FuelExhausted:
        return Verdict.SKIPPED, None
    return Verdict.OK, None


def _normalization_guarantee(case: _Case, config: GdtlConfig) -> Outcome:
    try:
        u1 = Normalizer(config.norm_fuel).check(case.ctx, case.precise, case.ty)
        u2 = Normalizer(config.norm_fuel).check(case.ctx, case.lowered, case.ty)
    except (GdtlTypeError, FuelExhausted):
        return Verdict.SKIPPED, None
    if precision_mod_eta(u1, case.ty, u2, case.ty):
        return Verdict.OK, None
    names = case.ctx.names
    return Verdict.COUNTEREXAMPLE, f"{pretty(u1, names)} is not below {pretty(u2, names)}"


def _erased_states(et: EvTerm, fuel: int, norm_fuel: int):
    states = [erase(et)]
    result = None
    for item in trace(et, fuel, norm_fuel):
        if isinstance(item, tuple):
            state = erase(item[1])
            if state != states[-1]:
                states.append(state)
        else:
            result = item
    return states, result


def _aligned(precise: list[Node], lowered: list[Node], stutter: int) -> Optional[int]:
    """Index of the first precise state with no counterpart in the window, if any."""
    j = 0
    for i, state in enumerate(precise):
        window = range(j, min(j + stutter + 2, len(lowered)))
        match = next((k for k in window if term_precision(state, lowered[k])), None)
        if match is None:
            return i
        j = match
    return None


def _dynamic_guarantee(case: _Case, config: GdtlConfig, fuel: int) -> Outcome:
    try:
        e1, _ = _closed(case.precise, case.ty, config.norm_fuel)
        e2, _ = _closed(case.lowered, case.ty, config.norm_fuel)
    except (GdtlTypeError, FuelExhausted):
        return Verdict.SKIPPED, None
    try:
        states1, r1 = _erased_states(e1, fuel, config.norm_fuel)
        if not isinstance(r1, Value):
            return Verdict.SKIPPED, None
        # Less precise programs take extra administrative steps.
        states2, r2 = _erased_states(e2, fuel * (config.stutter + 1), config.norm_fuel)
    except StuckError as exc:
        return Verdict.COUNTEREXAMPLE, f"machine stuck: {exc}"
    if isinstance(r2, RuntimeErr):
        return Verdict.COUNTEREXAMPLE, f"less precise program fails: {r2.describe()}"
    if isinstance(r2, OutOfFuel):
        return Verdict.COUNTEREXAMPLE, f"less precise program ran out of fuel after {r2.fuel_used} steps"
    v1, v2 = erase(r1.term), erase(r2.term)
    if not term_precision(v1, v2):
        return Verdict.COUNTEREXAMPLE, f"value {pretty(v1)} is not below {pretty(v2)}"
    missing = _aligned(states1, states2, config.stutter)
    if missing is not None:
        return Verdict.COUNTEREXAMPLE, (
            f"state {missing} ({pretty(states1[missing])}) has no counterpart"
        )
    return Verdict.OK, None


def abstract_context(ctx: Context, t: Term, U: Canonical) -> Term:
    """``(fun x1 ... xn => t) :: (x1 : T1) -> ... -> U``, closing ``ctx |- t : U``."""
    body, ty = t, to_term(U)
    for name, T in reversed(ctx.entries):
        body = Lam(name, body)
        ty = Pi(name, to_term(T), ty)
    return Ascribe(body, ty)


# Closed static terms swapped into generated programs; the result may be ill-typed.
_STATIC_FILLERS = (
    TypeU(1),
    Pi("X", TypeU(1), Var(0, "X")),
    Ascribe(Lam("X", Var(0, "X")), Pi("_", TypeU(1), TypeU(1))),
)


def static_variant(t: Term, seed: int) -> Term:
    """Replace one subterm of a static term with a closed static filler."""
    rng = random.Random(seed)
    positions = _term_positions(t)
    if not positions:
        return t
    return _replace_at(t, rng.choice(positions), rng.choice(_STATIC_FILLERS))


def compare_with_static(ctx: Context, t: Term, U: Canonical, fuel: int,
                        norm_fuel: int = DEFAULT_NORM_FUEL) -> Optional[str]:
    """Run a ``?``-free ``ctx |- t : U`` through the gradual and the static pipelines.

    The two checkers must agree on acceptance. Accepted programs are closed
    over ``ctx`` and run on both machines; the gradual value with its
    evidence erased must equal the static value.

    Returns:
        A description of the first disagreement, or None
    """
    try:
        Normalizer(norm_fuel).check(ctx, t, U)
        gradual_error = None
    except GdtlTypeError as exc:
        gradual_error = exc
    except FuelExhausted:
        return None
    try:
        scheck(ctx, t, U)
        static_error = None
    except GdtlTypeError as exc:
        static_error = exc
    if gradual_error is None and static_error is not None:
        return f"static checker rejects what the gradual one accepts: {static_error}"
    if gradual_error is not None and static_error is None:
        return f"gradual checker rejects what the static one accepts: {gradual_error}"
    if gradual_error is not None:
        return None
    program = abstract_context(ctx, t, U)
    try:
        et, _ = elaborate_program(program, norm_fuel)
        expected = srun(program, fuel)
    except FuelExhausted:
        return None
    if isinstance(expected, Stuck):
        return f"static machine is stuck at {pretty(expected.term)}"
    result = run(et, fuel, norm_fuel)
    if isinstance(result, RuntimeErr):
        return f"gradual machine fails: {result.describe()}"
    if not isinstance(result, Value):
        return None
    got, want = strip_ascriptions(erase(result.term)), strip_ascriptions(expected)
    if not alpha_eq(got, want):
        return f"gradual value {pretty(got)} differs from static value {pretty(want)}"
    return None


def _conservative_extension(case: _Case, config: GdtlConfig, fuel: int) -> Outcome:
    if not (is_static(case.precise) and is_static(to_term(case.ty))):
        return Verdict.SKIPPED, None
    for t in (case.precise, static_variant(case.precise, case.seed)):
        found = compare_with_static(case.ctx, t, case.ty, fuel, config.norm_fuel)
        if found is not None:
            return Verdict.COUNTEREXAMPLE, found
    return Verdict.OK, None


def _well_typed(case: _Case, norm_fuel: int) -> bool:
    try:
        Normalizer(norm_fuel).check(case.ctx, case.precise, case.ty)
    except (GdtlTypeError, FuelExhausted):
        return False
    return True


def _shrink(case: _Case, check: Callable[[_Case], Outcome], detail: str,
            norm_fuel: int) -> tuple[_Case, str]:
    """Replace subterms of both programs with ``?`` while the property still fails."""
    for _ in range(50):
        for path in _term_positions(case.precise)[1:]:
            precise = _replace_at(case.precise, path, Unknown())
            lowered = _replace_at(case.lowered, path, Unknown()) or case.lowered
            candidate = _Case(case.ctx, precise, lowered, case.ty, case.seed)
            if not _well_typed(candidate, norm_fuel):
                continue
            verdict, found = check(candidate)
            if verdict is Verdict.COUNTEREXAMPLE:
                case, detail = candidate, found
                break
        else:
            break
    return case, detail


def check_guarantees(seed: int, count: int, fuel: Optional[int] = None,
                     config: Optional[GdtlConfig] = None) -> list[PropertyReport]:
    """Check the gradual guarantees on ``count`` generated cases.

    Case ``i`` uses seed ``seed + i``; each case yields one report per
    property, and failing cases are shrunk before they are reported.

    Returns:
        Reports for the static, normalization, dynamic and conservative properties
    """
    config = config or GdtlConfig.default()
    fuel = config.property_fuel if fuel is None else fuel
    checks: dict[Property, Callable[[_Case], Outcome]] = {
        Property.STATIC: lambda c: _static_guarantee(c, config),
        Property.NORMALIZATION: lambda c: _normalization_guarantee(c, config),
        Property.DYNAMIC: lambda c: _dynamic_guarantee(c, config, fuel),
        Property.CONSERVATIVE: lambda c: _conservative_extension(c, config, fuel),
    }
    reports = []
    for case_seed in range(seed, seed + count):
        ctx, t, U = gen_well_typed(case_seed, config.gen_size, config)
        case = _Case(ctx, t, lower_precision(t, case_seed), U, case_seed)
        for prop, check in checks.items():
            verdict, detail = check(case)
            if verdict is Verdict.COUNTEREXAMPLE:
                shrunk, detail = _shrink(case, check, detail, config.norm_fuel)
                detail = f"{detail} [program: {pretty(shrunk.precise, ctx.names)}]"
            reports.append(PropertyReport(case_seed, prop, verdict, detail))
    logger.info("checked %d cases from seed %d: %d counterexamples",
                count, seed, len(counterexamples(reports)))
    return reports


# =============================================================================
# Type-safety audit
# =============================================================================

def audit_term(et: EvTerm, U: Canonical, fuel: int, norm_fuel: int = DEFAULT_NORM_FUEL) -> Optional[str]:
    """Run ``et`` and re-type every state at ``U``.

    Returns:
        A description of the first violation, or None
    """
    def retype(state: EvTerm, label: str) -> Optional[str]:
        try:
            ev_check(Context(), state, U, norm_fuel)
        except GdtlTypeError as exc:
            return f"{label}: {pretty(state)} is ill-typed: {exc}"
        except FuelExhausted:
            logger.debug("skipped re-typing %s: normalization budget ran out", label)
        return None

    problem = retype(et, "initial state")
    if problem:
        return problem
    try:
        for index, item in enumerate(trace(et, fuel, norm_fuel)):
            if isinstance(item, tuple):
                problem = retype(item[1], f"after step {index + 1} ({item[0]})")
                if problem:
                    return problem
    except StuckError as exc:
        return f"stuck: {exc}"
    return None


def safety_audit(seed: int, count: int, fuel: Optional[int] = None,
                 config: Optional[GdtlConfig] = None) -> list[PropertyReport]:
    config = config or GdtlConfig.default()
    fuel = config.property_fuel if fuel is None else fuel
    reports = []
    for case_seed in range(seed, seed + count):
        ctx, t, U = gen_well_typed(case_seed, config.gen_size, config)
        try:
            et, closed_ty = _closed(t, U, config.norm_fuel)
        except GdtlTypeError as exc:
            reports.append(PropertyReport(case_seed, Property.SAFETY, Verdict.COUNTEREXAMPLE,
                                          f"closed program does not elaborate: {exc}"))
            continue
        except FuelExhausted:
            reports.append(PropertyReport(case_seed, Property.SAFETY, Verdict.SKIPPED))
            continue
        problem = audit_term(et, closed_ty, fuel, config.norm_fuel)
        verdict = Verdict.OK if problem is None else Verdict.COUNTEREXAMPLE
        reports.append(PropertyReport(case_seed, Property.SAFETY, verdict, problem))
    logger.info("audited %d programs from seed %d", count, seed)
    return reports


# =============================================================================
# Lattice oracle
# =============================================================================

@dataclass(frozen=True)
class Disagreement:
    relation: str
    left: Canonical
    right: Canonical
    structural: object
    oracle: object

    def __str__(self) -> str:
        def show(x):
            return pretty(x) if isinstance(x, Node) else str(x)
        return (f"{self.relation}({pretty(self.left)}, {pretty(self.right)}): "
                f"structural {show(self.structural)}, oracle {show(self.oracle)}")


def lattice_oracle(depth: int = 1) -> list[Disagreement]:
    """Compare consistency, precision and meet with the bounded oracle.

    Every pair from ``gradual_universe(depth)`` is concretized one level
    deeper, so that ``?`` inside a form can stand for the form's siblings.
    """
    universe = sorted(gradual_universe(depth), key=pretty)
    bound = depth + 1
    found = []
    for a in universe:
        for b in universe:
            pairs = (
                ("consistent", consistent(a, b), oracle_consistent(a, b, bound)),
                ("precision", precision(a, b), oracle_precision(a, b, bound)),
                ("meet", meet(a, b), oracle_meet(a, b, bound)),
            )
            for relation, structural, oracle in pairs:
                if structural != oracle:
                    found.append(Disagreement(relation, a, b, structural, oracle))
    logger.info("compared %d pairs at depth %d: %d disagreements",
                len(universe) ** 2, depth, len(found))
    return found


# =============================================================================
# Corpus
# =============================================================================

_EXPECT = re.compile(r"^--\s*expect:\s*(ok|type|runtime|fuel|parse)\b[ \t]*(.*?)\s*$", re.MULTILINE)
_FUEL = re.compile(r"^--\s*fuel:\s*(\d+)\s*$", re.MULTILINE)


@dataclass(frozen=True)
class CorpusResult:
    path: str
    expected: str
    actual: str
    expected_value: Optional[str] = None
    value: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.expected == self.actual and (
            not self.expected_value or self.expected_value == self.value
        )


def read_header(source: str) -> tuple[Optional[str], Optional[str], Optional[int]]:
    """The ``-- expect:`` category and value and the ``-- fuel:`` budget of a program."""
    expect = _EXPECT.search(source)
    fuel = _FUEL.search(source)
    return (
        expect.group(1) if expect else None,
        (expect.group(2) or None) if expect else None,
        int(fuel.group(1)) if fuel else None,
    )


def program_outcome(source: str, path: str, fuel: int,
                    norm_fuel: int) -> tuple[str, Optional[str]]:
    """Categorize a program as ``ok``, ``type``, ``runtime``, ``fuel`` or ``parse``."""
    try:
        term = parse_program(source, path)
        et, _ = elaborate_program(term, norm_fuel)
    except ParseError:
        return "parse", None
    except GdtlTypeError:
        return "type", None
    except FuelExhausted:
        return "fuel", None
    result = run(et, fuel, norm_fuel)
    if isinstance(result, Value):
        return "ok", pretty(erase(result.term))
    if isinstance(result, RuntimeErr):
        return "runtime", result.describe()
    return "fuel", None


def run_corpus(programs_dir: Union[str, Path], fuel: Optional[int] = None,
               config: Optional[GdtlConfig] = None) -> list[CorpusResult]:
    """Run every ``.gdtl`` file against its expected-outcome header.

    An explicit ``fuel`` wins over a file's ``-- fuel:`` header, which
    wins over the configured default.
    """
    config = config or GdtlConfig.default()
    results = []
    for path in sorted(Path(programs_dir).glob("*.gdtl")):
        source = path.read_text(encoding="utf-8")
        expected, expected_value, header_fuel = read_header(source)
        budget = fuel or header_fuel or config.fuel
        actual, value = program_outcome(source, str(path), budget, config.norm_fuel)
        result = CorpusResult(path.name, expected or "ok", actual, expected_value,
                              value if actual == "ok" else None)
        if not result.passed:
            logger.warning("%s: expected %s, got %s", path.name, result.expected, actual)
        results.append(result)
    return results
