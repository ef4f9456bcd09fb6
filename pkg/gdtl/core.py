"""Syntax trees, contexts and printing for GDTL.

Binders are nameless: ``Var(i)`` and ``Atomic(i, ...)`` refer to the
i-th enclosing binder, counting from zero. Surface names survive only as
printing hints (fields with ``compare=False``), so structural equality of
two nodes is alpha-equivalence.

Three families of nodes share this module:

- ``Term``: gradual source syntax, including ``?`` and ascriptions.
  Runtime terms reuse the same classes plus ``WithEv`` and ``Err``.
- ``Canonical``: beta-normal, eta-long forms. Types are always canonical.
- ``Frame``: an eliminator waiting in a canonical spine for its scrutinee.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field, fields, replace
from typing import Callable, Iterable, Optional, Union


# =============================================================================
# Levels
# =============================================================================

@dataclass(frozen=True)
class Omega:
    """The top universe level, above every integer level."""

    def __repr__(self) -> str:
        return "ω"

    def __str__(self) -> str:
        return "ω"


OMEGA = Omega()

Level = Union[int, Omega]


def level_le(a: Level, b: Level) -> bool:
    if isinstance(b, Omega):
        return True
    if isinstance(a, Omega):
        return False
    return a <= b


def level_max(a: Level, b: Level) -> Level:
    return b if level_le(a, b) else a


# =============================================================================
# Node bases
# =============================================================================

@dataclass(frozen=True)
class Span:
    line: int
    column: int


class Node:
    """Common base of every syntax node."""


@dataclass(frozen=True)
class Term(Node):
    span: Optional[Span] = field(default=None, compare=False, repr=False, kw_only=True)


class Canonical(Node):
    pass


class Frame(Node):
    pass


# =============================================================================
# Terms
# =============================================================================

@dataclass(frozen=True)
class Var(Term):
    index: int
    name: str = field(default="x", compare=False)


@dataclass(frozen=True)
class Lam(Term):
    name: str = field(compare=False)
    body: Term


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True)
class Pi(Term):
    name: str = field(compare=False)
    dom: Term
    cod: Term


@dataclass(frozen=True)
class TypeU(Term):
    level: int


@dataclass(frozen=True)
class Unknown(Term):
    pass


@dataclass(frozen=True)
class Ascribe(Term):
    term: Term
    ty: Term


@dataclass(frozen=True)
class Nat(Term):
    pass


@dataclass(frozen=True)
class Zero(Term):
    pass


@dataclass(frozen=True)
class Succ(Term):
    pred: Term


@dataclass(frozen=True)
class Vec(Term):
    elem: Term
    length: Term


@dataclass(frozen=True)
class Nil(Term):
    elem: Term


@dataclass(frozen=True)
class Cons(Term):
    elem: Term
    length: Term
    head: Term
    tail: Term


@dataclass(frozen=True)
class Eq(Term):
    ty: Term
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Refl(Term):
    ty: Term
    value: Term


@dataclass(frozen=True)
class NatElim(Term):
    motive: Term
    base: Term
    step: Term
    scrutinee: Term


@dataclass(frozen=True)
class VecElim(Term):
    elem: Term
    length: Term
    motive: Term
    base: Term
    step: Term
    scrutinee: Term


@dataclass(frozen=True)
class EqElim(Term):
    ty: Term
    motive: Term
    method: Term
    lhs: Term
    rhs: Term
    proof: Term


# --- runtime-only terms ------------------------------------------------------

@dataclass(frozen=True)
class Evidence(Node):
    """A canonical type witnessing a consistency judgment."""
    witness: Canonical


@dataclass(frozen=True)
class WithEv(Term):
    evidence: Evidence
    term: Term


@dataclass(frozen=True)
class Err(Term):
    left: Optional[Canonical] = field(default=None, compare=False)
    right: Optional[Canonical] = field(default=None, compare=False)


# =============================================================================
# Canonical forms
# =============================================================================

@dataclass(frozen=True)
class CLam(Canonical):
    name: str = field(compare=False)
    body: Canonical


@dataclass(frozen=True)
class CPi(Canonical):
    name: str = field(compare=False)
    dom: Canonical
    cod: Canonical
    level: Level = OMEGA


@dataclass(frozen=True)
class CType(Canonical):
    level: int


@dataclass(frozen=True)
class CUnknown(Canonical):
    pass


@dataclass(frozen=True)
class Atomic(Canonical):
    """A variable applied to a spine of arguments and eliminator frames."""
    index: int
    spine: tuple = ()
    name: str = field(default="x", compare=False)


@dataclass(frozen=True)
class CNat(Canonical):
    pass


@dataclass(frozen=True)
class CZero(Canonical):
    pass


@dataclass(frozen=True)
class CSucc(Canonical):
    pred: Canonical


@dataclass(frozen=True)
class CVec(Canonical):
    elem: Canonical
    length: Canonical


@dataclass(frozen=True)
class CNil(Canonical):
    elem: Canonical


@dataclass(frozen=True)
class CCons(Canonical):
    elem: Canonical
    length: Canonical
    head: Canonical
    tail: Canonical


@dataclass(frozen=True)
class CEq(Canonical):
    ty: Canonical
    lhs: Canonical
    rhs: Canonical


@dataclass(frozen=True)
class CRefl(Canonical):
    ty: Canonical
    value: Canonical


# --- eliminator frames -------------------------------------------------------

@dataclass(frozen=True)
class NatElimF(Frame):
    motive: Canonical
    base: Canonical
    step: Canonical


@dataclass(frozen=True)
class VecElimF(Frame):
    elem: Canonical
    length: Canonical
    motive: Canonical
    base: Canonical
    step: Canonical


@dataclass(frozen=True)
class EqElimF(Frame):
    ty: Canonical
    motive: Canonical
    method: Canonical
    lhs: Canonical
    rhs: Canonical


SpineEntry = Union[Canonical, Frame]
EvTerm = Term


# =============================================================================
# Builtins
# =============================================================================

@dataclass(frozen=True)
class Builtin:
    name: str
    arity: int
    term_cls: type
    signature: str


BUILTINS: dict[str, Builtin] = {
    b.name: b for b in (
        Builtin("Nat", 0, Nat, "Type 1"),
        Builtin("Zero", 0, Zero, "Nat"),
        Builtin("Succ", 1, Succ, "Nat -> Nat"),
        Builtin("Vec", 2, Vec, "(A : Type i) -> Nat -> Type i"),
        Builtin("Nil", 1, Nil, "(A : Type i) -> Vec A 0"),
        Builtin("Cons", 4, Cons,
                "(A : Type i) -> (n : Nat) -> A -> Vec A n -> Vec A (n + 1)"),
        Builtin("Eq", 3, Eq, "(A : Type i) -> A -> A -> Type i"),
        Builtin("Refl", 2, Refl, "(A : Type i) -> (x : A) -> Eq A x x"),
        Builtin("natElim", 4, NatElim,
                "(m : Nat -> Type i) -> m 0 -> ((k : Nat) -> m k -> m (k + 1)) "
                "-> (n : Nat) -> m n"),
        Builtin("vecElim", 6, VecElim,
                "(A : Type i) -> (n : Nat) -> (m : (k : Nat) -> Vec A k -> Type i) "
                "-> m 0 (Nil A) -> ((k : Nat) -> (h : A) -> (t : Vec A k) -> m k t "
                "-> m (k + 1) (Cons A k h t)) -> (v : Vec A n) -> m n v"),
        Builtin("eqElim", 6, EqElim,
                "(A : Type i) -> (m : (x : A) -> (y : A) -> Eq A x y -> Type i) "
                "-> ((z : A) -> m z z (Refl A z)) -> (x : A) -> (y : A) "
                "-> (p : Eq A x y) -> m x y p"),
    )
}

_TERM_BUILTIN_NAMES = {b.term_cls: b.name for b in BUILTINS.values()}


# =============================================================================
# Generic traversal
# =============================================================================

# A field with one of these names binds exactly one variable.
_BINDER_FIELDS = frozenset({"body", "cod"})


@functools.cache
def _child_fields(cls: type) -> tuple[str, ...]:
    return tuple(
        f.name for f in fields(cls)
        if f.compare and f.name not in ("index", "level")
    )


def map_children(node: Node, fn: Callable[[Node, int], Node]) -> Node:
    """Rebuild ``node`` with ``fn(child, bound)`` applied to each child.

    ``bound`` is the number of variables the field binds (0 or 1).
    Name hints and spans are preserved.
    """
    changes = {}
    for name in _child_fields(type(node)):
        value = getattr(node, name)
        bound = 1 if name in _BINDER_FIELDS else 0
        if isinstance(value, Node):
            new = fn(value, bound)
        elif isinstance(value, tuple):
            new = tuple(fn(v, bound) for v in value)
            if all(a is b for a, b in zip(new, value)):
                new = value
        else:
            continue
        if new is not value:
            changes[name] = new
    return replace(node, **changes) if changes else node


def children(node: Node) -> Iterable[tuple[Node, int]]:
    """Yield ``(child, bound)`` pairs in field order."""
    for name in _child_fields(type(node)):
        value = getattr(node, name)
        bound = 1 if name in _BINDER_FIELDS else 0
        if isinstance(value, Node):
            yield value, bound
        elif isinstance(value, tuple):
            for v in value:
                yield v, bound


def child_pairs(a: Node, b: Node) -> Iterable[tuple[Node, Node]]:
    """Pair up the children of two nodes of the same class and shape."""
    for name in _child_fields(type(a)):
        x, y = getattr(a, name), getattr(b, name)
        if isinstance(x, tuple):
            yield from zip(x, y)
        elif isinstance(x, Node):
            yield x, y


def rebuild(node: Node, new_children: Iterable[Node]) -> Node:
    """Replace the children of ``node``, in field order, with ``new_children``."""
    supply = iter(new_children)
    return map_children(node, lambda child, bound: next(supply))


def shift(node: Node, amount: int, cutoff: int = 0) -> Node:
    """Add ``amount`` to every variable index at or above ``cutoff``."""
    if amount == 0:
        return node

    def go(n: Node, c: int) -> Node:
        if isinstance(n, (Var, Atomic)) and n.index >= c:
            n = replace(n, index=n.index + amount)
        return map_children(n, lambda child, bound: go(child, c + bound))

    return go(node, cutoff)


def subst(node: Node, value: Node, index: int = 0) -> Node:
    """Replace variable ``index`` with ``value`` and close the gap.

    Works on terms and canonical forms alike, but does not renormalize:
    a canonical value substituted into a spine head is not re-applied.
    """
    def go(n: Node, depth: int) -> Node:
        if isinstance(n, Var):
            if n.index == depth:
                return shift(value, depth)
            if n.index > depth:
                return replace(n, index=n.index - 1)
            return n
        return map_children(n, lambda child, bound: go(child, depth + bound))

    return go(node, index)


def occurs(node: Node, index: int = 0) -> bool:
    """True when variable ``index`` occurs free in ``node``."""
    if isinstance(node, (Var, Atomic)) and node.index == index:
        return True
    return any(occurs(child, index + bound) for child, bound in children(node))


def alpha_eq(a: Node, b: Node) -> bool:
    """Alpha-equivalence; names are hints, so this is structural equality."""
    return a == b


def fresh_name(hint: str, avoid: Iterable[str]) -> str:
    """Return ``hint``, ``hint'``, ``hint''``, ... whichever is first unused."""
    taken = set(avoid)
    name = hint
    while name in taken:
        name += "'"
    return name


# =============================================================================
# Numerals
# =============================================================================

def numeral(n: int) -> Term:
    term: Term = Zero()
    for _ in range(n):
        term = Succ(term)
    return term


def cnumeral(n: int) -> Canonical:
    value: Canonical = CZero()
    for _ in range(n):
        value = CSucc(value)
    return value


def as_numeral(node: Node) -> Optional[int]:
    """Return n when ``node`` is Succ applied n times to Zero."""
    count = 0
    while isinstance(node, (Succ, CSucc)):
        node = node.pred
        count += 1
    if isinstance(node, (Zero, CZero)):
        return count
    return None


# =============================================================================
# Contexts
# =============================================================================

@dataclass(frozen=True)
class Context:
    """Telescope of bindings; the last entry is variable 0.

    Each stored type lives in the context of the entries to its left.
    """
    entries: tuple[tuple[str, Canonical], ...] = ()

    def extend(self, name: str, ty: Canonical) -> "Context":
        return Context(self.entries + ((name, ty),))

    def lookup(self, index: int) -> Canonical:
        if not 0 <= index < len(self.entries):
            raise ValueError(f"variable #{index} is not bound in a context of size {len(self.entries)}")
        _, ty = self.entries[-1 - index]
        return shift(ty, index + 1)

    def name_of(self, index: int) -> str:
        return self.entries[-1 - index][0]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.entries)

    def __len__(self) -> int:
        return len(self.entries)


# =============================================================================
# Readback
# =============================================================================

def frame_to_term(frame: Frame, scrutinee: Term) -> Term:
    args = [to_term(getattr(frame, name)) for name in _child_fields(type(frame))]
    if isinstance(frame, NatElimF):
        return NatElim(*args, scrutinee)
    if isinstance(frame, VecElimF):
        return VecElim(*args, scrutinee)
    return EqElim(*args, scrutinee)


_CANONICAL_TO_TERM = {
    CNat: Nat, CZero: Zero, CSucc: Succ, CVec: Vec, CNil: Nil,
    CCons: Cons, CEq: Eq, CRefl: Refl, CUnknown: Unknown,
}


def to_term(u: Canonical) -> Term:
    """Embed a canonical form back into term syntax."""
    match u:
        case CLam(name=name, body=body):
            return Lam(name, to_term(body))
        case CPi(name=name, dom=dom, cod=cod):
            return Pi(name, to_term(dom), to_term(cod))
        case CType(level=level):
            return TypeU(level)
        case Atomic(index=index, spine=spine, name=name):
            term: Term = Var(index, name)
            for entry in spine:
                if isinstance(entry, Frame):
                    term = frame_to_term(entry, term)
                else:
                    term = App(term, to_term(entry))
            return term
    cls = _CANONICAL_TO_TERM[type(u)]
    return cls(*(to_term(child) for child, _ in children(u)))


def validate_canonical(u: Node) -> None:
    """Raise ValueError unless ``u`` is built only from canonical pieces."""
    if isinstance(u, Atomic):
        if u.index < 0:
            raise ValueError(f"negative variable index {u.index}")
        for entry in u.spine:
            if not isinstance(entry, (Canonical, Frame)):
                raise ValueError(f"spine entry {entry!r} is not canonical")
    elif not isinstance(u, (Canonical, Frame)):
        raise ValueError(f"{type(u).__name__} is not a canonical form")
    for child, _ in children(u):
        validate_canonical(child)


# =============================================================================
# Pretty printing
# =============================================================================

_LAM, _ASCR, _ARROW, _SUM, _EV, _APP, _ATOM = range(7)

_CANONICAL_BUILTIN_NAMES = {
    CNat: "Nat", CZero: "Zero", CSucc: "Succ", CVec: "Vec", CNil: "Nil",
    CCons: "Cons", CEq: "Eq", CRefl: "Refl",
}
_FRAME_NAMES = {NatElimF: "natElim", VecElimF: "vecElim", EqElimF: "eqElim"}
_RESERVED = frozenset(BUILTINS) | {"fun", "Type", "_"}


class _Printer:
    def __init__(self, verbose: bool, unicode: bool):
        self.verbose = verbose
        self.unicode = unicode

    def bind(self, hint: str, scope: tuple[str, ...]) -> str:
        if not hint or hint == "_":
            hint = "x"
        return fresh_name(hint, set(scope) | _RESERVED)

    def var(self, index: int, scope: tuple[str, ...]) -> str:
        if 0 <= index < len(scope):
            return scope[-1 - index]
        return f"#{index - len(scope)}"

    def fmt(self, node: Node, scope: tuple[str, ...], prec: int) -> str:
        text, own = self.render(node, scope)
        return f"({text})" if own < prec else text

    def binder(self, name: str, body: Node, scope: tuple[str, ...]):
        names = []
        while True:
            fresh = self.bind(name, scope)
            names.append(fresh)
            scope = scope + (fresh,)
            if isinstance(body, (Lam, CLam)):
                name, body = body.name, body.body
                continue
            break
        return f"fun {' '.join(names)} => {self.fmt(body, scope, _LAM)}", _LAM

    def arrow(self, name, dom, cod, scope, level=None):
        tag = ""
        if level is not None and self.verbose:
            tag = "{" + str(level) + "}"
        if name == "_" and not occurs(cod):
            left = self.fmt(dom, scope, _SUM)
            right = self.fmt(cod, scope + ("_",), _ARROW)
            return f"{left} ->{tag} {right}", _ARROW
        fresh = self.bind(name, scope)
        left = self.fmt(dom, scope, _LAM)
        right = self.fmt(cod, scope + (fresh,), _ARROW)
        return f"({fresh} : {left}) ->{tag} {right}", _ARROW

    def apply(self, head: str, args: Iterable[Node], scope) -> tuple[str, int]:
        parts = [head] + [self.fmt(a, scope, _ATOM) for a in args]
        if len(parts) == 1:
            return head, _ATOM
        return " ".join(parts), _APP

    def successor(self, node: Node, scope) -> tuple[str, int]:
        count = 0
        while isinstance(node, (Succ, CSucc)):
            node = node.pred
            count += 1
        return f"{self.fmt(node, scope, _SUM)} + {count}", _SUM

    def evidence(self, ev: Evidence, scope) -> str:
        inner = self.fmt(ev.witness, scope, _LAM)
        return f"⟨{inner}⟩" if self.unicode else f"<{inner}>"

    def render(self, node: Node, scope: tuple[str, ...]) -> tuple[str, int]:
        n = as_numeral(node)
        if n is not None:
            return str(n), _ATOM
        match node:
            case Var(index=i) | Atomic(index=i, spine=()):
                return self.var(i, scope), _ATOM
            case Lam(name=name, body=body) | CLam(name=name, body=body):
                return self.binder(name, body, scope)
            case Pi(name=name, dom=dom, cod=cod):
                return self.arrow(name, dom, cod, scope)
            case CPi(name=name, dom=dom, cod=cod, level=level):
                return self.arrow(name, dom, cod, scope, level)
            case App():
                spine = []
                while isinstance(node, App):
                    spine.append(node.arg)
                    node = node.fn
                head = self.fmt(node, scope, _APP)
                return self.apply(head, reversed(spine), scope)
            case Atomic(index=i, spine=spine):
                text, own = self.var(i, scope), _ATOM
                for entry in spine:
                    if isinstance(entry, Frame):
                        target = text if own >= _ATOM else f"({text})"
                        args = [self.fmt(child, scope, _ATOM) for child, _ in children(entry)]
                        text = " ".join([_FRAME_NAMES[type(entry)], *args, target])
                    else:
                        target = text if own >= _APP else f"({text})"
                        text = f"{target} {self.fmt(entry, scope, _ATOM)}"
                    own = _APP
                return text, own
            case TypeU(level=level) | CType(level=level):
                return f"Type {level}", _APP
            case Unknown() | CUnknown():
                return "?", _ATOM
            case Ascribe(term=term, ty=ty):
                return f"{self.fmt(term, scope, _ASCR)} :: {self.fmt(ty, scope, _ARROW)}", _ASCR
            case Succ() | CSucc():
                return self.successor(node, scope)
            case WithEv(evidence=ev, term=term):
                return f"{self.evidence(ev, scope)}{self.fmt(term, scope, _EV)}", _EV
            case Err():
                return "err", _ATOM
        name = _TERM_BUILTIN_NAMES.get(type(node)) or _CANONICAL_BUILTIN_NAMES[type(node)]
        return self.apply(name, [child for child, _ in children(node)], scope)


def pretty(node: Node, names: Iterable[str] = (), verbose: bool = False,
           unicode: bool = True) -> str:
    """Render a term, canonical form, frame or evidence as surface text.

    Args:
        node: What to print
        names: Names of the free variables, outermost first
        verbose: Print arrow level annotations as ``->{i}``
        unicode: Use ``⟨U⟩`` for evidence, ``<U>`` otherwise

    Returns:
        Text that parses back to an alpha-equal term, for plain terms
    """
    printer = _Printer(verbose, unicode)
    scope = tuple(names)
    if isinstance(node, Evidence):
        return printer.evidence(node, scope)
    if isinstance(node, Frame):
        args = [printer.fmt(child, scope, _ATOM) for child, _ in children(node)]
        return " ".join([_FRAME_NAMES[type(node)], *args])
    text, _ = printer.render(node, scope)
    return text
