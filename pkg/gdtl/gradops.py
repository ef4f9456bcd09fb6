"""The precision lattice on canonical forms.

``consistent``, ``precision`` and ``meet`` are structural; ``?`` is the
top element. ``concretize_bounded`` and ``abstract_set`` give the same
relations a set-based reading over a finite universe, which the test
suite and the harness use as an oracle for the structural versions.
"""

from __future__ import annotations

import functools
import itertools
from typing import Iterable, Optional

from .core import (
    Atomic,
    Canonical,
    CLam,
    CNat,
    CPi,
    CSucc,
    CType,
    CUnknown,
    CVec,
    CZero,
    Frame,
    Level,
    Node,
    Omega,
    child_pairs,
    children,
    cnumeral,
    rebuild,
)


# =============================================================================
# Levels
# =============================================================================

def level_consistent(a: Level, b: Level) -> bool:
    return a == b or isinstance(a, Omega) or isinstance(b, Omega)


def level_precision(a: Level, b: Level) -> bool:
    return a == b or isinstance(b, Omega)


def level_meet(a: Level, b: Level) -> Optional[Level]:
    if isinstance(a, Omega):
        return b
    if isinstance(b, Omega) or a == b:
        return a
    return None


# =============================================================================
# Structural relations
# =============================================================================

def _kind_mismatch(a: Node, b: Node) -> bool:
    return isinstance(a, Frame) != isinstance(b, Frame)


def same_head(a: Node, b: Node) -> bool:
    """Same constructor and same non-child data, ignoring levels on arrows."""
    if type(a) is not type(b):
        return False
    if isinstance(a, CType):
        return a.level == b.level
    if isinstance(a, Atomic):
        return a.index == b.index and len(a.spine) == len(b.spine) and all(
            isinstance(x, Frame) == isinstance(y, Frame) for x, y in zip(a.spine, b.spine)
        )
    return True


def consistent(a: Node, b: Node) -> bool:
    """Whether two canonical forms could denote the same static form."""
    if _kind_mismatch(a, b):
        return False
    if isinstance(a, CUnknown) or isinstance(b, CUnknown):
        return True
    if not same_head(a, b):
        return False
    if isinstance(a, CPi) and not level_consistent(a.level, b.level):
        return False
    return all(consistent(x, y) for x, y in child_pairs(a, b))


def precision(a: Node, b: Node) -> bool:
    """``a ⊑ b``: ``a`` is at least as precise as ``b``."""
    if _kind_mismatch(a, b):
        return False
    if isinstance(b, CUnknown):
        return True
    if isinstance(a, CUnknown) or not same_head(a, b):
        return False
    if isinstance(a, CPi) and not level_precision(a.level, b.level):
        return False
    return all(precision(x, y) for x, y in child_pairs(a, b))


def meet(a: Node, b: Node) -> Optional[Node]:
    """Greatest lower bound under precision; None when inconsistent."""
    if _kind_mismatch(a, b):
        return None
    if isinstance(a, CUnknown):
        return b
    if isinstance(b, CUnknown):
        return a
    if not same_head(a, b):
        return None
    merged = []
    for x, y in child_pairs(a, b):
        m = meet(x, y)
        if m is None:
            return None
        merged.append(m)
    result = rebuild(a, merged)
    if isinstance(a, CPi):
        level = level_meet(a.level, b.level)
        if level is None:
            return None
        if level != result.level:
            result = CPi(result.name, result.dom, result.cod, level)
    return result


# =============================================================================
# Lifted partial functions
# =============================================================================

def dom(U: Canonical) -> Optional[Canonical]:
    if isinstance(U, CPi):
        return U.dom
    if isinstance(U, CUnknown):
        return CUnknown()
    return None


def cod_sub(arg: Canonical, U: Canonical) -> Optional[Canonical]:
    """The codomain of ``U`` with its binder replaced by ``arg``."""
    from .normalize import hsub

    if isinstance(U, CPi):
        return hsub(arg, 0, U.dom, U.cod)
    if isinstance(U, CUnknown):
        return CUnknown()
    return None


def body_sub(arg: Canonical, arg_ty: Canonical, fn: Canonical) -> Optional[Canonical]:
    """Apply a canonical function to ``arg`` of type ``arg_ty``."""
    from .normalize import hsub

    if isinstance(fn, CLam):
        return hsub(arg, 0, arg_ty, fn.body)
    if isinstance(fn, CUnknown):
        return CUnknown()
    return None


# =============================================================================
# Bounded concretization and abstraction
# =============================================================================

LEAVES: tuple[Canonical, ...] = (
    CType(1), CType(2), CNat(), CZero(), Atomic(0, (), "x"), cnumeral(1), cnumeral(2),
)
_LEAF_SET = frozenset(LEAVES)


def syntactic_depth(u: Node) -> int:
    """Depth of a canonical form; members of the leaf alphabet count as 0."""
    if u in _LEAF_SET:
        return 0
    return 1 + max((syntactic_depth(child) for child, _ in children(u)), default=-1)


@functools.cache
def static_universe(depth: int) -> frozenset:
    """Static forms of at most ``depth`` built from the leaves, Succ and Vec."""
    if depth <= 0:
        return _LEAF_SET
    smaller = static_universe(depth - 1)
    grown = {CSucc(s) for s in smaller}
    grown.update(CVec(a, n) for a in smaller for n in smaller)
    return frozenset(_LEAF_SET | grown)


@functools.cache
def gradual_universe(depth: int) -> frozenset:
    """Like ``static_universe`` but with ``?`` among the leaves."""
    leaves = _LEAF_SET | {CUnknown()}
    if depth <= 0:
        return frozenset(leaves)
    smaller = gradual_universe(depth - 1)
    grown = {CSucc(s) for s in smaller}
    grown.update(CVec(a, n) for a in smaller for n in smaller)
    return frozenset(leaves | grown)


@functools.cache
def concretize_bounded(u: Node, depth: int) -> frozenset:
    """The static forms of syntactic depth at most ``depth`` that ``u`` denotes.

    ``?`` stands for every member of ``static_universe(depth)``; every other
    constructor is kept and its children are concretized one level down.
    """
    if isinstance(u, CUnknown):
        return static_universe(depth)
    kids = [child for child, _ in children(u)]
    if not kids:
        return frozenset({u}) if syntactic_depth(u) <= depth else frozenset()
    below = max(depth - 1, 0)
    options = [concretize_bounded(child, below) for child in kids]
    result = set()
    for combo in itertools.product(*options):
        candidate = rebuild(u, combo)
        if syntactic_depth(candidate) <= depth:
            result.add(candidate)
    return frozenset(result)


def _same_top(a: Node, b: Node) -> bool:
    if not same_head(a, b):
        return False
    if isinstance(a, CPi):
        return a.level == b.level
    if isinstance(a, Atomic):
        return all(type(x) is type(y) or not isinstance(x, Frame) for x, y in zip(a.spine, b.spine))
    return True


def abstract_set(forms: Iterable[Node]) -> Node:
    """The most precise gradual form whose concretization covers ``forms``.

    Raises:
        ValueError: if ``forms`` is empty
    """
    items = list(forms)
    if not items:
        raise ValueError("cannot abstract an empty set of forms")
    first = items[0]
    if all(item == first for item in items[1:]):
        return first
    if not all(_same_top(first, item) for item in items[1:]):
        return CUnknown()
    columns = zip(*([child for child, _ in children(item)] for item in items))
    return rebuild(first, [abstract_set(column) for column in columns])


def oracle_consistent(a: Canonical, b: Canonical, depth: int) -> bool:
    return not concretize_bounded(a, depth).isdisjoint(concretize_bounded(b, depth))


def oracle_precision(a: Canonical, b: Canonical, depth: int) -> bool:
    return concretize_bounded(a, depth) <= concretize_bounded(b, depth)


def oracle_meet(a: Canonical, b: Canonical, depth: int) -> Optional[Node]:
    common = concretize_bounded(a, depth) & concretize_bounded(b, depth)
    return abstract_set(common) if common else None
