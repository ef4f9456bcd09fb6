"""Tests for syntax trees, de Bruijn operations, contexts and printing."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gdtl.core import (
    OMEGA,
    App,
    Ascribe,
    Atomic,
    CLam,
    CNat,
    Context,
    CPi,
    CSucc,
    CType,
    CUnknown,
    CVec,
    CZero,
    Evidence,
    Lam,
    Nat,
    NatElimF,
    Pi,
    Succ,
    TypeU,
    Unknown,
    Var,
    Vec,
    WithEv,
    Zero,
    alpha_eq,
    as_numeral,
    children,
    cnumeral,
    fresh_name,
    level_le,
    level_max,
    numeral,
    occurs,
    pretty,
    shift,
    subst,
    to_term,
    validate_canonical,
)
from gdtl.surface import parse_term


# ============================================================================
# LEVELS
# ============================================================================


class TestLevels:
    def test_integer_levels_ordered(self):
        assert level_le(1, 2)
        assert not level_le(2, 1)

    def test_omega_is_top(self):
        assert level_le(5, OMEGA)
        assert not level_le(OMEGA, 5)
        assert level_max(3, OMEGA) is OMEGA

    def test_level_max(self):
        assert level_max(1, 2) == 2
        assert level_max(2, 1) == 2


# ============================================================================
# DE BRUIJN OPERATIONS
# ============================================================================


class TestShift:
    def test_free_variable_shifted(self):
        assert shift(Var(0), 2) == Var(2)

    def test_bound_variable_untouched(self):
        assert shift(Lam("x", Var(0)), 1) == Lam("x", Var(0))

    def test_free_variable_under_binder(self):
        assert shift(Lam("x", Var(1)), 1) == Lam("x", Var(2))

    def test_cutoff(self):
        assert shift(App(Var(0), Var(1)), 1, cutoff=1) == App(Var(0), Var(2))

    def test_atomic_heads_shift(self):
        assert shift(Atomic(0, (Atomic(1),)), 1) == Atomic(1, (Atomic(2),))


class TestSubst:
    def test_replaces_and_closes_gap(self):
        assert subst(App(Var(0), Var(1)), Zero()) == App(Zero(), Var(0))

    def test_under_binder(self):
        assert subst(Lam("y", Var(1)), Var(0)) == Lam("y", Var(1))

    def test_bound_variable_untouched(self):
        assert subst(Lam("y", Var(0)), Zero()) == Lam("y", Var(0))

    def test_replacement_shifted_under_binders(self):
        assert subst(Lam("y", Var(1)), Var(3)) == Lam("y", Var(4))


class TestOccursAndAlpha:
    def test_occurs(self):
        assert occurs(App(Var(0), Zero()))
        assert not occurs(Lam("x", Var(0)))
        assert occurs(Lam("x", Var(1)))

    def test_names_do_not_matter(self):
        assert alpha_eq(Lam("x", Var(0, "x")), Lam("y", Var(0, "y")))
        assert alpha_eq(Pi("A", TypeU(1), Var(0)), Pi("B", TypeU(1), Var(0)))

    def test_structure_matters(self):
        assert not alpha_eq(Lam("x", Var(0)), Lam("x", Var(1)))

    def test_spans_ignored(self):
        assert parse_term("fun x => x") == Lam("x", Var(0))


# ============================================================================
# NUMERALS
# ============================================================================


class TestNumerals:
    def test_numeral(self):
        assert numeral(2) == Succ(Succ(Zero()))
        assert cnumeral(1) == CSucc(CZero())

    def test_as_numeral(self):
        assert as_numeral(numeral(3)) == 3
        assert as_numeral(cnumeral(0)) == 0
        assert as_numeral(Succ(Var(0))) is None


# ============================================================================
# CONTEXTS
# ============================================================================


class TestContext:
    def test_lookup_shifts_into_scope(self, type_ctx):
        assert type_ctx.lookup(0) == Atomic(1, (), "A")
        assert type_ctx.lookup(1) == CType(1)

    def test_unbound_index_raises(self, type_ctx):
        with pytest.raises(ValueError, match="not bound"):
            type_ctx.lookup(2)

    def test_names_outermost_first(self, type_ctx):
        assert type_ctx.names == ("A", "x")
        assert type_ctx.name_of(0) == "x"
        assert len(type_ctx) == 2

    def test_extend_is_persistent(self):
        ctx = Context()
        extended = ctx.extend("n", CNat())
        assert len(ctx) == 0
        assert len(extended) == 1


# ============================================================================
# READBACK
# ============================================================================


class TestReadback:
    def test_to_term_numerals(self):
        assert to_term(cnumeral(2)) == numeral(2)

    def test_to_term_arrow(self):
        assert to_term(CPi("_", CNat(), CUnknown(), 1)) == parse_term("Nat -> ?")

    def test_to_term_frames(self):
        step = CLam("k", CLam("r", Atomic(0, (), "r")))
        frame = NatElimF(CLam("_", CNat()), CZero(), step)
        term = to_term(Atomic(0, (frame,), "n"))
        assert term == parse_term("natElim (fun _ => Nat) 0 (fun k r => r) n", ("n",))

    def test_validate_rejects_terms(self):
        with pytest.raises(ValueError, match="not a canonical form"):
            validate_canonical(CVec(CNat(), Zero()))

    def test_validate_accepts_canonical(self):
        validate_canonical(CVec(CNat(), cnumeral(2)))


def free_depth(t, depth=0):
    """How many binders ``t`` needs around it to be closed."""
    if isinstance(t, Var):
        return t.index - depth + 1 if t.index >= depth else 0
    return max((free_depth(child, depth + bound) for child, bound in children(t)), default=0)


def close_with_lambdas(t):
    for _ in range(free_depth(t)):
        t = Lam("x", t)
    return t


TERMS = st.recursive(
    st.one_of(
        st.just(Unknown()),
        st.just(Nat()),
        st.just(Zero()),
        st.integers(0, 3).map(Var),
        st.integers(1, 3).map(TypeU),
    ),
    lambda inner: st.one_of(
        st.builds(Lam, st.just("x"), inner),
        st.builds(App, inner, inner),
        st.builds(Pi, st.sampled_from(["_", "y"]), inner, inner),
        st.builds(Ascribe, inner, inner),
        st.builds(Succ, inner),
        st.builds(Vec, inner, inner),
    ),
    max_leaves=12,
)
CLOSED_TERMS = TERMS.map(close_with_lambdas)


# ============================================================================
# PRINTING
# ============================================================================


class TestPretty:
    def test_numerals(self):
        assert pretty(numeral(3)) == "3"
        assert pretty(Succ(Var(0, "n")), ["n"]) == "n + 1"

    def test_nondependent_arrow(self):
        assert pretty(CPi("_", CNat(), CNat(), 1)) == "Nat -> Nat"

    def test_dependent_arrow(self):
        t = parse_term("(A : Type 1) -> A -> A")
        assert pretty(t) == "(A : Type 1) -> A -> A"

    def test_verbose_levels(self):
        assert pretty(CPi("_", CNat(), CNat(), 1), verbose=True) == "Nat ->{1} Nat"

    def test_ascribed_function_parenthesized(self):
        assert pretty(Ascribe(Lam("x", Var(0)), Pi("_", Unknown(), Unknown()))) == "(fun x => x) :: ? -> ?"

    def test_evidence_brackets(self):
        ev = Evidence(CVec(CNat(), cnumeral(0)))
        assert pretty(ev) == "⟨Vec Nat 0⟩"
        assert pretty(ev, unicode=False) == "<Vec Nat 0>"

    def test_evidence_term(self):
        assert pretty(WithEv(Evidence(CUnknown()), Unknown())) == "⟨?⟩?"

    def test_free_variables_without_names(self):
        assert pretty(Var(2)) == "#2"

    def test_shadowing_gets_fresh_name(self):
        t = Lam("x", Lam("x", Var(1)))
        assert pretty(t) == "fun x x' => x"

    @pytest.mark.parametrize("text", [
        "fun A x => x",
        "(A : Type 1) -> A -> A",
        "Vec Nat 2",
        "(fun x => Succ x) :: Nat -> Nat",
        "Cons Nat 0 1 (Nil Nat)",
        "Eq Nat 1 ?",
    ])
    def test_reparses_alpha_equal(self, text):
        t = parse_term(text)
        assert parse_term(pretty(t)) == t

    @given(CLOSED_TERMS)
    @settings(max_examples=200)
    def test_generated_terms_reparse(self, t):
        assert parse_term(pretty(t)) == t


class TestFreshName:
    def test_primes_until_unused(self):
        assert fresh_name("x", ["x", "x'"]) == "x''"
        assert fresh_name("y", ["x"]) == "y"
