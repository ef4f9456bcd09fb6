"""Tests for the static fragment, its evaluator and the untyped oracle."""

import pytest

from gdtl.core import (
    App,
    Ascribe,
    Atomic,
    Context,
    CPi,
    CType,
    CUnknown,
    Lam,
    Unknown,
    Var,
    Zero,
)
from gdtl.errors import FuelExhausted, GdtlTypeError, StuckError
from gdtl.evidence import OutOfFuel, Value, elaborate_program, erase, run
from gdtl.static import (
    Stuck,
    embed_static,
    is_static,
    scheck,
    srun,
    sstep,
    ssynth,
    strip_ascriptions,
    untyped_embed,
    untyped_eval,
)
from gdtl.surface import parse_term

IDENTITY = Lam("x", Var(0, "x"))
SELF_APPLY = Lam("x", App(Var(0, "x"), Var(0, "x")))
OMEGA_TERM = App(SELF_APPLY, SELF_APPLY)


def church(n):
    body = Var(0, "z")
    for _ in range(n):
        body = App(Var(1, "s"), body)
    return Lam("s", Lam("z", body))


# ============================================================================
# STATIC TYPING
# ============================================================================


class TestIsStatic:
    def test_functions_and_universes(self):
        assert is_static(parse_term("fun A x => x"))
        assert is_static(parse_term("(A : Type 1) -> A -> A"))

    def test_gradual_and_inductive_forms(self):
        assert not is_static(parse_term("?"))
        assert not is_static(parse_term("Nat"))
        assert not is_static(parse_term("fun x => Zero"))


class TestStaticChecker:
    def test_polymorphic_identity(self):
        t = parse_term("(fun A x => x) :: (A : Type 1) -> A -> A")
        expected = CPi("A", CType(1), CPi("_", Atomic(0), Atomic(1), 1), 2)
        assert ssynth(Context(), t) == expected

    def test_cumulativity(self):
        scheck(Context(), parse_term("(A : Type 1) -> A"), CType(3))

    def test_rejects_unknown(self):
        with pytest.raises(GdtlTypeError, match="Unknown is not part of the static language"):
            ssynth(Context(), parse_term("?"))

    def test_rejects_inductives(self):
        with pytest.raises(GdtlTypeError, match="Zero is not part of the static language"):
            ssynth(Context(), parse_term("Zero"))

    def test_mismatch_uses_equality(self, type_ctx):
        with pytest.raises(GdtlTypeError, match="type mismatch"):
            scheck(type_ctx, Var(0, "x"), CType(1))

    def test_function_needs_annotation(self):
        with pytest.raises(GdtlTypeError, match="cannot infer"):
            ssynth(Context(), IDENTITY)


# ============================================================================
# STATIC EVALUATION
# ============================================================================


class TestStaticStep:
    def test_beta(self):
        assert sstep(App(IDENTITY, SELF_APPLY)) == SELF_APPLY

    def test_ascription_dropped_on_value(self):
        assert sstep(Ascribe(IDENTITY, Unknown())) == IDENTITY

    def test_value_is_finished(self):
        assert sstep(IDENTITY) == Stuck(IDENTITY, True)

    def test_free_variable_is_stuck(self):
        assert sstep(Var(0)) == Stuck(Var(0), False)

    def test_run_to_value(self):
        t = parse_term("((fun A x => x) :: (A : Type 1) -> A -> A) ((B : Type 1) -> B) (fun y => y)")
        assert srun(t, 100) == IDENTITY

    def test_run_out_of_fuel(self):
        with pytest.raises(FuelExhausted):
            srun(OMEGA_TERM, 50)

    def test_strip_ascriptions(self):
        assert strip_ascriptions(Ascribe(App(Ascribe(IDENTITY, Unknown()), Zero()), Unknown())) == App(IDENTITY, Zero())


# ============================================================================
# EMBEDDINGS
# ============================================================================


class TestEmbeddings:
    def test_static_terms_embed_unchanged(self):
        t = parse_term("fun A x => x")
        assert embed_static(t) is t

    def test_non_static_rejected(self):
        with pytest.raises(ValueError, match="not static"):
            embed_static(Zero())

    def test_untyped_functions_ascribed_to_unknown(self):
        assert untyped_embed(IDENTITY) == Ascribe(IDENTITY, Unknown())

    def test_untyped_embed_rejects_constructors(self):
        with pytest.raises(ValueError, match="untyped terms"):
            untyped_embed(Zero())


# ============================================================================
# UNTYPED ORACLE
# ============================================================================


class TestUntypedEval:
    def test_church_two_applied_to_identity(self):
        assert untyped_eval(App(App(church(2), IDENTITY), IDENTITY), 100) == IDENTITY

    def test_divergence(self):
        with pytest.raises(FuelExhausted):
            untyped_eval(OMEGA_TERM, 100)

    def test_free_variable(self):
        with pytest.raises(StuckError, match="free variable"):
            untyped_eval(Var(0), 10)

    @pytest.mark.parametrize("n", [0, 1, 3])
    def test_gradual_runtime_agrees(self, n):
        t = App(App(church(n), IDENTITY), IDENTITY)
        et, _ = elaborate_program(untyped_embed(t))
        result = run(et, 1000)
        assert isinstance(result, Value)
        assert erase(result.term) == untyped_eval(t, 1000)


I = "(fun x => x)"
K = "(fun x y => x)"
KI = "(fun x y => y)"
S = "(fun f g x => f x (g x))"
PLUS = "(fun m n s z => m s (n s z))"
MULT = "(fun m n s => m (n s))"
SUCC = "(fun n s z => s (n s z))"
PAIR = "(fun a b p => p a b)"
FST = "(fun q => q (fun a b => a))"
SND = "(fun q => q (fun a b => b))"
NOT = "(fun c x y => c y x)"
AND = "(fun c d => c d c)"
OR = "(fun c d => c c d)"
IF = "(fun c u v => c u v)"
ISZERO = f"(fun n => n (fun x => {KI}) {K})"


def numeral_source(n):
    return "(fun s z => " + "s (" * n + "z" + ")" * n + ")"


def decode(source):
    """Unfold a numeral into nested pairs so different counts give different values."""
    return f"{source} ({PAIR} {K}) {I}"


C = [numeral_source(n) for n in range(7)]
PRED = (f"(fun n => {FST} (n (fun q => {PAIR} ({SND} q) ({SUCC} ({SND} q)))"
        f" ({PAIR} {C[0]} {C[0]})))")

UNTYPED_PROGRAMS = [decode(c) for c in C] + [
    decode(f"{PLUS} {C[3]} {C[4]}"),
    f"{PLUS} {C[3]} {C[4]}",
    decode(f"{PLUS} {C[0]} {C[2]}"),
    decode(f"{MULT} {C[2]} {C[3]}"),
    decode(f"{MULT} {C[0]} {C[5]}"),
    decode(f"{SUCC} {C[4]}"),
    decode(f"{PRED} {C[3]}"),
    decode(f"{PRED} {C[0]}"),
    decode(f"{C[2]} {C[3]}"),
    f"{FST} ({PAIR} {K} {KI})",
    f"{SND} ({PAIR} {K} {KI})",
    f"{FST} ({SND} ({PAIR} {I} ({PAIR} {KI} {K})))",
    f"{PAIR} {I} {K}",
] + [f"{c} {NOT} {K}" for c in C[:5]] + [
    f"{NOT} {K}",
    f"{AND} {K} {KI}",
    f"{OR} {KI} {K}",
    f"{IF} ({ISZERO} {C[0]}) {I} {K}",
    f"{IF} ({ISZERO} {C[2]}) {I} {K}",
    f"{S} {K} {K} {I}",
    f"(fun x => x x) ((fun x => x x) {I})",
]


class TestUntypedAgreement:
    @pytest.mark.parametrize("source", UNTYPED_PROGRAMS)
    def test_embedding_runs_like_untyped(self, source):
        t = parse_term(source)
        et, ty = elaborate_program(untyped_embed(t))
        assert ty == CUnknown()
        result = run(et, 100_000)
        assert isinstance(result, Value)
        assert erase(result.term) == untyped_eval(t, 100_000)

    def test_church_sum(self):
        t = parse_term(decode(f"{PLUS} {C[3]} {C[4]}"))
        seven = parse_term(decode(numeral_source(7)))
        assert untyped_eval(t, 1000) == untyped_eval(seven, 1000)

    def test_divergence_exhausts_fuel(self):
        et, _ = elaborate_program(untyped_embed(OMEGA_TERM))
        assert isinstance(run(et, 1000), OutOfFuel)
        with pytest.raises(FuelExhausted):
            untyped_eval(OMEGA_TERM, 1000)
