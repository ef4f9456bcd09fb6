"""Tests for elaboration into evidence terms and the small-step runtime."""

import pytest

from gdtl.core import (
    App,
    CNat,
    Context,
    CPi,
    CType,
    CUnknown,
    CVec,
    CZero,
    Evidence,
    Lam,
    Nil,
    Nat,
    Unknown,
    Var,
    WithEv,
    Zero,
    cnumeral,
    numeral,
    pretty,
)
from gdtl.errors import GdtlTypeError, StuckError
from gdtl.evidence import (
    DYN_ARROW,
    OutOfFuel,
    RuntimeErr,
    Stepped,
    Value,
    compose_evidence,
    elab_check,
    elab_synth,
    elaborate_program,
    erase,
    ev_check,
    ev_type,
    is_value,
    run,
    step,
    trace,
)
from gdtl.harness import audit_term
from gdtl.surface import parse_term

NAT_TO_NAT = CPi("_", CNat(), CNat(), 1)


def elaborate(text):
    et, _ = elaborate_program(parse_term(text))
    return et


# ============================================================================
# ELABORATION
# ============================================================================


class TestElaborate:
    def test_unknown_carries_its_evidence(self):
        et, ty = elab_synth(Context(), parse_term("?"))
        assert et == WithEv(Evidence(CUnknown()), Unknown())
        assert ty == CUnknown()
        assert pretty(et) == "⟨?⟩?"

    def test_function_always_wrapped(self):
        et = elab_check(Context(), parse_term("fun x => x"), NAT_TO_NAT)
        assert et == WithEv(Evidence(NAT_TO_NAT), Lam("x", Var(0)))

    def test_function_at_unknown(self):
        et = elab_check(Context(), parse_term("fun x => x"), CUnknown())
        assert et == WithEv(Evidence(DYN_ARROW), Lam("x", Var(0)))

    def test_no_wrap_when_types_agree(self):
        assert elab_check(Context(), Zero(), CNat()) == Zero()

    def test_no_wrap_for_cumulativity(self):
        assert elab_check(Context(), Nat(), CType(2)) == Nat()

    def test_wraps_with_meet(self):
        et = elab_check(Context(), parse_term("Nil Nat :: Vec Nat ?"), CVec(CNat(), cnumeral(1)))
        inner = WithEv(Evidence(CVec(CNat(), CZero())), Nil(Nat()))
        assert et == WithEv(Evidence(CVec(CNat(), cnumeral(1))), inner)

    def test_unknown_function_gets_arrow_evidence(self):
        et, ty = elab_synth(Context(), parse_term("? 0"))
        assert isinstance(et, App)
        assert et.fn.evidence == Evidence(DYN_ARROW)
        assert ty == CUnknown()

    def test_rejects_ill_typed(self):
        with pytest.raises(GdtlTypeError, match="type mismatch"):
            elab_check(Context(), parse_term("Nil Nat"), CVec(CNat(), cnumeral(1)))

    def test_erase(self):
        et = elab_check(Context(), parse_term("Nil Nat :: Vec Nat ?"), CVec(CNat(), cnumeral(1)))
        assert erase(et) == Nil(Nat())


class TestComposeEvidence:
    def test_meet_of_witnesses(self):
        result = compose_evidence(Evidence(CVec(CNat(), CUnknown())), Evidence(CVec(CNat(), cnumeral(1))))
        assert result == Evidence(CVec(CNat(), cnumeral(1)))

    def test_undefined(self):
        assert compose_evidence(Evidence(CNat()), Evidence(DYN_ARROW)) is None


class TestEvidenceTyping:
    def test_witness_is_the_type(self):
        assert ev_type(Context(), WithEv(Evidence(CNat()), Zero())) == CNat()

    def test_inconsistent_inner_term(self):
        with pytest.raises(GdtlTypeError, match="evidence Nat does not refine Vec Nat 0"):
            ev_type(Context(), WithEv(Evidence(CNat()), Nil(Nat())))

    @pytest.mark.parametrize("witness, value", [
        (CUnknown(), Zero()),
        (CVec(CNat(), CUnknown()), parse_term("Cons Nat 0 0 (Nil Nat)")),
    ])
    def test_witness_must_refine_value_type(self, witness, value):
        with pytest.raises(GdtlTypeError, match="does not refine"):
            ev_check(Context(), WithEv(Evidence(witness), value), witness)

    def test_precise_witness_accepted(self):
        value = parse_term("Cons Nat 0 0 (Nil Nat)")
        ev_check(Context(), WithEv(Evidence(CVec(CNat(), cnumeral(1))), value), CVec(CNat(), CUnknown()))

    def test_bad_evidence_fails_audit(self):
        et = WithEv(Evidence(CUnknown()), Zero())
        problem = audit_term(et, CUnknown(), 10)
        assert problem.startswith("initial state: ")
        assert "does not refine Nat" in problem

    def test_nested_witnesses_left_to_composition(self):
        nested = WithEv(Evidence(CVec(CNat(), cnumeral(1))), WithEv(Evidence(CVec(CNat(), CZero())), Nil(Nat())))
        assert ev_type(Context(), nested) == CVec(CNat(), cnumeral(1))

    def test_failing_program_states_stay_well_typed(self, head_nil):
        et, U = elaborate_program(head_nil)
        assert audit_term(et, U, 1000) is None
        assert isinstance(run(et, 1000), RuntimeErr)

    def test_elaborated_terms_are_well_typed(self):
        et = elaborate("((fun x => Succ x) :: Nat -> Nat) 2")
        ev_check(Context(), et, CNat())


# ============================================================================
# RUNTIME
# ============================================================================


class TestValues:
    def test_raw_and_wrapped_values(self):
        assert is_value(Zero())
        assert is_value(WithEv(Evidence(CNat()), numeral(2)))
        assert not is_value(WithEv(Evidence(CNat()), WithEv(Evidence(CNat()), Zero())))
        assert not is_value(App(Lam("x", Var(0)), Zero()))


class TestStep:
    def test_application_with_evidence(self):
        result = step(elaborate("((fun x => Succ x) :: Nat -> Nat) 2"))
        assert isinstance(result, Stepped)
        assert result.rule == "StepAppEv"

    def test_value_does_not_step(self):
        assert step(Zero()) == Value(Zero())

    def test_free_variable_is_stuck(self):
        with pytest.raises(StuckError, match="free variable"):
            step(Var(0))


class TestRun:
    def test_application(self):
        result = run(elaborate("((fun x => Succ x) :: Nat -> Nat) 2"), 100)
        assert isinstance(result, Value)
        assert result.steps == 1
        assert erase(result.term) == numeral(3)

    def test_head_of_dynamic_nil_fails(self, head_nil):
        et, _ = elaborate_program(head_nil)
        result = run(et, 1000)
        assert isinstance(result, RuntimeErr)
        assert result.left == CVec(CNat(), CZero())
        assert result.right == CVec(CNat(), cnumeral(1))
        assert result.describe() == "runtime type error: ⟨Vec Nat 0⟩ ⊓ ⟨Vec Nat 1⟩ undefined"

    def test_describe_ascii(self):
        err = RuntimeErr(CNat(), CType(1))
        assert err.describe(unicode=False) == "runtime type error: <Nat> /\\ <Type 1> undefined"

    def test_applying_a_number(self):
        result = run(elaborate("(0 :: ?) 0"), 100)
        assert isinstance(result, RuntimeErr)
        assert result.left == CNat()
        assert result.right == DYN_ARROW

    def test_applying_unknown(self):
        result = run(elaborate("? 0"), 100)
        assert isinstance(result, Value)
        assert erase(result.term) == Unknown()

    def test_eliminating_unknown(self):
        result = run(elaborate("natElim (fun _ => Nat) 0 (fun k r => Succ r) ?"), 100)
        assert isinstance(result, Value)
        assert erase(result.term) == Unknown()

    def test_primitive_recursion(self):
        result = run(elaborate("natElim (fun _ => Nat) 0 (fun k r => Succ (Succ r)) 3"), 1000)
        assert isinstance(result, Value)
        assert erase(result.term) == numeral(6)

    def test_divergence_runs_out_of_fuel(self):
        result = run(elaborate("((fun x => x x) :: ?) ((fun x => x x) :: ?)"), 50)
        assert isinstance(result, OutOfFuel)
        assert result.fuel_used == 50

    def test_negative_fuel(self):
        with pytest.raises(ValueError, match="non-negative"):
            run(Zero(), -1)


class TestTrace:
    def test_rules_then_result(self):
        items = list(trace(elaborate("? 0"), 100))
        rules = [item[0] for item in items if isinstance(item, tuple)]
        assert rules == ["StepAscr", "StepAppDyn"]
        assert isinstance(items[-1], Value)

    def test_states_stay_well_typed(self):
        et = elaborate("((fun x => x) :: (Nat -> Nat)) 2")
        assert audit_term(et, CNat(), 100) is None
