"""End-to-end tests for the ``gdtl`` command line: output, JSON payloads and exit codes."""

import json

import pytest

import gdtl.cli as cli
from gdtl.cli import Outcome, emit_json, main, props, run_source
from gdtl.config import GdtlConfig
from gdtl.enums import Property, Status, Verdict
from gdtl.harness import PropertyReport


@pytest.fixture
def program(tmp_path):
    """Write a source string to a ``.gdtl`` file and return its path as a string."""
    def write(source, name="main.gdtl"):
        path = tmp_path / name
        path.write_text(source, encoding="utf-8")
        return str(path)
    return write


# ============================================================================
# CHECK
# ============================================================================


class TestCheck:
    def test_prints_type(self, programs_dir, capsys):
        assert main(["check", str(programs_dir / "head_nil.gdtl")]) == 0
        assert capsys.readouterr().out == "Nat\n"

    def test_json(self, programs_dir, capsys):
        assert main(["check", str(programs_dir / "head_nil.gdtl"), "--json"]) == 0
        assert capsys.readouterr().out == '{"status":"ok","type":"Nat"}\n'

    def test_type_error(self, programs_dir, capsys):
        assert main(["check", str(programs_dir / "head_static_nil.gdtl")]) == 1
        assert "type error" in capsys.readouterr().err

    def test_type_error_json(self, program, capsys):
        assert main(["check", program("Succ Nat"), "--json"]) == 1
        data = json.loads(capsys.readouterr().out)
        assert data["status"] == "type"
        assert data["error"]["line"] == 1
        assert data["error"]["column"] == 6

    def test_parse_error(self, program, capsys):
        path = program("fun =>")
        assert main(["check", path]) == 3
        assert capsys.readouterr().err.startswith(path)

    def test_missing_file(self, tmp_path, capsys):
        assert main(["check", str(tmp_path / "nowhere.gdtl")]) == 3
        assert "cannot read" in capsys.readouterr().err

    @pytest.mark.parametrize("source", [
        "natElim (fun _ => ?) ((fun x => x x) :: ?) (fun k r => r r) 1",
        "natElim (fun _ => ?) (fun x => x x x) (fun k r => r r) 1",
    ])
    def test_self_application_in_eliminator_step(self, program, capsys, source):
        assert main(["check", program(source)]) == 0
        assert capsys.readouterr().out == "?\n"

    def test_bad_usage(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 3


class TestNormAndElab:
    def test_norm(self, program, capsys):
        assert main(["norm", program("natElim (fun _ => Nat) 0 (fun k r => Succ (Succ r)) 3")]) == 0
        assert capsys.readouterr().out == "6\n"

    def test_elab_shows_evidence(self, program, capsys):
        assert main(["elab", program("?")]) == 0
        assert capsys.readouterr().out == "⟨?⟩?\n"

    def test_elab_ascii(self, program, capsys):
        assert main(["elab", program("?"), "--ascii"]) == 0
        assert capsys.readouterr().out == "<?>?\n"


# ============================================================================
# RUN
# ============================================================================


class TestRun:
    def test_value(self, program, capsys):
        assert main(["run", program("((fun x => Succ x) :: Nat -> Nat) 2")]) == 0
        assert capsys.readouterr().out == "3\n"

    def test_runtime_error(self, programs_dir, capsys):
        assert main(["run", str(programs_dir / "head_nil.gdtl")]) == 2
        assert capsys.readouterr().err == "runtime type error: ⟨Vec Nat 0⟩ ⊓ ⟨Vec Nat 1⟩ undefined\n"

    def test_runtime_error_json(self, programs_dir, capsys):
        assert main(["run", str(programs_dir / "head_nil.gdtl"), "--json"]) == 2
        out = capsys.readouterr().out
        assert out == '{"status":"err","error":{"left":"Vec Nat 0","right":"Vec Nat 1"}}\n'

    def test_fuel_exhausted(self, programs_dir, capsys):
        assert main(["run", str(programs_dir / "omega.gdtl"), "--fuel", "1000", "--json"]) == 4
        assert capsys.readouterr().out == '{"status":"fuel","fuelUsed":1000}\n'

    def test_value_json(self, program, capsys):
        assert main(["run", program("Succ 2"), "--json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data == {"status": "ok", "type": "Nat", "value": "3", "steps": 0}

    def test_trace(self, program, capsys):
        assert main(["run", program("? 0"), "--trace"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert [line.split(" | ")[0] for line in lines[:-1]] == ["StepAscr", "StepAppDyn", "VALUE"]
        assert lines[-1] == "?"

    def test_trace_goes_to_stderr_with_json(self, program, capsys):
        assert main(["run", program("Succ 2"), "--trace", "--json"]) == 0
        captured = capsys.readouterr()
        assert captured.err == "VALUE | 3\n"
        assert json.loads(captured.out)["value"] == "3"

    def test_trace_ends_with_error(self, programs_dir):
        source = (programs_dir / "head_nil.gdtl").read_text()
        outcome = run_source(source, "head_nil.gdtl", GdtlConfig(), show_trace=True)
        assert outcome.status is Status.RUNTIME_ERROR
        assert outcome.trace[-1].startswith("ERR | runtime type error")


class TestFuelSettings:
    def test_environment_variable(self, programs_dir, monkeypatch):
        monkeypatch.setenv("GDTL_FUEL", "10")
        assert main(["run", str(programs_dir / "factorial.gdtl")]) == 4

    def test_flag_beats_environment(self, programs_dir, monkeypatch, capsys):
        monkeypatch.setenv("GDTL_FUEL", "10")
        assert main(["run", str(programs_dir / "factorial.gdtl"), "--fuel", "100000"]) == 0
        assert capsys.readouterr().out == "24\n"

    def test_bad_environment_value(self, programs_dir, monkeypatch, capsys):
        monkeypatch.setenv("GDTL_FUEL", "lots")
        assert main(["run", str(programs_dir / "factorial.gdtl")]) == 3
        assert "GDTL_FUEL" in capsys.readouterr().err

    def test_zero_fuel_takes_no_steps(self, programs_dir, capsys):
        assert main(["run", str(programs_dir / "factorial.gdtl"), "--fuel", "0", "--json"]) == 4
        assert capsys.readouterr().out == '{"status":"fuel","fuelUsed":0}\n'

    def test_negative_fuel(self, programs_dir):
        assert main(["run", str(programs_dir / "factorial.gdtl"), "--fuel", "-1"]) == 3

    def test_fuel_header(self, program, capsys):
        path = program("-- fuel: 5\n((fun x => x x) :: ?) ((fun x => x x) :: ?)\n")
        assert main(["run", path, "--json"]) == 4
        assert capsys.readouterr().out == '{"status":"fuel","fuelUsed":5}\n'

    def test_flag_beats_header(self, program, capsys):
        path = program("-- fuel: 5\n((fun x => x x) :: ?) ((fun x => x x) :: ?)\n")
        assert main(["run", path, "--fuel", "7", "--json"]) == 4
        assert capsys.readouterr().out == '{"status":"fuel","fuelUsed":7}\n'

    def test_environment_beats_header(self, program, monkeypatch, capsys):
        monkeypatch.setenv("GDTL_FUEL", "3")
        path = program("-- fuel: 5\n((fun x => x x) :: ?) ((fun x => x x) :: ?)\n")
        assert main(["run", path, "--json"]) == 4
        assert capsys.readouterr().out == '{"status":"fuel","fuelUsed":3}\n'

    def test_approx_program_within_header_budget(self, programs_dir, capsys):
        assert main(["run", str(programs_dir / "approx.gdtl"), "--json"]) == 4
        assert capsys.readouterr().out == '{"status":"fuel","fuelUsed":2000}\n'


class TestStatic:
    def test_static_check(self, program, capsys):
        assert main(["check", "--static", program("(fun A x => x) :: (A : Type 1) -> A -> A")]) == 0
        assert capsys.readouterr().out == "(A : Type 1) -> A -> A\n"

    def test_static_rejects_unknown(self, program, capsys):
        assert main(["check", "--static", program("?")]) == 1
        assert "not part of the static language" in capsys.readouterr().err

    def test_static_run(self, program, capsys):
        source = "((fun A x => x) :: (A : Type 2) -> A -> A) ((B : Type 1) -> B -> B) (fun B y => y)"
        assert main(["run", "--static", program(source)]) == 0
        assert capsys.readouterr().out == "fun B y => y\n"


# ============================================================================
# PROPS
# ============================================================================


class TestProps:
    def test_one_json_line_per_report(self, capsys):
        code = main(["props", "--seed", "0", "--count", "2"])
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 8
        reports = [json.loads(line) for line in lines]
        found = any(r["verdict"] == "counterexample" for r in reports)
        assert code == (5 if found else 0)

    def test_counterexample_exit_code(self, monkeypatch):
        failing = PropertyReport(0, Property.DYNAMIC, Verdict.COUNTEREXAMPLE, "value 1 is not below 2")
        monkeypatch.setattr(cli, "check_guarantees", lambda *args: [failing])
        code, lines = props(0, 1, GdtlConfig.quick())
        assert code == 5
        assert json.loads(lines[0])["counterexample"] == "value 1 is not below 2"

    def test_safety_adds_reports(self, monkeypatch):
        monkeypatch.setattr(cli, "check_guarantees", lambda *args: [])
        code, lines = props(0, 2, GdtlConfig.quick(), safety=True)
        assert len(lines) == 2
        assert all(json.loads(line)["property"] == "safety" for line in lines)


# ============================================================================
# OUTCOMES
# ============================================================================


class TestOutcome:
    @pytest.mark.parametrize("status, code", [
        (Status.OK, 0),
        (Status.TYPE_ERROR, 1),
        (Status.RUNTIME_ERROR, 2),
        (Status.PARSE_ERROR, 3),
        (Status.FUEL, 4),
        (Status.COUNTEREXAMPLE, 5),
    ])
    def test_exit_codes(self, status, code):
        assert Outcome(status).exit_code == code

    def test_emit_json_is_compact(self):
        outcome = Outcome(Status.OK, {"type": "Vec Nat ?"})
        assert emit_json(outcome) == '{"status":"ok","type":"Vec Nat ?"}'
