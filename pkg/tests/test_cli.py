import subprocess
import sys

import pytest

from pltlgames.automata import dump_automaton, parse_automaton
from pltlgames.cli import main, parse_bindings, UsageError
from conftest import FIXTURES, PHI1, PHI2, PHI3

GOLDEN = FIXTURES.parent / "golden"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def arena(name):
    return FIXTURES / f"{name}.gm"


def record(out):
    return dict(line.split(" = ", 1) for line in out.splitlines() if " = " in line)


class TestExamples:
    def test_member(self, capsys):
        code, out, _ = run(capsys, "member", "--arena", arena("a-path"), "--formula", PHI1,
                           "--player", 0, "--val", "x=2")
        assert code == 0 and "result = true\n" in out

    def test_member_negative(self, capsys):
        code, out, _ = run(capsys, "member", "--arena", arena("a-path"), "--formula", PHI1,
                           "--val", "x=1")
        assert code == 2 and record(out)["result"] == "false"

    def test_optimize(self, capsys):
        code, out, _ = run(capsys, "optimize", "--objective", "min-max", "--arena",
                           arena("a-delay"), "--formula", PHI2)
        assert code == 0 and "value = 2\n" in out and record(out)["status"] == "value"

    def test_empty(self, capsys):
        code, out, _ = run(capsys, "empty", "--arena", arena("a-stall"), "--formula", PHI2,
                           "--player", 0)
        assert code == 0 and "result = true\n" in out

    def test_universal_and_finite(self, capsys):
        assert run(capsys, "universal", "--arena", arena("a-loop"), "--formula", PHI3)[0] == 0
        assert run(capsys, "finite", "--arena", arena("a-loop"), "--formula", PHI3)[0] == 2
        assert run(capsys, "finite", "--arena", arena("a-ppn"), "--formula", PHI3)[0] == 0


class TestStatuses:
    def test_none(self, capsys):
        code, out, _ = run(capsys, "optimize", "--objective", "min-max", "--arena",
                           arena("a-stall"), "--formula", PHI2)
        assert code == 2 and "status = none\n" in out

    def test_unbounded(self, capsys):
        code, out, _ = run(capsys, "optimize", "--objective", "max-max", "--arena",
                           arena("a-loop"), "--formula", PHI3)
        assert code == 0 and "status = unbounded\n" in out

    def test_cap_flag_and_env(self, capsys, monkeypatch):
        args = ("optimize", "--objective", "min-max", "--arena", arena("a-path"), "--formula", PHI1)
        code, out, _ = run(capsys, *args, "--max-bound", 1)
        assert code == 2 and record(out)["message"] == "no winning valuation <= 1"
        monkeypatch.setenv("PLTL_ARENA_MAX_BOUND", "1")
        assert run(capsys, *args)[0] == 2
        assert run(capsys, *args, "--max-bound", 5)[0] == 0

    def test_player1_optimization_uses_dual(self, capsys):
        code, out, _ = run(capsys, "optimize", "--objective", "max-max", "--player", 1,
                           "--arena", arena("a-path"), "--formula", PHI1)
        assert code == 0 and record(out)["value"] == "1"

    def test_text_format(self, capsys):
        code, out, _ = run(capsys, "optimize", "--objective", "min-max", "--format", "text",
                           "--arena", arena("a-delay"), "--formula", PHI2)
        assert code == 0 and "value: 2\n" in out

    def test_deterministic_output(self, capsys):
        args = ("optimize", "--objective", "min-min", "--arena", arena("a-pq"), "--formula",
                "F<=x p & F<=z q", "--jobs", 2)
        first = run(capsys, *args)
        assert first == run(capsys, *args)
        assert record(first[1])["value"] == "1"


class TestErrors:
    @pytest.mark.parametrize("argv", [
        ["member", "--arena", "missing.gm", "--formula", PHI1, "--val", "x=1"],
        ["member", "--arena", "ARENA", "--formula", "F<= p", "--val", "x=1"],
        ["member", "--arena", "ARENA", "--formula", PHI1],
        ["member", "--arena", "ARENA", "--formula", PHI1, "--val", "x=-1"],
        ["member", "--arena", "ARENA", "--formula", PHI1, "--val", "x"],
        ["optimize", "--objective", "max-max", "--arena", "ARENA", "--formula", PHI1],
        ["frobnicate"],
        ["member", "--arena", "ARENA", "--formula", PHI1, "--val", "x=1", "--player", "3"],
        ["solve-parity"],
    ])
    def test_exit_one(self, capsys, argv):
        argv = [str(arena("a-loop")) if a == "ARENA" else a for a in argv]
        code, out, err = run(capsys, *argv)
        assert code == 1 and out == "" and err

    def test_bindings(self):
        assert parse_bindings("x=3, y=0") == {"x": 3, "y": 0}
        assert parse_bindings("") == {}
        with pytest.raises(UsageError):
            parse_bindings("x=a")


class TestStrategies:
    def test_synthesize_then_verify(self, capsys, tmp_path):
        s = tmp_path / "s.txt"
        base = ("--arena", arena("a-delay"), "--formula", PHI2)
        assert run(capsys, "synthesize", *base, "--val", "x=2", "--strategy-out", s)[0] == 0
        assert run(capsys, "verify", *base, "--val", "x=2", "--strategy", s)[0] == 0
        code, out, _ = run(capsys, "verify", *base, "--val", "x=1", "--strategy", s)
        assert code == 2 and "counterexample_cycle" in record(out)

    def test_synthesize_to_stdout(self, capsys):
        code, out, _ = run(capsys, "synthesize", "--arena", arena("a-loop"), "--formula", PHI1,
                           "--val", "x=0")
        assert code == 0 and "move v0 " in out

    def test_synthesize_loser(self, capsys):
        code, _, _ = run(capsys, "synthesize", "--arena", arena("a-stall"), "--formula", PHI2,
                         "--val", "x=1")
        assert code == 2

    def test_formula_from_file(self, capsys, tmp_path):
        f = tmp_path / "phi.ltl"
        f.write_text(PHI1 + "\n")
        assert run(capsys, "member", "--arena", arena("a-loop"), "--formula", f,
                   "--val", "x=0")[0] == 0


class TestParityAndTranslate:
    def test_solve_parity(self, capsys):
        code, out, _ = run(capsys, "solve-parity", FIXTURES / "choice.pg")
        assert code == 0
        assert "region 0 = v0 a\n" in out and "move 0 v0 -> a\n" in out
        assert run(capsys, "solve-parity", "--game", FIXTURES / "choice.pg")[1] == out

    @pytest.mark.parametrize("formula, val, golden", [
        (PHI1, "x=2", "phi1-x2"), (PHI3, "y=1", "phi3-y1")])
    def test_translate_matches_golden(self, capsys, tmp_path, formula, val, golden):
        code, out, _ = run(capsys, "translate", "--formula", formula, "--val", val,
                           "--out", tmp_path)
        assert code == 0
        expected = sorted(p.name for p in (GOLDEN / golden).iterdir())
        assert sorted(p.name for p in tmp_path.iterdir()) == expected
        for name in expected:
            text = (tmp_path / name).read_text()
            assert text == (GOLDEN / golden / name).read_text()
            back, cs = parse_automaton(text)
            assert dump_automaton(back, cs) == text

    def test_emit_automata(self, capsys, tmp_path):
        code, _, _ = run(capsys, "member", "--arena", arena("a-path"), "--formula", PHI1,
                         "--val", "x=2", "--emit-automata", tmp_path)
        assert code == 0 and (tmp_path / "dpa.txt").exists()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pltlgames", "member", "--arena",
                           str(arena("a-loop")), "--formula", PHI1, "--val", "x=0"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "result = true" in proc.stdout
