import io
import json
import subprocess
import sys

import jsonschema
import pytest

from helpers import DATA
from maxatom.cli import (
    EXIT_BUDGET,
    EXIT_FAIL,
    EXIT_INPUT,
    EXIT_OK,
    build_report,
    load_schema,
    main,
    parse_report,
)
from maxatom.core import Matrix
from maxatom.oracle import check
from maxatom.model import parse_atoms
from maxatom.pipeline import sample, solve

S2 = str(DATA / "S_second.map")
SP = str(DATA / "S_prime.map")
POS = str(DATA / "positive.map")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestSolve:
    def test_text_report(self, capsys):
        code, out, _ = run(capsys, "solve", S2)
        assert code == EXIT_OK
        assert "status: Reduced" in out
        assert "F_wedge:\n  -11" in out
        assert "supremum: 0 -11 -10 -11" in out

    def test_only_bottom(self, capsys):
        code, out, _ = run(capsys, "solve", SP)
        assert code == EXIT_OK
        assert "status: OnlyBottom" in out
        assert "supremum: -inf -inf -inf -inf" in out

    def test_positive_report(self, capsys):
        code, out, _ = run(capsys, "solve", POS, "--format", "json")
        report = json.loads(out)
        assert code == EXIT_OK
        assert report["status"] == "PositiveSharp"
        assert report["matrices"]["A_sharp"][1] == ["-9", "0", "-inf", "-25"]

    @pytest.mark.parametrize("name", ["S.map", "S_prime.map", "S_second.map", "positive.map", "circuit.map"])
    def test_json_matches_schema(self, capsys, name):
        code, out, _ = run(capsys, "solve", str(DATA / name), "--format", "json", "--count", "3", "--seed", "1")
        assert code == EXIT_OK
        jsonschema.validate(json.loads(out), load_schema())

    def test_report_round_trip(self):
        solved = solve(parse_atoms((DATA / "S_second.map").read_text()))
        vectors = sample(solved, 4, seed=3)
        back = parse_report(json.dumps(build_report(solved, vectors)))
        assert back["matrices"]["F_wedge"] == Matrix([[-11]])
        assert back["matrices"]["T_wedge"] == solved.description.T_wedge
        assert back["supremum"] == [0, -11, -10, -11]
        assert back["samples"] == vectors

    def test_stdin(self, capsys, monkeypatch):
        monkeypatch.setattr(sys, "stdin", io.StringIO("vars a, b\nb <= -1 + a\n"))
        code, out, _ = run(capsys, "solve", "-")
        assert code == EXIT_OK
        assert "supremum: 0 -1" in out


class TestCheck:
    def test_pass(self, capsys):
        code, out, _ = run(capsys, "check", S2, "0,-11,-10,-11")
        assert (code, out.strip()) == (EXIT_OK, "PASS")

    def test_fail_lists_atoms(self, capsys):
        code, out, _ = run(capsys, "check", S2, "0,0,0,0")
        assert code == EXIT_FAIL
        assert "violated: x3 <= -10 + x1  (0 <= -10)" in out

    def test_leading_minus_vector(self, capsys):
        code, out, _ = run(capsys, "check", S2, "-inf,-inf,-inf,-inf")
        assert (code, out.strip()) == (EXIT_OK, "PASS")

    def test_json(self, capsys):
        code, out, _ = run(capsys, "check", S2, "--format", "json", "0,-10,-10,-11")
        assert code == EXIT_FAIL
        assert json.loads(out)["pass"] is False

    def test_wrong_length(self, capsys):
        code, _, err = run(capsys, "check", S2, "0,0")
        assert code == EXIT_INPUT
        assert "4 variables" in err


class TestSample:
    def test_zero(self, capsys):
        code, out, _ = run(capsys, "sample", S2, "0", "--format", "json")
        assert (code, json.loads(out)) == (EXIT_OK, [])

    def test_only_bottom_yields_one_vector(self, capsys):
        code, out, _ = run(capsys, "sample", SP, "5", "--format", "json")
        assert json.loads(out) == [["-inf"] * 4]

    def test_seeded_samples_are_solutions(self, capsys):
        _, first, _ = run(capsys, "sample", S2, "3", "--seed", "7")
        _, second, _ = run(capsys, "sample", S2, "--count", "3", "--seed", "7")
        assert first == second
        system = parse_atoms((DATA / "S_second.map").read_text())
        lines = first.strip().splitlines()
        assert len(lines) == 3
        for line in lines:
            assert check(line.split(), system)


class TestOracle:
    def test_dominated(self, capsys):
        code, out, err = run(capsys, "oracle", S2, "--grid", "12")
        assert code == EXIT_OK
        assert "dominated: " in out
        assert "warning:" in err

    def test_not_dominated(self, capsys, tmp_path):
        f = tmp_path / "miss.map"
        f.write_text("vars x1, x2, x3\nx3 <= max(x1, x2)\nx1 <= -3 + x2\nx1 <= x3\n")
        code, _, _ = run(capsys, "oracle", str(f), "--grid", "2")
        assert code == EXIT_FAIL

    def test_budget(self, capsys):
        code, _, err = run(capsys, "oracle", S2, "--grid", "12", "--budget", "100")
        assert code == EXIT_BUDGET
        assert "budget" in err

    def test_json(self, capsys):
        code, out, _ = run(capsys, "oracle", SP, "--grid", "2", "--format", "json")
        data = json.loads(out)
        assert (code, data["solutions"], data["dominated"]) == (EXIT_OK, 1, 1)


class TestErrors:
    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "solve", "/nonexistent.map")
        assert code == EXIT_INPUT
        assert err.startswith("error:")

    def test_syntax_error(self, capsys, tmp_path):
        f = tmp_path / "bad.map"
        f.write_text("x <= 3 y\n")
        code, _, err = run(capsys, "solve", str(f))
        assert code == EXIT_INPUT
        assert "1" in err

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "maxatom", "check", S2, "0,-11,-10,-11"],
                              capture_output=True, text=True)
        assert proc.returncode == EXIT_OK
        assert proc.stdout.strip() == "PASS"
