import json
import subprocess
import sys
from pathlib import Path

import pytest

from tridir.cli import main

GOLDEN = Path(__file__).parent / "golden"
PRINCIPAL = str(GOLDEN / "principal.src")
NESTED = str(GOLDEN / "nested_app.src")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("system", ["let", "tri"])
def test_check_accept_and_reject(capsys, system):
    assert run(capsys, "check", PRINCIPAL, "--against", "B", "--system", system)[0] == 0
    assert run(capsys, "check", PRINCIPAL, "--against", "A1", "--system", system)[0] == 1


def test_check_fuel_exhausted(capsys):
    code, out, _ = run(capsys, "check", PRINCIPAL, "--against", "B", "--fuel", "2")
    assert code == 2 and out.startswith("fuel-exhausted")


def test_check_json_with_derivation(capsys):
    code, out, _ = run(capsys, "check", PRINCIPAL, "--against", "B", "--json", "--derivation")
    assert code == 0 and json.loads(out) == json.loads((GOLDEN / "principal_let_derivation.json").read_text())


def test_synth(capsys):
    code, out, _ = run(capsys, "synth", NESTED, "--system", "tri")
    assert code == 0 and out.split() == ["Q"]


def test_translate(capsys):
    code, out, _ = run(capsys, "translate", NESTED)
    assert code == 0
    assert out.splitlines() == ["x0^ = f", "x1^ = x", "x2^ = y", "x3^ = x1^ x2^", "x4^ = x0^ x3^", "+ x4^"]


def test_measure_and_unwind(capsys, tmp_path):
    assert run(capsys, "measure", NESTED)[1].strip() == "0 0 0 0"
    assert run(capsys, "unwind", NESTED)[1].strip() == "f (x y)"
    term = tmp_path / "t.json"
    term.write_text(json.dumps({"tag": "let", "var": "a", "rhs": {"tag": "var", "name": "f"},
                                "body": {"tag": "linvar", "name": "a"}}))
    assert run(capsys, "measure", str(term), "--json")[1].strip() == \
        '{"unbound_synth": 0, "brittle": 0, "prickly": 0, "transposed": 0}'


def test_eval_exit_codes(capsys, tmp_path):
    cases = {"(fn a => a) (fn b => b)": 0, "fn a => a a": 0, "(fix u => u)": 2, "f (fn a => a)": 1}
    for text, code in cases.items():
        path = tmp_path / "e.src"
        path.write_text(text)
        assert run(capsys, "eval", str(path), "--max-steps", "20")[0] == code, text


def test_differ(capsys):
    code, out, _ = run(capsys, "differ", "--size", "3", "--random", "5", "--random-size", "6", "--json")
    data = json.loads(out)
    assert code == 0 and data["disagreements"] == [] and data["cases"] == data["terms"] * 30


@pytest.mark.parametrize("argv", [
    ["check", "/nonexistent.src", "--against", "B"],
    ["check", PRINCIPAL, "--against", "Nope"],
    ["check", PRINCIPAL],
    ["frobnicate"],
])
def test_errors_exit_3(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        raise SystemExit(main(argv))
    assert exc.value.code == 3
    assert "error" in capsys.readouterr().err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tridir", "translate", NESTED], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.endswith("+ x4^\n")
