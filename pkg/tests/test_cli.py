import json
import subprocess
import sys
from pathlib import Path

import pytest

from apfol.cli import EXIT_FAIL, EXIT_IO, EXIT_OK, EXIT_UNKNOWN, EXIT_USAGE, main

DATA = Path(__file__).resolve().parent.parent / "structures"
EMPTY3 = str(DATA / "empty3.txt")
PC = str(DATA / "commutativity.txt")
GRAPHS = str(DATA / "graphs.txt")
TRIANGLE = str(DATA / "triangle.txt")
Z5 = str(DATA / "z5.txt")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_empty_signature(capsys):
    code, out, _ = run(capsys, "check", EMPTY3, "1", "2", "2", "3")
    assert code == EXIT_OK and out.startswith("1:2::2:3: holds")


def test_check_commutativity_fails_with_blocking(capsys):
    code, out, _ = run(capsys, "check", PC, "a", "b", "b", "a")
    assert code == EXIT_FAIL and "fails" in out and "blocked:" in out


def test_check_path_fragment(capsys):
    assert run(capsys, "--fragment", "path", "check", GRAPHS, "a", "b", "c", "d")[0] == EXIT_OK
    code, out, _ = run(capsys, "check", GRAPHS, "a", "c", "b", "d", "--fragment", "path")
    assert code == EXIT_FAIL and "blocked:" in out


def test_justify_listing(capsys):
    code, out, _ = run(capsys, "justify", PC, "a", "b")
    body, trivial = out.split("trivial:\n")
    assert code == EXIT_OK
    assert "f(x) = y" in body and "  f(x) = f(y)" in trivial.splitlines()
    assert "f(x) = f(y)" not in body


def test_justify_empty_signature(capsys):
    _, out, _ = run(capsys, "--json", "justify", EMPTY3, "1", "1")
    assert [j["formula"] for j in json.loads(out)["justifications"]] == ["x = y"]
    _, out, _ = run(capsys, "--json", "justify", EMPTY3, "1", "2")
    assert json.loads(out)["justifications"] == []


def test_json_is_deterministic(capsys):
    outs = [run(capsys, "--json", "check", PC, "a", "b", "b", "a")[1] for _ in range(2)]
    assert outs[0] == outs[1]
    data = json.loads(outs[0])
    assert data["holds"] is False and len(data["arrows"]) == 4


def test_suite_json_is_deterministic_modulo_time(capsys):
    outs = []
    for _ in range(2):
        code, out, _ = run(capsys, "suite", "empty-signature", "--json")
        data = json.loads(out)
        data.pop("wallTime")
        outs.append(data)
    assert code == EXIT_OK and outs[0] == outs[1] and outs[0]["passed"]


def test_suite_failure_exit_code(capsys):
    assert run(capsys, "suite", "catalog")[0] == EXIT_FAIL


def test_exit_codes(capsys):
    assert run(capsys, "check", EMPTY3, "1", "2", "2", "9")[0] == EXIT_UNKNOWN
    assert run(capsys, "check", "/nonexistent.txt", "1", "2", "2", "3")[0] == EXIT_IO
    assert run(capsys, "check", EMPTY3, "1", "2")[0] == EXIT_USAGE
    assert run(capsys, "suite", "nope")[0] == EXIT_USAGE
    assert run(capsys, "check", EMPTY3, "1", "2", "2", "3", "-A", "Missing")[0] == EXIT_USAGE
    assert run(capsys, "nat-s", "check", "1", "2", "x", "3")[0] == EXIT_USAGE


def test_parse_error_is_usage(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("structure X { universe: a\n  function f/1 { (a) -> b } }")
    assert run(capsys, "check", str(bad), "a", "a", "a", "a")[0] == EXIT_USAGE


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "apfol.ini"
    cfg.write_text("json = true\n[bounds]\natoms = 1\ndepth = 1\nquantifiers = 0\n")
    code, out, _ = run(capsys, "--config", str(cfg), "justify", PC, "a", "b")
    data = json.loads(out)
    assert data["bounds"]["max_atoms"] == 1 and data["bounds"]["max_quantifiers"] == 0
    cfg.write_text("colour = red\n")
    assert run(capsys, "--config", str(cfg), "justify", PC, "a", "b")[0] == EXIT_USAGE


def test_flags_override_config(tmp_path, capsys):
    cfg = tmp_path / "apfol.ini"
    cfg.write_text("bounds-atoms = 1\n")
    _, out, _ = run(capsys, "--config", str(cfg), "--bounds-atoms", "3", "--json", "justify", PC, "a", "b")
    assert json.loads(out)["bounds"]["max_atoms"] == 3


def test_element_parameters(capsys):
    assert run(capsys, "--bounds-atoms", "1", "--bounds-depth", "1", "--bounds-quantifiers", "0",
               "--element-parameters", "check", Z5, "1", "2", "3", "0")[0] == EXIT_OK


def test_graph_commands(capsys):
    code, out, _ = run(capsys, "graph", "type", TRIANGLE, "p", "p")
    assert code == EXIT_OK and out.startswith("p - p:")
    assert run(capsys, "graph", "check", GRAPHS, "a", "b", "c", "d")[0] == EXIT_OK
    assert run(capsys, "graph", "check", "--four-arrows", GRAPHS, "a", "c", "b", "d")[0] == EXIT_FAIL


def test_number_commands(capsys):
    code, out, _ = run(capsys, "nat-s", "check", "2", "5", "7", "10")
    assert code == EXIT_OK and "S^3(x) = y" in out
    assert run(capsys, "nat-s", "check", "0", "0", "0", "1")[0] == EXIT_FAIL
    assert run(capsys, "ray", "check", "0", "3", "4", "7")[0] == EXIT_OK
    assert run(capsys, "ray", "check", "0", "3", "4", "6")[0] == EXIT_FAIL
    code, out, _ = run(capsys, "--json", "ray-target", "0", "2", TRIANGLE, "p", "p")
    data = json.loads(out)
    assert code == EXIT_FAIL and data["walkOfLength"] and not data["shortestOfParity"]


def test_sweep_command(capsys):
    code, out, _ = run(capsys, "--json", "sweep", "p-commutativity")
    data = json.loads(out)
    assert code == EXIT_OK and data["general/p-commutativity"]["minimal"]["max_atoms"] == 1


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "apfol", "check", EMPTY3, "1", "2", "2", "3"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "holds" in out.stdout
