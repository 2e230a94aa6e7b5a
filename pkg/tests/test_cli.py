"""The command-line front end: exit codes, report layout, determinism."""

import os
import subprocess
import sys

import pytest

from operadlab.cli import COMMANDS, TABLE_HEADER, run
from operadlab.deform import def1_space
from operadlab.io import fixture_path, load_operad


def cli(*args, env=None):
    e = dict(os.environ)
    e.update(env or {})
    return subprocess.run([sys.executable, "-m", "operadlab.cli"] + list(args),
                          capture_output=True, text=True, env=e, timeout=600)


def body(lines):
    return [l for l in lines if not l.startswith("#")]


def test_check_preset():
    code, lines, _ = run(["check", "--preset", "com", "--max-arity", "3"])
    assert code == 0
    assert lines[0] == "# command: check"
    assert lines[1].startswith("# config: preset=com field=Q max-arity=3")
    assert "# violations: 0" in lines[2]


def test_table_layout():
    code, lines, _ = run(["hochschild", "--preset", "com", "--max-arity", "3", "--bar-len", "3",
                          "--degrees", "-1..1"])
    assert code == 0
    rows = body(lines)
    assert rows[0].split("\t") == list(TABLE_HEADER)
    assert [r.split("\t")[:3] for r in rows[1:]] == [["-1", "0", "yes"], ["0", "1", "yes"], ["1", "0", "yes"]]
    assert lines[-1] == "# stabilized: 3/3 rows"


@pytest.mark.parametrize("argv,code", [
    (["check", "--preset", "nosuch"], 2),
    (["check", "--preset", "com", "--max-arity", "7"], 2),
    (["quillen", "--preset", "com", "--bar-len", "9"], 2),
    (["quillen", "--preset", "com", "--degrees", "-7..0"], 2),
    (["check", "--input", "/nonexistent.json"], 2),
    (["check", "--preset", "com", "--input", "x.json"], 2),
    (["artinian", "--preset", "com", "--ring", "kxk"], 0),
    (["kaehler-compare", "--preset", "com", "--max-arity", "3"], 2),
    (["artinian", "--preset", "com", "--ring", "dual"], 0),
])
def test_exit_codes(argv, code):
    assert run(argv)[0] == code


def test_broken_document_exits_one(tmp_path):
    import json
    doc = json.load(open(fixture_path("com4.json")))
    for c in doc["compositions"]:
        if c["seq1"]["inputs"] == ["*", "*"] and len(c["seq2"]["inputs"]) == 2:
            c["entries"][0][3] = "3"
            break
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(doc))
    code, lines, _ = run(["check", "--input", str(p)])
    assert code == 1
    assert any("associativity" in l for l in lines)


def test_unsafe_lifts_caps():
    code, lines, _ = run(["check", "--preset", "i", "--max-arity", "7", "--unsafe"])
    assert code == 0


def test_output_file(tmp_path):
    out = tmp_path / "r.tsv"
    r = cli("check", "--preset", "com", "--max-arity", "3", "--output", str(out))
    assert r.returncode == 0 and r.stdout == ""
    assert out.read_text().startswith("# command: check\n")
    assert "wall time" in r.stderr


def test_report_bytes_ignore_threads():
    args = ["quillen", "--preset", "nilpotent", "--max-arity", "4", "--bar-len", "3", "--degrees", "-1..1"]
    a = cli(*args, env={"OPERADLAB_THREADS": "1"})
    b = cli(*args, env={"OPERADLAB_THREADS": "4"})
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout


def test_deform1_document_matches_library():
    path = fixture_path("nilpotent2.json")
    code, lines, _ = run(["deform1", "--input", path, "--direction", "2"])
    assert code == 0
    kv = dict(l.split("\t") for l in body(lines))
    assert int(kv["def1"]) == def1_space(load_operad(path)).dim
    assert int(kv["def1_direction"]) == 2 * int(kv["def1"])


@pytest.mark.parametrize("cmd", COMMANDS)
def test_every_command_runs(cmd):
    N = "4" if cmd == "kaehler-compare" else "3"
    argv = [cmd, "--preset", "com", "--max-arity", N, "--bar-len", "3", "--degrees", "-1..1"]
    if cmd == "artinian":
        argv += ["--ring", "dual"]
    code, lines, _ = run(argv)
    assert code == 0, lines
    assert lines[0] == "# command: " + cmd
