import json
import subprocess
import sys

import pytest

from multiwit.cli import EXIT_INPUT, EXIT_OK, run


def run_json(argv, capsys):
    code = run(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out else None)


def test_witness_cubic(capsys):
    code, doc = run_json(["witness", "--fixture", "cubic"], capsys)
    assert code == EXIT_OK
    assert doc == {"dim": 1, "degree_map": {"1": 3}}


def test_refine_cubic(capsys):
    code, doc = run_json(["refine", "--fixture", "cubic", "--split", "0:1"], capsys)
    assert code == EXIT_OK
    assert doc["degree_map"] == {"10": 2, "01": 3}


def test_slice_split_cubic(capsys):
    code, doc = run_json(["slice", "--fixture", "cubic-split", "--group", "1"],
                         capsys)
    assert code == EXIT_OK
    assert doc["degree_map"] == {"00": 3}


def test_coarsen_split_cubic(capsys):
    code, doc = run_json(["coarsen", "--fixture", "cubic-split", "--merge", "0:1"],
                         capsys)
    assert code == EXIT_OK
    assert doc["degree_map"] == {"1": 3}
    (stats,) = doc["runs"][0]["paths"]
    assert stats["delta"] == 5
    assert stats["converged"] == 3
    assert stats["diverged"] == 2


def test_segre_split_cubic(capsys):
    code, doc = run_json(["segre", "--fixture", "cubic-split"], capsys)
    assert code == EXIT_OK
    assert doc == {"segre_degree": 5}


def test_trace_cubic(capsys):
    code, doc = run_json(["trace", "--fixture", "cubic"], capsys)
    assert code == EXIT_OK
    assert doc == {"key": "1", "complete": True}


def test_member_two_lines(capsys):
    on = ["member", "--fixture", "two-lines", "--point", "0.3 0.3"]
    code, doc = run_json(on, capsys)
    assert code == EXIT_OK and doc == {"member": True}
    off = ["member", "--fixture", "two-lines", "--point", "0.3 0.4"]
    code, doc = run_json(off, capsys)
    assert code == EXIT_OK and doc == {"member": False}


def test_decompose_two_lines(capsys):
    code, doc = run_json(["decompose", "--fixture", "two-lines"], capsys)
    assert code == EXIT_OK
    assert len(doc["components"]) == 2
    assert all(c["certified"] for c in doc["components"])
    assert all(c["curve_degree"] == 1 for c in doc["components"])
    assert sorted(doc["assignment"]) == [0, 1]


def test_dim_two_lines(capsys):
    code, doc = run_json(["dim", "--fixture", "two-lines"], capsys)
    assert code == EXIT_OK
    (row,) = doc["classes"]
    assert row["count"] == 2
    assert row["total_dim"] == 1


def test_class_fixture(capsys):
    code, doc = run_json(["class", "--fixture", "class-123"], capsys)
    assert code == EXIT_OK
    assert doc["class"]["111"] == 3240
    assert doc["class"]["300"] == 4320
    assert len(doc["class"]) == 10


def test_class_explicit_with_slice(capsys):
    argv = ["class", "--degrees", "1,1;1,1", "--nvec", "1,1", "--group", "0"]
    code, doc = run_json(argv, capsys)
    assert code == EXIT_OK
    assert doc["class"] == {"00": 2}
    assert doc["sliced"] == {}  # nothing has e_0 > 0


def test_fixture_subcommand_dispatch(capsys):
    code, doc = run_json(["fixture", "cubic", "witness"], capsys)
    assert code == EXIT_OK
    assert doc == {"dim": 1, "degree_map": {"1": 3}}


def test_unknown_fixture_is_input_error(capsys):
    assert run(["witness", "--fixture", "no-such-system"]) == EXIT_INPUT


def test_missing_input_is_input_error(capsys):
    assert run(["witness"]) == EXIT_INPUT


def test_bad_key_is_input_error(capsys):
    assert run(["witness", "--fixture", "cubic", "--keys", "12x"]) == EXIT_INPUT


def test_malformed_input_file_is_input_error(tmp_path, capsys):
    bad = tmp_path / "bad.sys"
    bad.write_text("group x;\nf = x + ;\n")
    assert run(["witness", "--input", str(bad)]) == EXIT_INPUT


def test_pentad_requires_extended_flag(capsys):
    assert run(["witness", "--fixture", "pentad"]) == EXIT_INPUT


def test_output_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        code = run(["witness", "--fixture", "cubic-split", "--output", str(path)])
        assert code == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "multiwit.cli", "class", "--fixture", "class-123"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["class"]["003"] == 160
