import json
import subprocess
import sys

import pytest

from graphk0.cli import main


def run(args, capsys):
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


def test_build_z2(tmp_path, capsys):
    path = tmp_path / "g.json"
    code, out, _ = run(["build", "Z/2", "-o", str(path)], capsys)
    assert code == 0
    assert "13 core vertices" in out
    doc = json.loads(path.read_text())
    assert len(doc["vertices"]) == 13 and doc["group_spec"] == "Z/2"


def test_build_trivial(tmp_path, capsys):
    code, out, _ = run(["build", "0", "-o", str(tmp_path / "g.json")], capsys)
    assert code == 0 and "5 core vertices" in out


def test_build_infinite_needs_window(capsys):
    code, _, err = run(["build", "Z"], capsys)
    assert code == 2 and "window" in err


def test_build_bad_spec(capsys):
    code, _, err = run(["build", "Z/1"], capsys)
    assert code == 2 and "position" in err


def test_build_unwritable(capsys, tmp_path):
    code, _, _ = run(["build", "Z/2", "-o", str(tmp_path / "missing" / "g.json")], capsys)
    assert code == 3


def _graph(tmp_path, spec, capsys):
    path = tmp_path / "g.json"
    run(["build", spec, "-o", str(path)], capsys)
    return str(path)


def test_k0_z6(tmp_path, capsys):
    code, out, _ = run(["k0", _graph(tmp_path, "Z/6", capsys), "--no-classes"], capsys)
    assert code == 0 and out == "Z/6\n"


def test_k0_truncated(tmp_path, capsys):
    code, out, _ = run(["k0", _graph(tmp_path, "Z/2", capsys), "--truncate", "2"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "Z^3 x Z/2"
    assert lines[1] == "tag,coordinates"
    assert len(lines) == 2 + 13 + 3 * 2


def test_k0_empty_graph(tmp_path, capsys):
    path = tmp_path / "e.json"
    path.write_text(json.dumps({"vertices": [], "edges": [], "loops": {}, "tails": []}))
    code, out, _ = run(["k0", str(path)], capsys)
    assert code == 0 and out.splitlines()[0] == "Z^0"


def test_k0_finite_mode_with_tails_is_domain_error(tmp_path, capsys):
    code, _, err = run(["k0", _graph(tmp_path, "Z/2", capsys), "--mode", "finite"], capsys)
    assert code == 2 and "tail" in err


def test_k0_missing_and_malformed(tmp_path, capsys):
    assert run(["k0", str(tmp_path / "nope.json")], capsys)[0] == 3
    bad = tmp_path / "bad.json"
    bad.write_text('{"vertices": [], "edges": [[0, 1]], "loops": {}, "tails": []}')
    code, _, err = run(["k0", str(bad)], capsys)
    assert code == 2 and "$.edges[0][0]" in err
    bad.write_text("{not json")
    assert run(["k0", str(bad)], capsys)[0] == 2


def test_verify_all_auts(capsys):
    code, out, _ = run(["verify", "Z/2 x Z/2", "--all-auts"], capsys)
    assert code == 0
    assert "lifts: 6/6 pass" in out
    assert "[PASS] induced maps pairwise distinct" in out
    assert out.rstrip().endswith("RESULT: PASS")


def test_verify_single_aut(capsys):
    code, out, _ = run(["verify", "Z/5", "--aut", "2"], capsys)
    assert code == 0 and "lifts: 1/1 pass" in out


def test_verify_non_invertible(capsys):
    code, _, err = run(["verify", "Z/4", "--aut", "2"], capsys)
    assert code == 2 and "not invertible" in err


def test_verify_ill_defined_and_bad_shape(capsys):
    assert run(["verify", "Z/2 x Z/4", "--aut", "1 0; 1 1"], capsys)[0] == 2
    assert run(["verify", "Z/2 x Z/4", "--aut", "1 1; 0 1"], capsys)[0] == 0
    assert run(["verify", "Z/2 x Z/2", "--aut", "1"], capsys)[0] == 2


def test_verify_is_deterministic(capsys):
    first = run(["verify", "Z/2 x Z/4", "--all-auts"], capsys)
    second = run(["verify", "Z/2 x Z/4", "--all-auts"], capsys)
    assert first == second


def test_snf(tmp_path, capsys):
    path = tmp_path / "m.txt"
    path.write_text("2 2\n2 4\n6 8\n")
    code, out, _ = run(["snf", str(path)], capsys)
    assert code == 0
    assert out.splitlines()[0] == "diag(2,4)"
    assert "U" in out and "V" in out


def test_snf_identity(tmp_path, capsys):
    path = tmp_path / "m.txt"
    path.write_text("2 2\n1 0\n0 1\n")
    code, out, _ = run(["snf", str(path)], capsys)
    assert code == 0 and out.splitlines()[0] == "diag(1,1)"
    assert "S\n2 2\n1 0\n0 1" in out


def test_snf_bad_file(tmp_path, capsys):
    path = tmp_path / "m.txt"
    path.write_text("2 2\n1 0\n")
    assert run(["snf", str(path)], capsys)[0] == 2


def test_export_dot(tmp_path, capsys):
    g = _graph(tmp_path, "0", capsys)
    code, out, _ = run(["export-dot", g], capsys)
    assert code == 0
    assert out.startswith("digraph G {")
    assert out.count("[label=") == 5


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "graphk0", "verify", "Z/3"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "RESULT: PASS" in res.stdout
