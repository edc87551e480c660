import json
import subprocess
import sys

import pytest

from gapnum.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("w,n,m", [(3, 9, 3), (4, 8, 0), (1, 5, 5)])
def test_compute(capsys, w, n, m):
    code, out, _ = run(capsys, "compute", "--width", str(w), "--length", str(n))
    assert code == 0
    assert out.splitlines()[0] == f"M({w}, {n}) = {m}"
    assert f"{w} {n} {m}" in out


def test_compute_json_and_files(capsys, tmp_path):
    code, out, _ = run(capsys, "compute", "--width", "5", "--length", "5", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["gap_number"] == 5 and doc["witness"]["monomino_count"] == 5
    svg = tmp_path / "t.svg"
    code, out, _ = run(capsys, "compute", "--width", "3", "--length", "9", "--format", "svg",
                       "--output", str(svg))
    assert code == 0 and svg.read_text().startswith("<svg")


def test_digraph(capsys, tmp_path):
    code, out, _ = run(capsys, "digraph", "--width", "9", "--stats")
    assert code == 0 and "15,496" in out
    code, out, _ = run(capsys, "digraph", "--width", "5", "--stats", "--json")
    assert json.loads(out)["node_count"] == 182
    path = tmp_path / "f3.json"
    code, _, _ = run(capsys, "digraph", "--width", "3", "--export", str(path))
    doc = json.loads(path.read_text())
    assert code == 0 and doc["width"] == 3 and len(doc["nodes"]) == 16


def test_bound(capsys):
    _, out, _ = run(capsys, "bound", "--width", "7")
    assert "m = 12" in out and "per 7 columns" in out
    _, out, _ = run(capsys, "bound", "--width", "9", "--json")
    doc = json.loads(out)
    assert doc["minimal_m"] == 38 and doc["columns_per_monomino"] == "17"
    _, out, _ = run(capsys, "bound", "--width", "13")
    assert "UNBOUNDED" in out


def test_run_and_cylinder(capsys):
    _, out, _ = run(capsys, "run", "--width", "7", "--json")
    assert json.loads(out)["max_gapless_columns"] == 8
    code, out, _ = run(capsys, "cylinder", "--width", "9", "--period", "17", "--monominoes", "1", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["found"] and doc["monominoes"] == 1
    _, out, _ = run(capsys, "cylinder", "--width", "9", "--period", "17")
    assert out.startswith("no 9 x 17 cylinder")


def test_oracle(capsys):
    code, out, _ = run(capsys, "oracle", "--width", "5", "--length", "5")
    assert code == 0 and "= 5" in out
    code, _, err = run(capsys, "oracle", "--width", "9", "--length", "9")
    assert code == 2 and "exceeds" in err
    code, _, err = run(capsys, "oracle", "--width", "7", "--length", "7", "--node-budget", "5")
    assert code == 3 and "capacity" in err


def test_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["compute", "--width", "x", "--length", "3"])
    assert exc.value.code == 2
    code, _, err = run(capsys, "compute", "--width", "30", "--length", "30")
    assert code != 0 and err
    code, _, err = run(capsys, "compute", "--width", "3", "--length", "20000")
    assert code == 3


def test_verify_fast_is_green_and_deterministic(capsys):
    code, first, _ = run(capsys, "verify-paper", "--level", "fast")
    _, second, _ = run(capsys, "verify-paper", "--level", "fast")
    assert code == 0
    assert first == second
    assert "FAIL" not in first
    assert "F_7 has 1757 nodes" in first


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "gapnum", "compute", "--width", "2", "--length", "2"],
                       capture_output=True, text=True, check=True)
    assert p.stdout.startswith("M(2, 2) = 4")
