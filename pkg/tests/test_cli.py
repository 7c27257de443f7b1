import csv
import json
import re
import subprocess
import sys
from fractions import Fraction as Fr

import pytest

from sigmarot.cli import main

TENT = "line:\n  0 -> L 0\n  1 -> L 1\nbranch:\n  0 -> L 0\n  2/3 -> B 0 1\n  1 -> B 0 1/2\n"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_text(capsys):
    code, out, _ = run(capsys, "analyze", "example")
    assert code == 0
    assert "X_1 = [0, 1/2]  p_1 = +0" in out and "X_2 = [3/4, 1]  p_2 = +1" in out
    assert "Rot(F) = [+0, +1]" in out and "I_2 = empty" in out
    machine = out.split("--- machine-readable ---")[1].split()
    assert " ".join(machine) == "I0 = [0/1, 0/1] I1 = [0/1, 1/1] ROT = [0/1, 1/1] EXACT = yes"
    assert "rho +1/2 (interior): B 0 1/5" in out
    assert re.search(r"rho \+1 \(boundary\): B 0 1 ", out)


def test_analyze_json_is_stable(capsys):
    _, first, _ = run(capsys, "analyze", "example", "--json")
    _, second, _ = run(capsys, "analyze", "example", "--json")
    assert first == second
    data = json.loads(first)
    assert data["exact"] is True and data["XF"] == ["0", "1"]
    assert len(data["graph"]["edges"]) == 9


def test_analyze_map_file(tmp_path, capsys):
    p = tmp_path / "id.map"
    p.write_text("line:\n  0 -> L 0\n  1 -> L 1\nbranch:\n  0 -> L 0\n  1 -> B 0 1\n")
    code, out, _ = run(capsys, "analyze", str(p))
    assert code == 0 and "ROT = [0/1, 0/1]" in out


def test_analyze_approximate_exit_code(tmp_path, capsys):
    p = tmp_path / "tent.map"
    p.write_text(TENT)
    code, out, _ = run(capsys, "analyze", str(p))
    assert code == 2 and "EXACT = no" in out


def test_rho(capsys):
    code, out, _ = run(capsys, "rho", "example", "B 0 1/5")
    assert code == 0 and "+1/2" in out
    code, out, _ = run(capsys, "rho", "example", "L 1/3")
    assert code == 0 and "+0" in out


def test_periodic(capsys):
    code, out, _ = run(capsys, "periodic", "example", "1/2", "--chain")
    assert code == 0 and "x = B 0 1/5" in out and "F^2(x) = x +1" in out and "=F=>" in out
    code, out, _ = run(capsys, "periodic", "example", "1")
    assert code == 0 and "x = B 0 1\n" in out
    code, out, _ = run(capsys, "periodic", "example", "0")
    assert code == 0 and "x = L 0\n" in out
    code, _, err = run(capsys, "periodic", "example", "2")
    assert code == 1 and "not found" in err


def test_graph(capsys):
    code, out, _ = run(capsys, "graph", "example")
    assert code == 0 and out.startswith("digraph") and out.count("->") == 9


def test_sweep_csv(tmp_path, capsys):
    dest = tmp_path / "sweep.csv"
    code, _, err = run(capsys, "sweep", "example", "--samples", "200", "--iters", "1000",
                       "--csv", str(dest))
    assert code == 0 and "200 samples, 0 outside" in err
    rows = list(csv.DictReader(dest.open()))
    assert len(rows) == 200
    for row in rows:
        assert -Fr(1, 500) <= Fr(row["lower"]) and Fr(row["upper"]) <= 1 + Fr(1, 500)
        if row["point"].startswith("L"):
            assert Fr(row["lower"]) == Fr(row["upper"]) == 0


def test_oracle(capsys):
    code, out, _ = run(capsys, "oracle", "example")
    assert code == 0 and out.rstrip().endswith("PASS")
    code, out, _ = run(capsys, "oracle", "example", "--corrupt-graph")
    assert code == 1 and out.rstrip().endswith("FAIL")


@pytest.mark.parametrize("text, lineno", [
    ("line:\n  0 -> L 0\n  1 -> L 1\nbranch:\n  0 -> L 0\n  1 -> Q 0 1\n", 6),
    ("line:\n  0 -> L 0\n  1 -> L 2\nbranch:\n  0 -> L 0\n  1 -> B 0 1\n", None),
])
def test_bad_map_files(tmp_path, capsys, text, lineno):
    p = tmp_path / "bad.map"
    p.write_text(text)
    code, _, err = run(capsys, "analyze", str(p))
    assert code == 1 and err.startswith("error:")
    if lineno is not None:
        assert f"line {lineno}" in err


def test_usage_errors_exit_one(capsys):
    assert run(capsys, "analyze", "missing-file.map")[0] == 1
    assert run(capsys, "rho", "example", "B,0,1")[0] == 1
    with pytest.raises(SystemExit) as info:
        main(["bogus"])
    assert info.value.code == 1


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "sigmarot", "periodic", "example", "1/3"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "x = B 0 1/21" in res.stdout
