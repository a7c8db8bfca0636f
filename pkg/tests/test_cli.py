import json

import numpy as np

from gradedmassey.catalogue import KUMMER_GRID
from gradedmassey.cli import main
from gradedmassey.instances import (DecomposeRequest, ModuleFile, dump_decompose, dump_instance, dump_module)
from gradedmassey.massey import SyntheticKummerInstance, UModule


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_d_table(capsys):
    code, out, _ = run(capsys, "compute", "d-table", "--p", "3", "--n", "1")
    assert code == 0
    rows = [line for line in out.splitlines() if line.startswith("k=")]
    assert len(rows) == 3
    assert rows[0].split()[1:4] == ["1", "1", "1"]          # the norm
    assert rows[1].split()[1:4] == ["-1", "-2", "0"]        # D^(1) = -1 - 2 sigma


def test_d_table_needs_parameters(capsys):
    assert run(capsys, "compute", "d-table", "--p", "3")[0] == 2
    assert run(capsys, "compute", "d-table", "--p", "4", "--n", "1")[0] == 2


def test_massey_proper(tmp_path, capsys):
    f = tmp_path / "inst.txt"
    f.write_text(dump_instance(KUMMER_GRID[1].build()))
    code, out, _ = run(capsys, "compute", "massey", str(f))
    assert code == 0
    assert "Massey class zero modulo P^(k-1): False" in out
    assert "Massey class = -1 * Tra[D^(k) y] modulo P^(k-1): True" in out
    assert "reduced representative" in out


def test_massey_improper(tmp_path, capsys):
    U = UModule.truncated_group_ring(3, 1, 1, 3)
    inst = SyntheticKummerInstance(3, 1, 1, 2, U, np.array([1, 0, 0]), np.zeros(3, dtype=np.int64), auto_w=False)
    f = tmp_path / "bad.txt"
    f.write_text(dump_instance(inst))
    code, out, _ = run(capsys, "compute", "massey", str(f))
    assert code == 1 and "NotProper" in out


def test_massey_parse_error(tmp_path, capsys):
    f = tmp_path / "broken.txt"
    f.write_text("PARAMS\n3 1 1\n")
    code, _, err = run(capsys, "compute", "massey", str(f))
    assert code == 2 and "line 2" in err


def test_missing_file(tmp_path, capsys):
    assert run(capsys, "compute", "massey", str(tmp_path / "nope.txt"))[0] == 2
    assert run(capsys, "compute", "graded")[0] == 2


def test_graded(tmp_path, capsys):
    M = UModule.truncated_group_ring(3, 1, 1, 3)
    f = tmp_path / "mod.txt"
    f.write_text(dump_module(ModuleFile(M, [np.array([0, 0, 1])])))
    code, out, _ = run(capsys, "compute", "graded", str(f))
    assert code == 0
    assert "product of |gr^k| = 27 = |M|: True" in out
    assert "|Q^(k)|" in out


def test_graded_takes_sigma_closure_of_decomposition(tmp_path, capsys):
    M = UModule.truncated_group_ring(3, 1, 1, 3)
    f = tmp_path / "mod.txt"
    f.write_text(dump_module(ModuleFile(M, [np.array([1, 0, 0])])))
    code, out, _ = run(capsys, "compute", "graded", str(f))
    assert code == 0
    q_orders = [line.split()[-1] for line in out.splitlines()[2:-1]]
    assert q_orders == ["1", "1", "1", "1"]          # 1 generates everything


def test_decompose(tmp_path, capsys):
    f = tmp_path / "dec.txt"
    f.write_text(dump_decompose(DecomposeRequest(3, 2, 2, 1, 2)))
    code, out, _ = run(capsys, "compute", "decompose", str(f))
    assert code == 0
    assert out.count("    Y = ") == out.count("    B = ") >= 1


def test_decompose_outside_ideal(tmp_path, capsys):
    f = tmp_path / "dec.txt"
    f.write_text(dump_decompose(DecomposeRequest(3, 1, 1, 0, 1, [np.array([1, 0, 0])])))
    code, out, _ = run(capsys, "compute", "decompose", str(f))
    assert code == 1 and "NotInIdeal" in out


def test_verify_suite_with_report(tmp_path, capsys):
    rep = tmp_path / "r.json"
    code, out, _ = run(capsys, "verify", "dk", "--p", "3", "--report", str(rep))
    assert code == 0 and "dk" in out
    data = json.loads(rep.read_text())
    assert data["ok"] and data["failed"] == 0 and all(pt["p"] == 3 for pt in data["grid"])


def test_verify_quiet(capsys):
    code, out, _ = run(capsys, "verify", "trivimage", "--pn-max", "9", "--quiet")
    assert code == 0 and len(out.strip().splitlines()) == 1


def test_verify_failing_suite_exits_one(capsys):
    code, out, _ = run(capsys, "verify", "masseytrans", "--p", "3", "--n", "1")
    assert code == 1 and "as-stated" in out


def test_verify_errors(capsys):
    assert run(capsys, "verify", "nonsense")[0] == 2
    assert run(capsys, "verify", "dk", "--p", "4")[0] == 2
    assert run(capsys)[0] == 2
    assert run(capsys, "--help")[0] == 0


def test_module_entry_point():
    import subprocess
    import sys
    res = subprocess.run([sys.executable, "-m", "gradedmassey", "compute", "d-table", "--p", "2", "--n", "1"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "k=1" in res.stdout
