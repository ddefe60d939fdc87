import json
import subprocess
import sys

import pytest

from detnorm.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_twisted_cubic_betti_table(capsys):
    code, out, _ = run(capsys, "build", "--fixture", "twisted-cubic")
    assert code == 0
    golden = "D_0:\n       0 1 2\ntotal: 1 3 2\n    0: 1 . .\n    1: . 3 2\n"
    assert golden in out
    assert out.splitlines()[0] == "2x3 matrix, c = 2, n = 3, degree 3"


def test_scroll_degree(capsys):
    code, rec = run_json(capsys, "build", "--fixture", "scroll-S(2,1)")
    assert code == 0 and rec["hilbert"]["degree"] == 3
    assert rec["expectations"]["degree"]["ok"]


def test_grid_input_matches_the_fixture(capsys):
    _, a = run_json(capsys, "build", "--grid", "1 1 1 / 1 1 1", "-n", "3")
    _, b = run_json(capsys, "build", "--grid", "1 1 1; 1 1 1", "-n", "3")
    assert a["betti"] == b["betti"]
    assert a["betti"]["D_0"] == [[0, 0, 1], [1, 2, 3], [2, 3, 2]]


@pytest.mark.parametrize("grid,words", [("1 1 x / 1 1 1", ["row 0"]),
                                        ("1 1 1 / 1 1", ["row 1"]),
                                        ("1 1 1 / 1 1 -1", ["row 1", "column 2"])])
def test_malformed_grids_exit_2(capsys, grid, words):
    code, out, err = run(capsys, "build", "--grid", grid, "-n", "3")
    assert code == 2 and out == ""
    assert all(w in err for w in words), err


def test_verify_on_the_cubic(capsys):
    code, out, _ = run(capsys, "verify", "--fixture", "twisted-cubic")
    assert code == 0
    assert "diagram identities: pass" in out and "Ulrich certificate: pass" in out


def test_nonsimple_fixture_is_reported_not_failed(capsys):
    code, rec = run_json(capsys, "verify", "--fixture", "x2-squared-surface", "--checks", "simplicity")
    assert code == 0
    v = rec["checks"]["simplicity"]
    assert v["endo_dim"] == 3 and not v["gate"] and not v["simple"]


def test_gate_failure_is_not_applicable(capsys):
    code, out, _ = run(capsys, "verify", "--linear", "2,2,4", "--checks", "vanishing")
    assert code == 0
    assert out.count("claims not applicable") == 2


def test_unknown_check_and_bad_prime_exit_2(capsys):
    assert run(capsys, "verify", "--fixture", "twisted-cubic", "--checks", "nope")[0] == 2
    code, _, err = run(capsys, "build", "--fixture", "twisted-cubic", "--prime", "32002")
    assert code == 2 and "odd prime" in err


def test_scan_rerun_adds_nothing(capsys, tmp_path):
    log = str(tmp_path / "scan.jsonl")
    code, first = run_json(capsys, "scan", "--t", "2", "--c", "2", "--a", "0,1", "--out", log)
    assert code == 0 and first["new_records"] == 2
    code, again = run_json(capsys, "scan", "--t", "2", "--c", "2", "--a", "0,1", "--out", log)
    assert again["new_records"] == 0 and again["total_records"] == 2
    assert again["verdicts"] == {"consistent": 2}


def test_config_file_and_overrides(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nprime = 101\nseed = 4\n")
    _, rec = run_json(capsys, "build", "--linear", "2,2,3", "--config", str(cfg))
    assert rec["params"]["prime"] == 101 and rec["params"]["seed"] == 4
    _, rec = run_json(capsys, "build", "--linear", "2,2,3", "--config", str(cfg), "--seed", "0")
    assert rec["params"]["prime"] == 101 and rec["params"]["seed"] == 0
    cfg.write_text("prime = 100\n")
    assert run(capsys, "build", "--linear", "2,2,3", "--config", str(cfg))[0] == 2


def test_chern(capsys):
    code, rec = run_json(capsys, "chern", "--t", "2,5")
    assert code == 0
    assert [r["t"] for r in rec["reports"]] == [2, 5]
    assert all(r["all_excluded"] for r in rec["reports"])


def test_restrict(capsys):
    code, rec = run_json(capsys, "restrict", "--linear", "2,2,4")
    assert code == 0 and rec["betti_agree"]


def test_json_is_deterministic(capsys):
    outs = []
    for _ in range(2):
        _, rec = run_json(capsys, "verify", "--linear", "2,2,3", "--checks", "diagram,ulrich")
        rec.pop("timing")
        outs.append(json.dumps(rec, sort_keys=True))
    assert outs[0] == outs[1]


def test_out_file(capsys, tmp_path):
    path = tmp_path / "b.json"
    assert run(capsys, "build", "--fixture", "twisted-cubic", "--out", str(path))[0] == 0
    assert json.loads(path.read_text())["command"] == "build"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "detnorm", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("detnorm ")
