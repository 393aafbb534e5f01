import json

import numpy as np
import pytest

from hll import cli
from hll.cases import CaseReport
from hll.hyperdet import Hypermatrix
from hll.positivity import sample_general


def test_verify_writes_outputs(tmp_path, capsys):
    code = cli.main(["verify", "--case", "n4k2_diag", "--trials", "2", "--seed", "7", "--t-steps", "3", "--output-dir", str(tmp_path)])
    assert code == 0
    summary = json.loads((tmp_path / "n4k2_diag_n4_seed7.json").read_text())
    assert summary["seed"] == 7 and summary["config"]["seed"] == 7
    assert summary["failures"] == 0
    lines = (tmp_path / "n4k2_diag_n4_seed7.csv").read_text().splitlines()
    assert lines[0].startswith("# config:") and '"seed": 7' in lines[0]
    assert lines[1] == "case,n,k,p,q,seed,t,r,min_sv_ratio,verdict"
    assert "n4k2_diag" in capsys.readouterr().out


def test_verify_is_reproducible(tmp_path):
    args = ["verify", "--case", "n2k2", "--trials", "3", "--seed", "1", "--format", "json"]
    cli.main(args + ["--output-dir", str(tmp_path / "a")])
    cli.main(args + ["--output-dir", str(tmp_path / "b")])
    a = json.loads((tmp_path / "a" / "n2k2_n2_seed1.json").read_text())
    b = json.loads((tmp_path / "b" / "n2k2_n2_seed1.json").read_text())
    a.pop("timing"), b.pop("timing")
    assert a == b


def test_env_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("HLL_OUTPUT_DIR", str(tmp_path))
    assert cli.main(["verify", "--case", "classical_hlt", "--n", "3", "--format", "csv"]) == 0
    assert (tmp_path / "classical_hlt_n3_seed0.csv").exists()


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--case", "nope"],
        ["verify", "--trials", "0"],
        ["verify", "--threshold", "2"],
        ["verify", "--case", "n6_explore"],
        ["explore", "--case", "n2k2"],
        ["lefschetz", "--n", "3", "--k", "1", "--p", "1", "--q", "0"],
        ["lefschetz", "--p", "1", "--q", "0"],
        ["frobnicate"],
    ],
)
def test_usage_errors(argv, tmp_path, capsys):
    assert cli.main(argv + (["--output-dir", str(tmp_path)] if argv[0] in ("verify", "explore") else [])) == 2


def test_unwritable_output_dir(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert cli.main(["verify", "--case", "n2k2", "--trials", "1", "--output-dir", str(blocker / "sub")]) == 2


def test_explore_writes_witnesses(tmp_path, capsys):
    assert cli.main(["explore", "--trials", "12", "--seed", "1", "--output-dir", str(tmp_path)]) == 0
    wdir = tmp_path / "n6_explore_seed1_witnesses"
    files = sorted(wdir.glob("worst_*.json"))
    assert len(files) == 10
    change = json.loads((wdir / "sign_change.json").read_text())
    assert change["exact_opposite_signs"] and change["confirmed"]
    w = json.loads(files[0].read_text())
    assert w["rank"] == 0 and w["config"]["seed"] == 1 and len(w["b"]) == 6
    assert "min margin" in capsys.readouterr().out


def test_hdet_command(tmp_path, capsys):
    rng = np.random.default_rng(0)
    b = rng.standard_normal((3, 3, 3))
    layers = b @ b.transpose(0, 2, 1)
    path = tmp_path / "h.json"
    path.write_text(json.dumps(Hypermatrix(layers).to_json()))
    assert cli.main(["hdet", "--input", str(path)]) == 0
    out = json.loads(capsys.readouterr().out)
    lo, hi = out["bounds"]
    assert lo <= out["hdet"][0] <= hi


def test_hdet_bad_input(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert cli.main(["hdet", "--input", str(path)]) == 2


def test_lefschetz_command(capsys):
    assert cli.main(["lefschetz", "--n", "4", "--k", "2", "--p", "1", "--q", "1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["is_isomorphism"] and out["dim"] == 16


def test_normalize_command(tmp_path, capsys):
    path = tmp_path / "m.json"
    path.write_text(json.dumps(sample_general(2, 3, 0).to_json()))
    assert cli.main(["normalize", "--input", str(path)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["matrix"]["k"] == 2 and len(out["P"]) == 3


def test_report_table():
    empty = cli.report([])
    assert empty.splitlines()[0].split()[:5] == ["case", "n", "trials", "failures", "worst_margin"]
    assert len(empty.splitlines()) == 2
    ok = CaseReport("n2k2", 3, worst_margin=1.0, worst_seed=1, n=2)
    bad = CaseReport("n3k2", 3, failures=1, worst_margin=0.1, worst_seed=2, n=3)
    lines = cli.report([ok, bad]).splitlines()
    assert lines[2].endswith("ok") and lines[3].endswith("FAIL")


def test_failure_exit_code(monkeypatch, tmp_path, capsys):
    def broken(*a, **k):
        rep = CaseReport("n2k2", 1, n=2)
        rep.record_trial(5, 0.0, ["synthetic failure"])
        return rep

    monkeypatch.setattr(cli.cases, "run_case", broken)
    assert cli.main(["verify", "--case", "n2k2", "--output-dir", str(tmp_path)]) == 1
    assert "synthetic failure" in capsys.readouterr().err
