import csv
import io
import json

import pytest

from latstab import LatticeBox, annulus
from latstab.cli import CSV_COLUMNS, main
from latstab.fileformats import write_pts


@pytest.fixture
def files(tmp_path):
    paths = {}
    paths["L"] = tmp_path / "l.pts"
    paths["L"].write_text("d 2\n0 0\n0 1\n1 0\n")
    paths["dup"] = tmp_path / "dup.pts"
    paths["dup"].write_text("d 2\n0 0\n0 1\n1 0\n0 1\n")
    paths["singletons"] = tmp_path / "s.cover"
    paths["singletons"].write_text("d 2\n1\n2\n")
    paths["annulus"] = tmp_path / "a.pts"
    write_pts(annulus(10, 3, 2), paths["annulus"])
    paths["box3"] = tmp_path / "b.pts"
    write_pts(LatticeBox([range(1, 5)] * 3).to_pointset(), paths["box3"])
    paths["bad"] = tmp_path / "bad.pts"
    paths["bad"].write_text("d 2\n1 2\n3 x\n")
    return paths


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_uc_box(capsys, files):
    code, out, _ = run(capsys, "verify-uc", "--set", files["box3"])
    data = json.loads(out)
    assert code == 0 and data["tightness"]["epsilon"] == 0
    assert all(c["mutual_information"] == 0 for c in data["info"]["coordinates"])


def test_verify_uc_l_shape(capsys, files):
    code, out, _ = run(capsys, "verify-uc", "--set", files["L"], "--cover", files["singletons"])
    data = json.loads(out)
    assert code == 0 and data["tightness"]["epsilon"] == 0.25 and data["passed"]


def test_verify_uc_dedups_with_warning(capsys, caplog, files):
    code, out, _ = run(capsys, "verify-uc", "--set", files["dup"], "--cover", files["singletons"])
    assert code == 0 and "duplicate" in caplog.text
    assert json.loads(out)["tightness"]["size"] == 3


def test_parse_error_exit_code(capsys, files):
    code, _, err = run(capsys, "iso", "--set", files["bad"])
    assert code == 1 and ":3:3:" in err


def test_usage_error_exit_code(capsys, files):
    with pytest.raises(SystemExit) as info:
        main(["approx-box"])
    assert info.value.code == 1
    capsys.readouterr()
    code, _, _ = run(capsys, "verify-uc", "--set", files["L"], "--cover", "missing.cover")
    assert code == 1


def test_approx_box_annulus(capsys, files, tmp_path):
    out_path = tmp_path / "r.json"
    code, out, _ = run(capsys, "approx-box", "--set", files["annulus"], "--out", out_path)
    assert code == 0 and out == ""
    data = json.loads(out_path.read_text())
    assert data["epsilon"] == 0.09 and data["sym_diff_ratio"] == "9/91"
    assert data["constructed_box"]["edges"] == [list(range(1, 11))] * 2


def test_iso_cube(capsys, files):
    code, out, _ = run(capsys, "iso", "--set", files["box3"])
    assert code == 0 and json.loads(out)["sym_diff_ratio"] == "0/1"


def test_oracle_and_refusal(capsys, files):
    code, out, _ = run(capsys, "oracle", "--set", files["annulus"])
    assert code == 0 and json.loads(out)["ratio"] == "9/91"
    code, _, err = run(capsys, "oracle", "--set", files["annulus"], "--target", "cube", "--budget-max-cube-side", 4)
    assert code == 3 and "refused" in err


def test_oracle_budget_env(capsys, files, monkeypatch):
    monkeypatch.setenv("LATSTAB_BUDGET_MAX_CUBE_SIDE", "4")
    code, _, _ = run(capsys, "oracle", "--set", files["annulus"], "--target", "cube")
    assert code == 3


def test_sweep_deterministic(capsys, tmp_path):
    a, b = tmp_path / "1.csv", tmp_path / "2.csv"
    args = ["sweep", "--family", "annulus", "--d", "2..3", "--trials", "50", "--seed", "1"]
    assert run(capsys, *args, "--out", a)[0] == 0
    assert run(capsys, *args, "--out", b, "--jobs", "2")[0] == 0
    assert a.read_bytes() == b.read_bytes()
    rows = list(csv.DictReader(io.StringIO(a.read_text())))
    assert len(rows) == 100 and list(rows[0]) == CSV_COLUMNS
    assert {r["d"] for r in rows} == {"2", "3"}
    assert all(len(r["sha256"]) == 64 for r in rows)


def test_sweep_trial_independent_of_count(capsys, tmp_path):
    a, b = tmp_path / "1.csv", tmp_path / "2.csv"
    base = ["sweep", "--family", "cuboid", "--d", "2", "--seed", "5"]
    run(capsys, *base, "--trials", "3", "--out", a)
    run(capsys, *base, "--trials", "6", "--out", b)
    assert b.read_text().startswith(a.read_text())


def test_sweep_json_and_config(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"family": "perturbed_box", "d": [2, 3], "trials": 4, "seed": 9,
                               "format": "json", "oracle": True}))
    code, out, _ = run(capsys, "sweep", "--config", cfg)
    rows = json.loads(out)
    assert code == 0 and len(rows) == 8 and all(r["oracle_ratio"] for r in rows)
    code, out2, _ = run(capsys, "sweep", "--config", cfg)
    assert out2 == out


def test_sweep_bad_config(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"family": "annulus", "colour": "red"}))
    assert run(capsys, "sweep", "--config", cfg)[0] == 1
    assert run(capsys, "sweep", "--family", "annulus", "--param", "a=x")[0] == 1
    assert run(capsys, "sweep", "--family", "torus")[0] == 1


def test_gen(capsys, tmp_path):
    code, out, _ = run(capsys, "gen", "--family", "annulus", "--d", "2", "--param", "a=10", "--param", "a_inner=3")
    assert code == 0 and out.startswith("d 2\n") and len(out.strip().splitlines()) == 92
