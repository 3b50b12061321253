import csv
import json

import pytest

from b2gabor.cli import main, parse_constant, load_config, RunConfig


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_classify_frame_point(capsys):
    code, out, _ = run_cli(capsys, "classify", "1/4", "3/2")
    assert code == 0
    doc = json.loads(out)
    assert doc["label"] == "Frame"
    assert "Gamma3" in doc["provenance"]
    assert doc["witnesses"]["a"] == "1/4"  # rational input stayed exact


def test_classify_obstruction(capsys):
    code, out, _ = run_cli(capsys, "classify", "2/7", "7/4")
    assert code == 0
    assert json.loads(out)["label"] == "NotFrame"


def test_classify_decimal_routes_exact(capsys):
    code, out, _ = run_cli(capsys, "classify", "0.3", "1.5")
    assert code == 0
    assert json.loads(out)["witnesses"]["a"] == "3/10"


def test_invalid_parameter_exit_2(capsys):
    code, _, err = run_cli(capsys, "classify", "abc", "3/2")
    assert code == 2 and "error" in err
    code, _, err = run_cli(capsys, "classify", "0", "3/2")
    assert code == 2


def test_certify_json(capsys):
    code, out, _ = run_cli(capsys, "certify", "3/10", "3/2")
    assert code == 0
    doc = json.loads(out)
    assert doc["overall_nonvanishing"] is True
    assert doc["certified"] is True


def test_dual_writes_csv_and_report(capsys, tmp_path):
    out_csv = tmp_path / "h.csv"
    code, out, _ = run_cli(capsys, "dual", "1/4", "3/2",
                           "--resolution", "32", "--out", str(out_csv))
    assert code == 0
    doc = json.loads(out)
    assert doc["m"] == 3
    assert any(abs(float(d["location"]) + 0.125) < 1e-15
               for d in doc["discontinuities"])
    rows = list(csv.reader(out_csv.open()))
    assert rows[0] == ["x", "h", "piece_index", "is_discontinuity_adjacent"]
    assert len(rows) == 34


def test_dual_byte_identical_across_runs(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run_cli(capsys, "dual", "3/10", "3/2", "--resolution", "64", "--out", str(a))
    run_cli(capsys, "dual", "3/10", "3/2", "--resolution", "64", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_zz_summary_and_csv(capsys, tmp_path):
    out_csv = tmp_path / "zz.csv"
    code, out, _ = run_cli(capsys, "zz", "1/2", "3/2",
                           "--grid", "24", "24", "--out", str(out_csv))
    assert code == 0
    doc = json.loads(out)
    assert doc["p"] == 3 and doc["q"] == 4
    assert float(doc["A_est"]) > 1e-3
    rows = list(csv.reader(out_csv.open()))
    assert rows[0] == ["x", "nu", "smin", "smax"]
    assert len(rows) == 1 + 24 * 24


def test_zz_irrational_rejected(capsys):
    code, _, err = run_cli(capsys, "--mode", "float", "zz", "0.3", "1.5",
                           "--grid", "8", "8")
    assert code == 2


def test_sweep_row_count_and_determinism(capsys, tmp_path):
    f1, f2 = tmp_path / "s1.csv", tmp_path / "s2.csv"
    args = ("sweep", "--a-range", "1/10", "9/10", "6",
            "--b-range", "1", "2", "5", "--out")
    code, out, _ = run_cli(capsys, *args, str(f1))
    assert code == 0
    assert json.loads(out)["rows"] == 30
    rows = list(csv.reader(f1.open()))
    assert len(rows) == 31
    run_cli(capsys, *args, str(f2))
    assert f1.read_bytes() == f2.read_bytes()


def test_verify_frame_point(capsys):
    code, out, _ = run_cli(capsys, "verify", "1/4", "3/2")
    assert code == 0
    assert json.loads(out)["ok"] is True


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("residual_grid = 8\nzz_nx = 16  # comment\nzz_nv = 16\n")
    loaded = load_config(str(cfg))
    assert loaded.residual_grid == 8 and loaded.zz_nx == 16
    code, out, _ = run_cli(capsys, "--config", str(cfg), "verify", "1/4", "3/2")
    assert code == 0


def test_config_unknown_key_exit_2(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("nonsense = 1\n")
    code, _, err = run_cli(capsys, "--config", str(cfg), "classify", "1/4", "3/2")
    assert code == 2 and "unknown key" in err


def test_parse_constant():
    from fractions import Fraction
    assert parse_constant("1/4") == Fraction(1, 4)
    assert parse_constant("0.3") == Fraction(3, 10)
    assert parse_constant("0.3", mode="float") == 0.3
    with pytest.raises(ValueError):
        parse_constant("-1")
    with pytest.raises(ValueError):
        parse_constant("x")


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(resolution=1).validate()
    with pytest.raises(ValueError):
        RunConfig(residual_tol=0.0).validate()
