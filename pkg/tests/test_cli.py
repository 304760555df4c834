import csv
import io
import json
import subprocess
import sys

import pytest

from quadlandau.cli import COLUMNS, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_spectrum_landau_default_sweep(capsys):
    code, out, _ = run(capsys, "spectrum")
    assert code == 0
    rows = rows_of(out)
    assert list(rows[0]) == COLUMNS["spectrum"]
    assert len(rows) == 20
    ground = next(r for r in rows if r["n"] == "0" and r["l"] == "0")
    assert float(ground["energy"]) == 1.0


def test_spectrum_coulomb_frequencies(capsys):
    code, out, _ = run(capsys, "spectrum", "--scenario", "coulomb", "--alpha", "1", "--l-min", "0", "--l-max", "2")
    assert code == 0
    freqs = [float(r["frequency"]) for r in rows_of(out)]
    assert freqs == pytest.approx([2.0, 2 / 3, 2 / 5], rel=1e-10)


def test_spectrum_hardwall_lists_exact_and_approx(capsys):
    code, out, _ = run(capsys, "spectrum", "--scenario", "hardwall", "--rho0", "1", "--l-min", "0", "--l-max", "0")
    assert code == 0
    rows = rows_of(out)
    assert {r["method"] for r in rows} == {"exact_root", "approximation"}
    assert float(rows[0]["energy"]) == pytest.approx(3.0, rel=1e-12)


@pytest.mark.parametrize(
    "argv",
    [
        ("spectrum", "--l-min", "2", "--l-max", "1"),
        ("spectrum", "--M", "-1"),
        ("spectrum", "--scenario", "nonsense"),
        ("scan", "--scenario", "landau"),
        ("spectrum", "--scenario", "hardwall"),
        ("verify", "--points", "4"),
        ("spectrum", "--bogus-flag"),
    ],
)
def test_config_errors_exit_2_with_json_record(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        main(list(argv))
    assert exc.value.code == 2
    record = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert record["error"] == "config"
    assert record["message"]


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[core]\nscenario = landau\nm = 1\nM = 2\nb = 0.5\n[spectra]\nn_min = 1\nn_max = 1\nl_min = 0\nl_max = 0\n")
    code, out, _ = run(capsys, "spectrum", "--config", str(cfg))
    assert code == 0
    (row,) = rows_of(out)
    assert float(row["energy"]) == 3.0
    code, out, _ = run(capsys, "spectrum", "--config", str(cfg), "--b", "1")
    assert float(rows_of(out)[0]["energy"]) == 6.0


def test_config_file_rejects_unknown_keys(tmp_path, capsys):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[core]\nmass = 1\n")
    with pytest.raises(SystemExit) as exc:
        main(["spectrum", "--config", str(cfg)])
    assert exc.value.code == 2


def test_verify_landau_default_sweep(capsys):
    code, out, _ = run(capsys, "verify", "--points", "2000")
    rows = rows_of(out)
    assert code == 0
    assert list(rows[0]) == COLUMNS["verify"]
    assert all(r["passed"] == "true" for r in rows)
    assert max(float(r["rel_diff"]) for r in rows) < 1e-3


def test_verify_coulomb_at_allowed_frequency(capsys):
    code, out, _ = run(capsys, "verify", "--scenario", "coulomb", "--alpha", "1", "--l-min", "0", "--l-max", "1")
    assert code == 0
    for r in rows_of(out):
        assert float(r["overlap_with_numeric"]) >= 0.999
        assert abs(float(r["truncation_residual"])) < 1e-10


def test_verify_wrong_frequency_fails(capsys):
    code, out, _ = run(
        capsys, "verify", "--scenario", "coulomb", "--alpha", "1", "--l-min", "0", "--l-max", "0", "--varpi", "1.5"
    )
    assert code == 1
    (row,) = rows_of(out)
    assert row["passed"] == "false"
    assert float(row["rel_diff"]) > 1e-3
    assert abs(float(row["truncation_residual"])) > 1e-8


def test_verify_hardwall_reports_approx_trend(capsys):
    code, out, _ = run(
        capsys, "verify", "--scenario", "hardwall", "--rho0", "1", "--n-min", "5", "--n-max", "8",
        "--l-min", "0", "--l-max", "0",
    )
    assert code == 0
    rows = rows_of(out)
    assert [r["approx_trend_ok"] for r in rows] == ["true"] * 4


def test_fields_check_rows(capsys):
    code, out, _ = run(capsys, "fields-check")
    rows = rows_of(out)
    assert list(rows[0]) == COLUMNS["fields-check"]
    assert code == 0
    dot = [r for r in rows if r["quantity"] == "moment_dot"]
    assert all(float(r["max_residual"]) < 1e-8 for r in dot)
    bz = [float(r["max_residual"]) for r in rows if r["quantity"] == "effective_bz_mean"]
    assert bz == pytest.approx([-2.0, -2.0], abs=1e-8)


def test_fields_check_zero_gradient(capsys):
    code, out, _ = run(capsys, "fields-check", "--b", "0")
    assert code == 0
    for r in rows_of(out):
        if r["quantity"] != "effective_bz_mean":
            assert float(r["max_residual"]) == 0.0


def test_scan_coulomb(capsys):
    code, out, _ = run(capsys, "scan", "--scenario", "coulomb", "--alpha", "1", "--l-min", "0", "--l-max", "3")
    assert code == 0
    rows = rows_of(out)
    assert list(rows[0]) == COLUMNS["scan"]
    assert len(rows) == 4
    assert all(float(r["closed_form_rel_dev"]) < 1e-10 for r in rows)


def test_scan_linear_and_higher_n(capsys):
    _, out, _ = run(capsys, "scan", "--scenario", "linear", "--eta", "1", "--l-min", "0", "--l-max", "0")
    assert float(rows_of(out)[0]["frequency"]) == pytest.approx(1.5 ** (1 / 3), rel=1e-10)
    _, out, _ = run(
        capsys, "scan", "--scenario", "coulomb", "--alpha", "1", "--n-min", "2", "--n-max", "2",
        "--l-min", "0", "--l-max", "0",
    )
    rows = rows_of(out)
    assert len(rows) >= 1
    assert all(abs(float(r["residual"])) < 1e-10 for r in rows)
    assert rows[0]["closed_form"] == ""


def test_json_output_structure(capsys):
    code, out, _ = run(capsys, "spectrum", "--format", "json", "--n-max", "0", "--l-min", "0", "--l-max", "0")
    assert code == 0
    doc = json.loads(out)
    assert doc["meta"]["command"] == "spectrum"
    assert doc["meta"]["config"]["scenario"] == "landau"
    (row,) = doc["rows"]
    assert set(row) == set(COLUMNS["spectrum"])
    assert row["energy"] == 1.0


def test_out_file(tmp_path, capsys):
    target = tmp_path / "levels.csv"
    code, out, _ = run(capsys, "spectrum", "--out", str(target))
    assert code == 0 and out == ""
    assert len(rows_of(target.read_text())) == 20


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "quadlandau", "spectrum", "--n-max", "0", "--l-min", "0", "--l-max", "0"],
        capture_output=True, text=True, check=True,
    )
    assert rows_of(proc.stdout)[0]["energy"] == "1"
