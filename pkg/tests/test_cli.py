import json

import pytest

from qadmit.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_avg_of_zero_and_one(capsys):
    code, out, _ = run(capsys, "avg", "=0", "=1", "--n-max", "8", "--format", "json")
    assert code == 0
    rep = json.loads(out)
    assert rep["value"] == "1/2^1" and rep["digits"] == 8


def test_avg_of_literal_names(capsys):
    code, out, _ = run(capsys, "avg", "--", "----", "++++")
    assert code == 0 and "1/2^1" in out


def test_avg_name_from_file(capsys, tmp_path):
    f = tmp_path / "x.txt"
    f.write_text("+0-+\n")
    code, out, _ = run(capsys, "avg", str(f), "=1/2", "--format", "json")
    assert code == 0 and json.loads(out)["x"] == "+0-+"


def test_convert_binary_to_signed(capsys):
    code, out, _ = run(capsys, "convert", "--from", "binary", "--to", "signed", "0101010101", "--format", "json")
    rep = json.loads(out)
    assert code == 0
    assert rep["interval"] == ["341/2^10", "343/2^10"]


def test_entropy_bundled_grid(capsys):
    code, out, _ = run(capsys, "entropy", "--format", "json")
    assert code == 0
    rep = json.loads(out)
    assert rep["points"] == 257
    assert rep["sandwich_violations"] == []
    assert [r["eta_hi"] for r in rep["rows"]] == [n - 1 for n in range(1, 9)]


def test_donghyun_checks_pass(capsys):
    code, out, _ = run(capsys, "donghyun")
    assert code == 0
    assert out.count("PASS") == 5 and "FAIL" not in out
    assert "4882" in out


def test_bounds_shift(capsys):
    code, out, _ = run(capsys, "bounds", "--n-max", "4")
    assert code == 0 and "C' = 1" in out


def test_schedule_table(capsys):
    code, out, _ = run(capsys, "schedule", "--n-max", "4", "--components", "3", "--format", "json")
    assert code == 0
    assert json.loads(out)["kappa"] == [0, 2, 6, 12, 18]


def test_standard_roundtrip(capsys):
    code, out, _ = run(capsys, "standard", "--k", "5", "--n-max", "4", "--points", "3")
    assert code == 0 and out.count("roundtrip ok") == 3


def test_apply(capsys, tmp_path):
    nets = tmp_path / "nets.json"
    code, out, _ = run(capsys, "apply", "--n-max", "3", "--pairs", "2", "--nets-out", str(nets))
    assert code == 0 and out.count(" ok") == 2
    assert "levels" in json.loads(nets.read_text())


def test_audit_dyadic_is_not_linear(capsys):
    code, out, _ = run(capsys, "audit", "--rep", "dyadic", "--n-max", "3", "--samples", "3")
    assert code == 3 and "not corroborated" in out


def test_missing_file_exit_code(capsys, tmp_path):
    code, _, err = run(capsys, "entropy", str(tmp_path / "nope.json"))
    assert code == 4


def test_bad_input_exit_code(capsys):
    code, _, err = run(capsys, "avg", "=2", "=1")
    assert code == 2
    assert json.loads(err)["error"] == "ValueError"


def test_resolution_exceeded(capsys):
    code, _, err = run(capsys, "entropy", "--n-max", "12")
    assert code == 2


def test_ceiling(capsys):
    code, _, _ = run(capsys, "donghyun", "--n-max", "100000")
    assert code == 2


def test_output_file_and_determinism(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for f in (a, b):
        assert run(capsys, "standard", "--k", "5", "--n-max", "4", "--format", "json", "-o", str(f))[0] == 0
    assert a.read_text() == b.read_text()
