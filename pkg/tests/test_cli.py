import json

import numpy as np
import pytest

from conftest import tan_oracle
from delay_sl_spectra.cli import main
from delay_sl_spectra.config import load_config
from delay_sl_spectra.report import SAMPLES_PER_PIECE, read_csv, run_compare

C0_TEXT = """p1 = 1
p2 = 1
gamma1 = 1
gamma2 = 1
delta1 = 1
delta2 = 1
d = 1
n_min = {n_min}
n_max = {n_max}
"""


@pytest.fixture
def c0_file(tmp_path):
    path = tmp_path / "c0.cfg"
    path.write_text(C0_TEXT.format(n_min=5, n_max=8))
    return path


def test_solve_writes_spectrum(c0_file, tmp_path):
    out = tmp_path / "out"
    assert main(["solve", "--config", str(c0_file), "--out", str(out)]) == 0
    rows = read_csv(out / "spectrum.csv")
    assert [int(r["n"]) for r in rows] == [5, 6, 7, 8]
    np.testing.assert_allclose([r["s_n"] for r in rows],
                               [tan_oracle(n) for n in range(5, 9)], atol=1e-6)
    header = (out / "spectrum.csv").read_text().splitlines()[0]
    assert header == "n,s_n,lambda_n,bracket_lo,bracket_hi,simplicity_margin,iters"
    eig = read_csv(out / "eigfn_5.csv")
    assert len(eig) == 2 * SAMPLES_PER_PIECE
    assert eig[0]["x"] == 0.0 and eig[0]["y"] == 1.0
    assert eig[0]["yp"] == -rows[0]["s_n"]


def test_solve_is_deterministic(c0_file, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    main(["solve", "--config", str(c0_file), "--out", str(a)])
    main(["solve", "--config", str(c0_file), "--out", str(b)])
    for name in ("spectrum.csv", "eigfn_5.csv", "eigfn_8.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_missing_key_exit_1(tmp_path, capsys):
    path = tmp_path / "bad.cfg"
    path.write_text(C0_TEXT.format(n_min=5, n_max=8).replace("p1 = 1\n", ""))
    assert main(["solve", "--config", str(path), "--out", str(tmp_path)]) == 1
    assert "'p1'" in capsys.readouterr().err


def test_coupling_violation_exit_1_before_checks(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text(C0_TEXT.format(n_min=5, n_max=8).replace("p2 = 1", "p2 = 2"))
    out = tmp_path / "out"
    assert main(["verify", "--config", str(path), "--out", str(out)]) == 1
    assert not (out / "verify.json").exists()


def test_missing_file_exit_1(tmp_path):
    assert main(["solve", "--config", str(tmp_path / "nope.cfg")]) == 1


def test_numeric_failure_exit_2(tmp_path):
    path = tmp_path / "low.cfg"
    path.write_text(C0_TEXT.format(n_min=1, n_max=3))
    out = tmp_path / "out"
    assert main(["solve", "--config", str(path), "--out", str(out)]) == 2
    # the indices that did resolve are still written
    assert [int(r["n"]) for r in read_csv(out / "spectrum.csv")] == [2, 3]


def test_delay_out_of_range_exit_2(tmp_path):
    path = tmp_path / "far.cfg"
    path.write_text(C0_TEXT.format(n_min=5, n_max=5) + "delay = 0.5\nq = 1\n")
    assert main(["solve", "--config", str(path), "--out", str(tmp_path)]) == 2


def test_compare_outputs(tmp_path):
    path = tmp_path / "c0.cfg"
    path.write_text(C0_TEXT.format(n_min=5, n_max=40))
    out = tmp_path / "cmp"
    assert main(["compare", "--config", str(path), "--out", str(out)]) == 0
    rows = read_csv(out / "compare.csv")
    payload = json.loads((out / "compare.json").read_text())
    assert len(rows) == len(payload["rows"]) == 36
    for row, obj in zip(rows, payload["rows"]):
        for key, value in obj.items():
            assert row[key] == pytest.approx(value, rel=1e-15)
        n = row["n"]
        assert row["s_refined"] - row["s_leading"] == pytest.approx(
            -4 / ((4 * n - 3) * np.pi), abs=1e-12)
    assert -1.15 <= payload["slope_err_leading"] <= -0.85
    assert payload["sign"] == "corrected"


def test_compare_paper_sign_rows(tmp_path):
    path = tmp_path / "c0.cfg"
    path.write_text(C0_TEXT.format(n_min=5, n_max=40))
    out = tmp_path / "cmp"
    assert main(["compare", "--config", str(path), "--out", str(out), "--sign", "paper"]) == 0
    rows = read_csv(out / "compare.csv")
    assert all(r["err_refined"] > r["err_leading"] for r in rows)


def test_compare_api_round_trip(tmp_path):
    res = run_compare(load_config("C2"), tmp_path)
    rows = read_csv(tmp_path / "compare.csv")
    for a, b in zip(res.rows, rows):
        assert a.s_numeric == b["s_numeric"]
        assert a.err_refined == b["err_refined"]


def test_verify_c0_passes(tmp_path, capsys):
    assert main(["verify", "--config", "C0", "--out", str(tmp_path)]) == 0
    payload = json.loads((tmp_path / "verify.json").read_text())
    assert payload["overall"] == "pass"
    statuses = {c["name"]: c["status"] for c in payload["checks"]}
    assert statuses["decay_1"] == "skip"
    assert "overall: pass" in capsys.readouterr().out


def test_verify_c2_records_decay_slopes(tmp_path):
    # exit 0 regardless of check outcomes: failures are data.  The overall
    # status hinges on the leading-rate slope, asserted in the acceptance suite.
    assert main(["verify", "--config", "C2", "--out", str(tmp_path)]) == 0
    payload = json.loads((tmp_path / "verify.json").read_text())
    decay = [c for c in payload["checks"] if c["name"].startswith("decay_")]
    assert len(decay) == 4
    assert all(c["status"] == "pass" and c["value"] is not None for c in decay)
    assert payload["overall"] in ("pass", "fail")


def test_bad_subcommand():
    with pytest.raises(SystemExit):
        main(["plot", "--config", "C0"])
