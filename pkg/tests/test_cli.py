import json
from pathlib import Path

import pytest

from kappazero.cli import main
from kappazero.config import RunConfig, load_config, parse_config

FIXTURE = str(Path(__file__).parent / "data" / "zeros200.txt")

TINY = [
    "--zeros", FIXTURE, "--n", "8", "--nprime", "150", "--m", "64",
    "--ell", "24", "--set", "lll_precision_digits=60",
    "--coeff-bound", "1e40", "--d-target", "auto",
]


def test_config_roundtrip(tmp_path):
    cfg = RunConfig.reduced().override(zeros_path="x.txt", d_target="1e-6")
    path = tmp_path / "run.cfg"
    path.write_text(cfg.to_text())
    back = load_config(path)
    assert back == cfg


def test_config_parse_overrides():
    cfg = parse_config("N = 5\nd_target = auto\ncoeff_bound = 1e40\n"
                       "# comment\nalpha_breakpoints = 0:0, 1/2:pi\n")
    assert cfg.N == 5
    assert cfg.d_target is None
    assert cfg.coeff_bound == 10 ** 40
    assert cfg.alpha_breakpoints == (("0", "0"), ("1/2", "pi"))
    with pytest.raises(ValueError):
        parse_config("no_such_key = 1\n")
    with pytest.raises(ValueError):
        parse_config("bare line\n")


def test_check_zeros(capsys):
    rc = main(["check-zeros", "--zeros", FIXTURE])
    assert rc == 0
    out = capsys.readouterr().out
    assert "200 ordinates" in out
    assert "1.4134725" in out  # gamma_0 endpoint in scientific notation


def test_check_zeros_missing_file(capsys):
    rc = main(["check-zeros", "--zeros", "/nonexistent/zeros.txt"])
    assert rc == 1
    assert "cannot read zero table" in capsys.readouterr().err


def test_unknown_subcommand_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_mesh_subcommand(capsys):
    rc = main(["mesh"] + TINY)
    assert rc == 0
    out = capsys.readouterr().out
    assert "claim1" in out and "claim3" in out and "certified" in out


def test_lll_and_volume_and_report(tmp_path, capsys):
    cert = tmp_path / "cert.json"
    rc = main(["lll"] + TINY + ["--out", str(cert)])
    assert rc == 0
    assert cert.exists()
    capsys.readouterr()

    rc = main(["report", str(cert)])
    assert rc == 0
    assert "tiling certificate" in capsys.readouterr().out

    report = tmp_path / "report.json"
    rc = main(["volume"] + TINY + ["--certificate", str(cert),
                                   "--out", str(report)])
    out = capsys.readouterr().out
    assert rc == 0
    assert "PASS" in out
    data = json.loads(report.read_text())
    assert data["status"] == "PASS"

    rc = main(["report", str(report)])
    assert rc == 0
    assert "kappa_0 lower bound" in capsys.readouterr().out


def test_volume_requires_certificate():
    with pytest.raises(SystemExit) as exc:
        main(["volume"] + TINY)
    assert exc.value.code == 2


def test_run_full_and_exit_codes(tmp_path, capsys):
    report = tmp_path / "rep.json"
    rc = main(["run"] + TINY + ["--out", str(report)])
    out = capsys.readouterr().out
    assert rc == 0
    assert "certification status: PASS" in out
    data = json.loads(report.read_text())
    assert set(data["claims"]) == {f"claim{i}" for i in range(1, 6)}
    assert all(c["status"] == "certified" for c in data["claims"].values())
    # both interval endpoints present for every numeric claim
    vol = data["volume"]
    for key in ("sum_r_exact", "kappa_increment_exact", "kappa0_lower_exact"):
        assert "lo" in vol[key] and "hi" in vol[key]


def test_run_failure_exit_code(tmp_path, capsys):
    # sabotage: Y0 so low the tail swallows the clearance
    rc = main(["run"] + TINY + ["--set", "Y0=0.001"])
    out = capsys.readouterr().out
    assert rc == 1
    assert "FAILED" in out
    assert "claim 2" in out or "claim2" in out


def test_report_determinism(tmp_path):
    r1 = tmp_path / "r1.json"
    r2 = tmp_path / "r2.json"
    main(["run"] + TINY + ["--out", str(r1)])
    main(["run"] + TINY + ["--out", str(r2)])
    d1 = json.loads(r1.read_text())
    d2 = json.loads(r2.read_text())
    d1.pop("timings"), d2.pop("timings")
    assert d1 == d2
