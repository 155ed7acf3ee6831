import json
from pathlib import Path

import pytest

from fuzzylab.checks import (CheckConfig, POTENTIALS, SUITES,
                             parse_config_text, run_suite)
from fuzzylab.cli import main
from fuzzylab.report import (CheckRecord, VerificationReport, emit_report,
                             report_from_json)


def small_config(**kw):
    base = dict(lams=(0.5,), n_maxes=(6,), n_states=2,
                suites=("kinematics",))
    base.update(kw)
    return CheckConfig(**base)


def test_config_text_round_trip(tmp_path):
    text = """
    # sample configuration
    lambda = 0.1, 0.5
    nmax = 8, 12
    seed = 11
    states = 7
    margin = fixed:2
    suites = kinematics, quadratic
    potential = coulomb
    q = 2.0
    tolerance = 1e-9
    tol.quadratic.V2H = 1e-8
    format = csv
    """
    cfg = parse_config_text(text)
    assert cfg.lams == (0.1, 0.5)
    assert cfg.n_maxes == (8, 12)
    assert cfg.seed == 11 and cfg.n_states == 7
    assert cfg.margin == "fixed:2"
    assert cfg.suites == ("kinematics", "quadratic")
    assert cfg.potential_q == 2.0
    assert cfg.tol_overrides == {"quadratic.V2H": 1e-8}
    assert cfg.fmt == "csv"


def test_config_serialization_round_trip():
    cfg = CheckConfig(lams=(0.05, 1.0), n_maxes=(8, 16), seed=3, n_states=9,
                      margin="fixed:1", suites=("e4", "spectra"),
                      potential="r2", potential_q=0.5, tolerance=1e-9,
                      tol_overrides={"e4.VV": 1e-8}, out="x.json", fmt="csv")
    assert parse_config_text(cfg.to_text()) == cfg


def test_config_rejects_unknown_key():
    with pytest.raises(ValueError, match="unknown config key"):
        parse_config_text("wibble = 3")
    with pytest.raises(ValueError, match="key = value"):
        parse_config_text("just some words")


def test_run_suite_empty_is_success():
    report = run_suite(small_config(suites=()))
    assert report.records == []
    assert report.passed


def test_run_suite_rejects_unknown_suite():
    with pytest.raises(ValueError, match="unknown suites"):
        run_suite(small_config(suites=("nonsense",)))


def test_report_json_round_trip():
    report = run_suite(small_config())
    back = report_from_json(report.to_json())
    assert back.records == report.records
    assert back.config == report.config


def test_report_csv_row_count_and_text_statements():
    report = run_suite(small_config())
    csv_text = report.to_csv()
    assert len(csv_text.strip().splitlines()) == len(report.records) + 1
    text = report.to_text()
    for record in report.records:
        assert record.statement in text


def test_report_determinism():
    a = run_suite(small_config())
    b = run_suite(small_config())
    assert [r.residual for r in a.records] == [r.residual for r in b.records]


def test_diagnostic_never_fails_report():
    report = VerificationReport(config={}, records=[
        CheckRecord("d", "diagnostic", "x != 0", {}, 0.0, 1e-3, False,
                    kind="diagnostic"),
        CheckRecord("c", "s", "x = 0", {}, 0.0, 1e-10, True),
    ])
    assert report.passed
    assert report.summary()["diagnostics_observed"] == 0


def test_emit_report_formats(tmp_path):
    report = run_suite(small_config())
    for fmt, suffix in (("json", "json"), ("csv", "csv"), ("text", "txt")):
        path = tmp_path / f"report.{suffix}"
        emit_report(report, fmt, str(path))
        assert path.exists() and path.stat().st_size > 0
    with pytest.raises(ValueError):
        emit_report(report, "yaml")


def test_cli_check_exit_codes(tmp_path):
    out = tmp_path / "r.json"
    code = main(["check", "--suite", "kinematics", "--lambda", "0.5",
                 "--nmax", "6", "--states", "2", "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["summary"]["failed"] == 0
    # an absurd override forces a failing (nonzero) residual check
    cfg = tmp_path / "strict.cfg"
    cfg.write_text("suites = hermiticity\nlambda = 0.5\nnmax = 6\n"
                   "states = 2\ntol.hermiticity.operators = 1e-60\n")
    code = main(["check", "--config", str(cfg)])
    assert code == 1
    assert main(["check", "--suite", "bogus", "--lambda", "0.5",
                 "--nmax", "6"]) == 2


def test_cli_prove(tmp_path):
    out = tmp_path / "proof.txt"
    assert main(["prove", "--identity", "velocity-form",
                 "--out", str(out)]) == 0
    assert "verdict: proved" in out.read_text()


def test_cli_spectrum_files_and_determinism(tmp_path):
    args = ["spectrum", "--potential", "coulomb", "--q", "1", "--j", "0",
            "--lambda", "0.8,0.4,0.2", "--nmax", "9,19,39", "--format", "csv",
            "--out", str(tmp_path / "spec")]
    assert main(args) == 0
    files = sorted(tmp_path.glob("spec.lam*.csv"))
    assert len(files) == 3  # one result file per lambda ...
    table = tmp_path / "spec.convergence.csv"
    assert table.exists()  # ... plus one oracle-comparison table
    assert len(table.read_text().strip().splitlines()) == 1 + 3 * 3
    first = {f.name: f.read_bytes() for f in tmp_path.glob("spec.*")}
    assert main(args) == 0
    for f in tmp_path.glob("spec.*"):
        assert f.read_bytes() == first[f.name]


def test_cli_spectrum_free_reports_cutoff(tmp_path, capsys):
    assert main(["spectrum", "--potential", "free", "--j", "1",
                 "--lambda", "0.5", "--nmax", "8"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["below_cutoff"] is True
    assert payload["max_energy"] <= payload["cutoff"] + 1e-8


def test_cli_rejects_half_integer_j(capsys):
    assert main(["spectrum", "--j", "0.5", "--lambda", "0.5",
                 "--nmax", "8"]) == 2
    err = capsys.readouterr().err
    assert "half-integer" in err


def test_cli_converge_table(tmp_path):
    out = tmp_path / "conv.csv"
    args = ["converge", "--potential", "free", "--j", "1",
            "--schedule", "0.8:9,0.4:19", "--levels", "2",
            "--out", str(out)]
    assert main(args) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "lam,n_max,j,level,E_nc,E_oracle,gap"
    assert len(lines) == 1 + 2 * 2
    blob = out.read_bytes()
    assert main(args) == 0
    assert out.read_bytes() == blob


def test_potentials_registry():
    assert set(POTENTIALS) >= {"free", "coulomb", "r2", "exp"}
    assert POTENTIALS["coulomb"](2.0) == -0.5
    assert "diagnostic" in SUITES
