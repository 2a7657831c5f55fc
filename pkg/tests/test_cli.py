import json
import pytest
import yaml
from typer.testing import CliRunner
from unittest.mock import patch, MagicMock

from mtverify.cli.main import app
from mtverify.core.report import CheckReport, Verdict

runner = CliRunner()


def test_version():
    result = runner.invoke(app, ["--version"])
    assert result.exit_code == 0
    assert "mtverify version" in result.stdout


def test_help():
    result = runner.invoke(app, ["--help"])
    assert result.exit_code == 0
    assert "Mazur-Tate" in result.stdout


def test_check_command_missing_args():
    result = runner.invoke(app, ["check", "norm"])
    assert result.exit_code != 0
    assert "Missing option" in result.output


def test_check_unknown_name():
    result = runner.invoke(app, ["check", "bogus", "--curve", "x.yaml"])
    assert result.exit_code != 0


@pytest.fixture
def mock_execute():
    with patch('mtverify.cli.main.execute') as mock_exec:
        yield mock_exec


def test_check_flow(mock_config_file, curve_file, mock_execute):
    report = CheckReport("norm", {"curve": "11a1", "m": 3, "ell": 2}, Verdict.passed)
    report.witnesses = {"case": "ell_coprime_to_m"}
    mock_execute.return_value = report

    result = runner.invoke(app, [
        "check", "norm",
        "--curve", str(curve_file),
        "--field", "m=3",
        "-P", "ell=2",
        "--config", str(mock_config_file),
    ])

    if result.exit_code != 0:
        print(f"Stdout: {result.stdout}")

    assert result.exit_code == 0
    assert "pass" in result.stdout
    curve, (check_id, params), _ = mock_execute.call_args.args
    assert curve.label == "11a1"
    assert check_id == "norm"
    assert params["m"] == 3
    assert params["ell"] == 2
    assert params["field"] == "m=3"


def test_check_failure_exits_nonzero(mock_config_file, curve_file, mock_execute, tmp_path):
    mock_execute.return_value = CheckReport("norm", {"m": 3, "ell": 2}, Verdict.failed)
    out = tmp_path / "report.json"

    result = runner.invoke(app, [
        "check", "norm",
        "--curve", str(curve_file),
        "--field", "m=3",
        "-P", "ell=2",
        "--out", str(out),
        "--config", str(mock_config_file),
    ])

    assert result.exit_code == 1
    document = json.loads(out.read_text())
    assert document["summary"]["fail"] == 1


def test_check_bad_param(mock_config_file, curve_file):
    result = runner.invoke(app, [
        "check", "norm",
        "--curve", str(curve_file),
        "-P", "ell",
        "--config", str(mock_config_file),
    ])
    assert result.exit_code == 1
    assert "Expected KEY=VALUE" in result.output


def test_theta_missing_curve(mock_config_file):
    result = runner.invoke(app, ["theta", "--curve", "missing.yaml", "--config", str(mock_config_file)])
    assert result.exit_code == 1
    assert "File not found" in result.output


def test_theta_flow(mock_config_file, curve_file, tmp_path):
    value = MagicMock()
    value.element.items.return_value = [(1, 1)]
    with patch('mtverify.cli.main.theta', return_value=value) as mock_theta, \
         patch('mtverify.cli.main.write_theta', return_value=tmp_path / "theta.txt") as mock_write:
        result = runner.invoke(app, [
            "theta",
            "--curve", str(curve_file),
            "--field", "m=1",
            "--out", str(tmp_path / "theta.txt"),
            "--config", str(mock_config_file),
        ])

    assert result.exit_code == 0
    assert "sigma_1: 1/1" in result.stdout
    mock_theta.assert_called_once()
    mock_write.assert_called_once()


def test_classify(mock_config_file, curve_file):
    result = runner.invoke(app, [
        "classify",
        "--curve", str(curve_file),
        "--field", "m=5",
        "--p", "7",
        "--rank", "0",
        "--config", str(mock_config_file),
    ])

    if result.exit_code != 0:
        print(f"Stdout: {result.stdout}")

    assert result.exit_code == 0
    assert "sp(m) = 0" in result.stdout
    assert "predicted order of vanishing" in result.stdout


def test_classify_small_prime(mock_config_file, curve_file):
    result = runner.invoke(app, [
        "classify", "--curve", str(curve_file), "--field", "m=5", "--p", "3",
        "--config", str(mock_config_file),
    ])
    assert result.exit_code == 1
    assert "p > 3" in result.output


def test_cache_cycle(mock_config_file, curve_file):
    base = ["--curve", str(curve_file), "--config", str(mock_config_file)]

    result = runner.invoke(app, ["cache", "warm", "--bound", "50"] + base)
    assert result.exit_code == 0
    assert "Cache warmed" in result.stdout

    result = runner.invoke(app, ["cache", "verify"] + base)
    assert result.exit_code == 0
    assert "Cache clean" in result.stdout

    result = runner.invoke(app, ["cache", "purge"] + base)
    assert result.exit_code == 0
    assert "Removed 1" in result.stdout


def test_cache_verify_needs_curve(mock_config_file):
    result = runner.invoke(app, ["cache", "verify", "--config", str(mock_config_file)])
    assert result.exit_code == 1


def test_run_empty_suite(mock_config_file, curve_file, tmp_path):
    spec = tmp_path / "suite.yaml"
    with open(spec, 'w') as f:
        yaml.dump({'curve': curve_file.name, 'checks': []}, f)
    out = tmp_path / "reports" / "empty.json"

    result = runner.invoke(app, [
        "run", "--spec", str(spec), "--out", str(out), "--config", str(mock_config_file),
    ])

    assert result.exit_code == 0
    document = json.loads(out.read_text())
    assert document["reports"] == []


def test_run_failure_sets_exit_code(mock_config_file, curve_file, tmp_path):
    spec = tmp_path / "suite.yaml"
    with open(spec, 'w') as f:
        yaml.dump({'curve': curve_file.name, 'checks': [{'check': 'norm', 'm': 3, 'ell': 2}]}, f)

    with patch('mtverify.core.suite.execute') as mock_exec:
        mock_exec.return_value = CheckReport("norm", {"m": 3, "ell": 2}, Verdict.failed)
        result = runner.invoke(app, ["run", "--spec", str(spec), "--config", str(mock_config_file)])

    assert result.exit_code == 1
