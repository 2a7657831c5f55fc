import json
import pytest
import yaml
from unittest.mock import patch, MagicMock

from mtverify.checks.factory import CheckFactory
from mtverify.core.curve import ReductionKind, ReductionOverride
from mtverify.core.report import CheckReport, Verdict
from mtverify.core.suite import RunSpec, SuiteResult, execute, expand_tasks, load_run_spec, run_suite
from mtverify.errors import ConfigInvalid, HypothesisViolated, PrecisionUnsupported


@pytest.fixture
def run_spec_file(tmp_path, curve_file):
    """Run specification next to the 11a1 curve file"""
    path = tmp_path / 'suite.yaml'
    with open(path, 'w') as f:
        yaml.dump({
            'curve': curve_file.name,
            'output': 'out/report.json',
            'checks': [
                {'check': 'norm', 'm': 1, 'ell': 2},
                {'check': 'hypothesis', 'field': 'm=5', 'p': 3},
            ],
        }, f)
    return path


def test_load_run_spec(run_spec_file, curve_file, tmp_path):
    spec = load_run_spec(run_spec_file)
    assert spec.curve_path == curve_file
    assert spec.output == tmp_path / 'out' / 'report.json'
    assert [entry['check'] for entry in spec.checks] == ['norm', 'hypothesis']


def test_load_run_spec_absolute_paths(tmp_path):
    path = tmp_path / 'suite.yaml'
    path.write_text(f"curve: {tmp_path / 'elsewhere' / 'c.yaml'}\n")
    spec = load_run_spec(path)
    assert spec.curve_path == tmp_path / 'elsewhere' / 'c.yaml'
    assert spec.output is None
    assert spec.checks == []


def test_load_run_spec_missing(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_run_spec(tmp_path / 'absent.yaml')


@pytest.mark.parametrize("content,message", [
    ("checks: []\n", "must name a 'curve'"),
    ("curve: c.yaml\nchecks:\n  - m: 3\n", "'checks' must be a list"),
    ("curve: c.yaml\nchecks: norm\n", "'checks' must be a list"),
    ("curve: [unclosed\n", "Error parsing run specification"),
])
def test_load_run_spec_invalid(tmp_path, content, message):
    path = tmp_path / 'suite.yaml'
    path.write_text(content)
    with pytest.raises(ConfigInvalid, match=message):
        load_run_spec(path)


def test_expand_tasks(curve_11a1, settings):
    tasks = expand_tasks(curve_11a1, [
        {'check': 'norm', 'max_product': 6},
        {'check': 'interp', 'm': 5},
        {'check': 'integrality', 'max_m': 3},
        {'check': 'honda', 'p': 7, 'deg': 20},
    ], settings)

    assert [check_id for check_id, _ in tasks].count('norm') == 6
    assert ('norm', {'m': 3, 'ell': 2}) in tasks
    assert ('norm', {'m': 1, 'ell': 5}) in tasks
    assert len([params for check_id, params in tasks if check_id == 'interp']) == 3
    assert [params for check_id, params in tasks if check_id == 'integrality'] == [{'m': 1}, {'m': 2}, {'m': 3}]
    assert tasks[-1] == ('honda', {'p': 7, 'deg': 20})


def test_expand_tasks_unknown_check(curve_11a1, settings):
    with pytest.raises(ValueError, match="Unsupported check type: bogus"):
        expand_tasks(curve_11a1, [{'check': 'bogus'}], settings)


@pytest.fixture
def mock_handler():
    handler = MagicMock()
    with patch('mtverify.checks.factory.CheckFactory.get_handler', return_value=handler):
        yield handler


def test_execute_hypothesis_violated(curve_11a1, settings, mock_handler):
    mock_handler.run.side_effect = HypothesisViolated("needs p > 3", clauses=["p > 3"])
    report = execute(curve_11a1, ('honda', {'p': 3}), settings)
    assert report.verdict == Verdict.hypothesis_violated
    assert report.witnesses == {"clauses": ["p > 3"]}
    assert report.parameters == {'p': 3, 'curve': '11a1'}


def test_execute_precision_unsupported(curve_11a1, settings, mock_handler):
    mock_handler.run.side_effect = PrecisionUnsupported("budget exhausted")
    report = execute(curve_11a1, ('honda', {'p': 7}), settings)
    assert report.verdict == Verdict.undecided
    assert report.message == "budget exhausted"


def test_execute_unexpected_error(curve_11a1, settings, mock_handler):
    mock_handler.run.side_effect = RuntimeError("boom")
    report = execute(curve_11a1, ('honda', {'p': 7}), settings)
    assert report.failed
    assert report.witnesses == {"error": "RuntimeError"}


def test_run_suite(run_spec_file, settings, tmp_path):
    result = run_suite(run_spec_file, settings, workers=2, include_timing=False)

    assert [report.check_id for report in result.reports] == ['norm', 'hypothesis']
    assert result.reports[0].verdict == Verdict.passed
    assert result.reports[1].verdict == Verdict.hypothesis_violated
    assert result.exit_code == 0

    data = json.loads((tmp_path / 'out' / 'report.json').read_text())
    assert data["summary"] == {"pass": 1, "fail": 0, "undecided": 0, "hypothesis_violated": 1}
    assert all("elapsed_seconds" not in report for report in data["reports"])


def test_run_suite_output_override(run_spec_file, settings, tmp_path):
    target = tmp_path / 'elsewhere.json'
    result = run_suite(run_spec_file, settings, output=target)
    assert result.output == target
    assert target.exists()
    assert not (tmp_path / 'out' / 'report.json').exists()


def test_run_suite_failure_sets_exit_code(curve_file, settings):
    spec = RunSpec(curve_file, [{'check': 'norm', 'm': 1, 'ell': 2}])
    failed = CheckReport('norm', {'m': 1, 'ell': 2}, Verdict.failed)
    with patch('mtverify.core.suite.execute', return_value=failed):
        result = run_suite(spec, settings, workers=1)
    assert result.exit_code == 1
    assert result.output is None


def test_suite_result_summary():
    result = SuiteResult([
        CheckReport('a', {}, Verdict.passed),
        CheckReport('b', {}, Verdict.undecided),
    ], None)
    assert result.exit_code == 0
    assert result.summary["undecided"] == 1


def test_wrong_override_fails_norm_relation(curve_14a1, settings):
    # a_2 = +1 instead of -1 breaks pi(theta_2) = (a_2 - 1) theta_1
    wrong = curve_14a1.with_overrides([ReductionOverride(2, ReductionKind.split_multiplicative, 1)])
    assert execute(curve_14a1, ('norm', {'m': 1, 'ell': 2}), settings).verdict == Verdict.passed
    assert execute(wrong, ('norm', {'m': 1, 'ell': 2}), settings).failed


def test_leading_term_on_field_below_its_conductor(curve_11a1, settings):
    report = execute(curve_11a1, ('leading-term', {'field': 'm=10', 'p': 7, 'k': 3}), settings)
    assert report.verdict == Verdict.hypothesis_violated
    assert "L given at its conductor" in report.witnesses["clauses"]


@pytest.mark.slow
def test_suite_reports_are_byte_identical(run_spec_file, settings, tmp_path):
    first = run_suite(run_spec_file, settings, workers=2, output=tmp_path / 'first.json', include_timing=False)
    second = run_suite(run_spec_file, settings, workers=1, output=tmp_path / 'second.json', include_timing=False)
    assert first.output.read_bytes() == second.output.read_bytes()

    again = run_suite(run_spec_file, settings, output=tmp_path / 'first.json', include_timing=False)
    assert again.output == tmp_path / 'first.2.json'
    assert again.output.read_bytes() == first.output.read_bytes()


@pytest.mark.slow
@pytest.mark.parametrize("curve_name", ['curve_14a1', 'curve_37a1'])
def test_norm_grid_up_to_60(request, curve_name, settings):
    curve = request.getfixturevalue(curve_name)
    handler = CheckFactory.get_handler('norm', settings)
    grid = handler.expand(curve, {'max_product': 60})
    assert {'m': 1, 'ell': 59} in grid
    assert all(params['m'] * params['ell'] <= 60 for params in grid)

    failures = [
        (params, report.verdict)
        for params in grid
        for report in [execute(curve, ('norm', params), settings)]
        if report.verdict != Verdict.passed
    ]
    assert failures == []
