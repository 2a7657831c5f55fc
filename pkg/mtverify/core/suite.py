"""
Suite orchestration for mtverify

Reads a run specification, expands its grids into individual checks, runs
them on a bounded worker pool and writes the report file.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import yaml

from ..errors import ConfigInvalid, HypothesisViolated, PrecisionUnsupported
from ..logging.logger import log_scope
from .curve import CurveData, load_curve
from .report import CheckReport, Verdict, summarize, write_reports


logger = logging.getLogger("mtverify")

Task = Tuple[str, Dict[str, Any]]


@dataclass
class RunSpec:
    curve_path: Path
    checks: List[Dict[str, Any]]
    output: Optional[Path] = None


@dataclass
class SuiteResult:
    reports: List[CheckReport]
    output: Optional[Path]

    @property
    def exit_code(self) -> int:
        """0 iff no check failed (undecided and hypothesis_violated do not fail the run)"""
        return 1 if any(report.failed for report in self.reports) else 0

    @property
    def summary(self) -> Dict[str, int]:
        return summarize(self.reports)


def load_run_spec(path: Union[str, Path]) -> RunSpec:
    """
    Parse a run specification

    Format: {"curve": path, "output": path, "checks": [{"check": id, ...params}]}
    Relative paths are resolved against the specification's directory.

    Raises:
        FileNotFoundError: If the file does not exist
        ConfigInvalid: If required fields are missing or malformed
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Run specification not found: {path}")
    try:
        with open(path, 'r') as f:
            data = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise ConfigInvalid(f"Error parsing run specification {path}: {e}")
    if not isinstance(data, dict) or 'curve' not in data:
        raise ConfigInvalid(f"Run specification {path} must name a 'curve'")
    checks = data.get('checks') or []
    if not isinstance(checks, list) or not all(isinstance(c, dict) and 'check' in c for c in checks):
        raise ConfigInvalid(f"Run specification {path}: 'checks' must be a list of mappings with a 'check' key")

    def resolve(value: str) -> Path:
        candidate = Path(value)
        return candidate if candidate.is_absolute() else path.parent / candidate

    output = data.get('output')
    return RunSpec(resolve(str(data['curve'])), checks, resolve(str(output)) if output else None)


def expand_tasks(curve: CurveData, entries: List[Dict[str, Any]], settings: Dict[str, Any],
                 cache=None) -> List[Task]:
    """
    Expand suite entries into (check id, parameters) pairs

    Raises:
        ValueError: If an entry names an unsupported check
    """
    from ..checks.factory import CheckFactory

    tasks: List[Task] = []
    for entry in entries:
        params = {key: value for key, value in entry.items() if key != 'check'}
        handler = CheckFactory.get_handler(str(entry['check']), settings, cache)
        tasks.extend((handler.check_id, expanded) for expanded in handler.expand(curve, params))
    return tasks


def execute(curve: CurveData, task: Task, settings: Dict[str, Any], cache=None) -> CheckReport:
    """Run one check; module errors become verdicts instead of aborting the suite"""
    from ..checks.factory import CheckFactory

    check_id, params = task
    with log_scope(curve.label, check_id):
        try:
            return CheckFactory.get_handler(check_id, settings, cache).run(curve, params)
        except HypothesisViolated as e:
            report = CheckReport(check_id, dict(params, curve=curve.label), Verdict.hypothesis_violated)
            report.witnesses = {"clauses": e.clauses}
            report.message = str(e)
        except PrecisionUnsupported as e:
            report = CheckReport(check_id, dict(params, curve=curve.label), Verdict.undecided)
            report.message = str(e)
        except Exception as e:
            logger.error(f"check {check_id} {params} raised {type(e).__name__}: {e}")
            report = CheckReport(check_id, dict(params, curve=curve.label), Verdict.failed)
            report.witnesses = {"error": type(e).__name__}
            report.message = str(e)
    return report


def run_suite(
    spec: Union[RunSpec, str, Path],
    settings: Dict[str, Any],
    workers: int = 4,
    cache=None,
    output: Optional[Path] = None,
    include_timing: bool = True,
) -> SuiteResult:
    """
    Execute every check of a run specification

    Args:
        spec: RunSpec or path to a run specification file
        settings: Flat settings dictionary
        workers: Size of the worker pool
        cache: Optional CoefficientCache shared by the checks
        output: Report path, overriding the specification's 'output'
        include_timing: Record elapsed seconds in the report file

    Returns:
        SuiteResult with the reports in task order

    Raises:
        ConfigInvalid: If the specification is malformed
        FileNotFoundError: If the specification or curve file is missing
    """
    if not isinstance(spec, RunSpec):
        spec = load_run_spec(spec)
    start_time = datetime.now()
    curve = load_curve(spec.curve_path)
    tasks = expand_tasks(curve, spec.checks, settings, cache)

    logger.info(f"=== Starting suite of {len(tasks)} checks on {curve.label} ===")
    if tasks:
        with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
            reports = list(pool.map(lambda task: execute(curve, task, settings, cache), tasks))
    else:
        reports = []

    for report in reports:
        level = logging.WARNING if report.failed else logging.DEBUG
        logger.log(level, f"{report.check_id} {report.parameters}: {report.verdict.value}")

    result = SuiteResult(reports, output or spec.output)
    if result.output is not None:
        result.output = write_reports(reports, result.output, include_timing)
        logger.info(f"Report written to {result.output}")

    duration = (datetime.now() - start_time).total_seconds()
    logger.info(f"Summary: {result.summary}")
    logger.info(f"=== Suite completed in {duration:.2f} seconds ===")
    return result
