"""
Check reports for mtverify

Machine-readable verdict records. Exact rationals are serialized as
"num/den" strings so reports can be compared byte for byte.
"""

import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import mpmath as mp

from .arith import format_rational
from .cyclotomic import CyclotomicNumber
from .groupring import GroupRingElement


class Verdict(str, Enum):
    """Outcome of a single check"""
    passed = "pass"
    failed = "fail"
    undecided = "undecided"
    hypothesis_violated = "hypothesis_violated"


def render(value: Any) -> Any:
    """Convert exact and numeric values into JSON-friendly data"""
    if isinstance(value, (bool, int, str)) or value is None:
        return value
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, GroupRingElement):
        return {str(a): render(Fraction(c)) for a, c in value.items()}
    if isinstance(value, CyclotomicNumber):
        return {str(i): format_rational(c) for i, c in enumerate(value.coeffs) if c}
    if isinstance(value, (mp.mpf, mp.mpc)):
        return mp.nstr(value, 20)
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): render(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [render(v) for v in items]
    return str(value)


@dataclass
class CheckReport:
    """Verdict record of one check"""
    check_id: str
    parameters: Dict[str, Any]
    verdict: Verdict = Verdict.undecided
    witnesses: Dict[str, Any] = field(default_factory=dict)
    assumptions: List[str] = field(default_factory=list)
    message: str = ""
    elapsed: Optional[float] = None

    @property
    def passed(self) -> bool:
        return self.verdict == Verdict.passed

    @property
    def failed(self) -> bool:
        return self.verdict == Verdict.failed

    def set_verdict(self, ok: bool, message: str = "") -> "CheckReport":
        self.verdict = Verdict.passed if ok else Verdict.failed
        if message:
            self.message = message
        return self

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        data = {
            "check": self.check_id,
            "parameters": render(self.parameters),
            "verdict": self.verdict.value,
            "witnesses": render(self.witnesses),
            "assumptions": list(self.assumptions),
            "message": self.message,
        }
        if include_timing and self.elapsed is not None:
            data["elapsed_seconds"] = round(self.elapsed, 3)
        return data


@contextmanager
def timed(report: CheckReport):
    """Record the wall time of a block on the report"""
    start = time.time()
    try:
        yield report
    finally:
        report.elapsed = time.time() - start


def summarize(reports: Sequence[CheckReport]) -> Dict[str, int]:
    counts = {verdict.value: 0 for verdict in Verdict}
    for report in reports:
        counts[report.verdict.value] += 1
    return counts


def next_report_path(path: Path) -> Path:
    """path itself if free, otherwise the first free <stem>.<n><suffix> with n >= 2"""
    if not path.exists():
        return path
    n = 2
    while True:
        candidate = path.with_name(f"{path.stem}.{n}{path.suffix}")
        if not candidate.exists():
            return candidate
        n += 1


def write_reports(reports: Sequence[CheckReport], path: Path, include_timing: bool = True) -> Path:
    """
    Write reports and their summary as JSON

    Reports are append-only: an existing file is never rewritten, a later run
    lands in the next free numbered sibling (report.json, report.2.json, ...).

    Returns:
        The path actually written
    """
    path = next_report_path(Path(path))
    path.parent.mkdir(parents=True, exist_ok=True)
    document = {
        "summary": summarize(reports),
        "reports": [report.to_dict(include_timing) for report in reports],
    }
    with open(path, 'x') as f:
        json.dump(document, f, indent=2, sort_keys=True)
        f.write("\n")
    return path
