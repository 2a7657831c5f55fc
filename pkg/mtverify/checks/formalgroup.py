"""
Formal group checks

Honda type of the formal logarithm, the twisted series g_chi and h_chi, and
the comparison with the multiplicative group.
"""

from typing import Any, Dict

from ..core.curve import CurveData
from ..core.formalgroup import g_and_h_check, honda_type_check, multiplicative_comparison
from ..core.report import CheckReport
from .base import CheckHandler


class FormalGroupCheck(CheckHandler):
    """Shared degree parameter: 'deg', defaulting to precision.series_degree"""

    def _degree(self, params: Dict[str, Any]) -> int:
        return self._int(params, 'deg', self.settings.get('series_degree', 120))


class HondaCheck(FormalGroupCheck):
    check_id = 'honda'

    def run(self, curve: CurveData, params: Dict[str, Any]) -> CheckReport:
        return honda_type_check(curve, self._p(params), self._degree(params), self._k(params))


class TwistedSeriesCheck(FormalGroupCheck):
    """g_chi and h_chi for chi = tau^s"""

    check_id = 'g-h'

    def run(self, curve: CurveData, params: Dict[str, Any]) -> CheckReport:
        return g_and_h_check(
            curve, self._p(params), self._int(params, 's'), self._degree(params), self._k(params)
        )


class MultiplicativeCheck(FormalGroupCheck):
    check_id = 'multiplicative'

    def run(self, curve: CurveData, params: Dict[str, Any]) -> CheckReport:
        return multiplicative_comparison(curve, self._p(params), self._degree(params))
