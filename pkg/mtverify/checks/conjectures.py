"""
Conjecture checks

Standing hypothesis, order of vanishing and the leading-term congruence.
"""

from typing import Any, Dict, Optional

from ..core.conjectures import hypothesis_report, leading_term_check, vanishing_order_check
from ..core.curve import CurveData
from ..core.groupring import AbelianFieldSpec
from ..core.report import CheckReport
from .base import CheckHandler


class HypothesisCheck(CheckHandler):
    check_id = 'hypothesis'

    def run(self, curve: CurveData, params: Dict[str, Any]) -> CheckReport:
        return hypothesis_report(curve, self._field(params), self._p(params))


class OrderCheck(CheckHandler):
    """theta_K in I^target, target defaulting to the predicted order"""

    check_id = 'order'

    def run(self, curve: CurveData, params: Dict[str, Any]) -> CheckReport:
        target: Optional[int] = params.get('target')
        rank: Optional[int] = params.get('rank')
        return vanishing_order_check(
            curve,
            self._field(params),
            self._p(params),
            self._k(params),
            target=int(target) if target is not None else None,
            also_product_ideal=bool(params.get('product_ideal', True)),
            r_p=int(rank) if rank is not None else None,
            c2_ap=int(params.get('c2_ap', self.settings.get('c2_ap', 2))),
            max_k=self._max_k(),
            options=self.options,
        )


class LeadingTermCheck(CheckHandler):
    """theta_L against the Tate-period expression modulo I_H A"""

    check_id = 'leading-term'

    def run(self, curve: CurveData, params: Dict[str, Any]) -> CheckReport:
        max_terms = int(self.settings.get('tate_series_terms', 64))
        j_coefficients = self.cache.j_coefficients(max_terms + 2) if self.cache is not None else None
        rank = params.get('rank')
        return leading_term_check(
            curve,
            self._field(params, 'field'),
            self._field(params, 'base') if params.get('base') else AbelianFieldSpec(1),
            self._p(params),
            self._k(params),
            convention=str(params.get('convention', self.settings.get('reciprocity', 'direct'))),
            perturbation=self._int(params, 'perturbation', 1),
            max_k=self._max_k(),
            max_terms=max_terms,
            rank=int(rank) if rank is not None else None,
            options=self.options,
            j_coefficients=j_coefficients,
        )
