"""
Otsuki calculus checks

One handler for every identity of the Euler-operator calculus, selected by
the 'relation' parameter.
"""

from typing import Any, Callable, Dict

from ..core.curve import CurveData
from ..core.otsuki import (
    verify_euler_inverse,
    verify_lambda_lemma,
    verify_nu_compatibility,
    verify_nu_congruence,
    verify_otsuki_relation,
    verify_trace_relations,
    verify_x_decomposition,
)
from ..core.report import CheckReport
from .base import CheckHandler


class OtsukiCheck(CheckHandler):
    """Euler inverse, the c_i relation, lambda_n, nu_m, x_{mp^n} and trace identities"""

    check_id = 'otsuki'

    def _relations(self) -> Dict[str, Callable[[CurveData, Dict[str, Any]], CheckReport]]:
        return {
            'euler-inverse': lambda curve, q: verify_euler_inverse(
                curve, self._int(q, 'ell'), self._int(q, 'M')),
            'relation': lambda curve, q: verify_otsuki_relation(
                curve, self._int(q, 'ell'), self._int(q, 'M'), self._int(q, 'j')),
            'lambda': lambda curve, q: verify_lambda_lemma(
                curve, self._int(q, 'm_prime'), self._int(q, 'ell'), self._int(q, 'n')),
            'nu-compatibility': lambda curve, q: verify_nu_compatibility(
                curve, self._int(q, 'm'), self._int(q, 'd'), self._int(q, 'ell')),
            'nu-congruence': lambda curve, q: verify_nu_congruence(
                curve, self._field(q), self._int(q, 'ell'), self._p(q), self._k(q),
                bool(q.get('require_case', False)), self._max_k()),
            'decomposition': lambda curve, q: verify_x_decomposition(
                curve, self._int(q, 'm'), self._p(q), self._int(q, 'n')),
            'trace': lambda curve, q: verify_trace_relations(
                curve, self._int(q, 'm'), self._p(q), self._int(q, 'n')),
        }

    def run(self, curve: CurveData, params: Dict[str, Any]) -> CheckReport:
        relations = self._relations()
        relation = str(params.get('relation', 'relation'))
        if relation not in relations:
            raise ValueError(
                f"Unsupported otsuki relation: {relation}. Supported relations: {list(relations.keys())}"
            )
        return relations[relation](curve, params)
