"""
Mazur-Tate element checks

Norm relations, functional equation, interpolation and integrality of theta_m.
"""

from typing import Any, Dict, List

from sympy import primerange

from ..core.characters import primitive_characters
from ..core.curve import CurveData
from ..core.mazurtate import (
    delta,
    integrality_certificate,
    verify_functional_equation,
    verify_interpolation,
    verify_norm_relation,
    verify_sign_stability,
)
from ..core.report import CheckReport
from .base import CheckHandler


class NormRelationCheck(CheckHandler):
    """pi(theta_{m ell}) against the Euler-factor expression in theta_m"""

    check_id = 'norm'

    def expand(self, curve: CurveData, params: Dict[str, Any]) -> List[Dict[str, Any]]:
        if 'max_product' not in params:
            return [params]
        bound = self._int(params, 'max_product')
        return [
            {'m': m, 'ell': ell}
            for ell in primerange(2, bound + 1)
            for m in range(1, bound // ell + 1)
        ]

    def run(self, curve: CurveData, params: Dict[str, Any]) -> CheckReport:
        return verify_norm_relation(curve, self._int(params, 'm'), self._int(params, 'ell'), self.options)


class FunctionalEquationCheck(CheckHandler):
    """
    theta_m = eps sigma_{-Q}^-1 theta_m^#

    With 'stability_max_m' a single report checks that one sign holds for
    every admissible m up to that bound.
    """

    check_id = 'funceq'

    def expand(self, curve: CurveData, params: Dict[str, Any]) -> List[Dict[str, Any]]:
        if 'max_m' not in params:
            return [params]
        # grids only cover the admissible levels
        bound = self._int(params, 'max_m')
        return [{'m': m} for m in range(1, bound + 1) if delta(m, curve.conductor) == 1]

    def run(self, curve: CurveData, params: Dict[str, Any]) -> CheckReport:
        if 'stability_max_m' in params:
            return verify_sign_stability(curve, self._int(params, 'stability_max_m'), self.options)
        return verify_functional_equation(curve, self._int(params, 'm'), self.options)


class InterpolationCheck(CheckHandler):
    """chi(theta_m) against the twisted L-value"""

    check_id = 'interp'

    def expand(self, curve: CurveData, params: Dict[str, Any]) -> List[Dict[str, Any]]:
        if 'chi' in params:
            return [params]
        m = self._int(params, 'm')
        return [dict(params, chi=chi.label()) for chi in primitive_characters(m)]

    def run(self, curve: CurveData, params: Dict[str, Any]) -> CheckReport:
        digits = self._int(params, 'digits', self.settings.get('decimal_digits', 30))
        return verify_interpolation(curve, self._int(params, 'm'), str(params['chi']), digits, self.options)


class IntegralityCheck(CheckHandler):
    """torsion * c_infty * theta_m is integral"""

    check_id = 'integrality'

    def expand(self, curve: CurveData, params: Dict[str, Any]) -> List[Dict[str, Any]]:
        if 'max_m' not in params:
            return [params]
        return [{'m': m} for m in range(1, self._int(params, 'max_m') + 1)]

    def run(self, curve: CurveData, params: Dict[str, Any]) -> CheckReport:
        return integrality_certificate(curve, self._int(params, 'm'), self.options)
