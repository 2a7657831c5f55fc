"""
Base class for check handlers

Defines the interface that every check family must follow.
"""

from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional

from ..core.curve import CurveData
from ..core.groupring import AbelianFieldSpec
from ..core.modsym import SymbolOptions
from ..core.report import CheckReport
from ..errors import ConfigInvalid


class CheckHandler(ABC):
    """Abstract base class for one family of checks"""

    check_id: str = ""

    def __init__(self, settings: Dict[str, Any], cache=None):
        """
        Initialize the handler

        Args:
            settings: Flat settings dictionary (see ConfigLoader.get_settings)
            cache: Optional CoefficientCache for j-series and a_n
        """
        self.settings = settings
        self.cache = cache
        self.options = SymbolOptions.from_settings(settings, cache)

    def expand(self, curve: CurveData, params: Dict[str, Any]) -> List[Dict[str, Any]]:
        """
        Expand grid parameters into individual check parameters

        Args:
            curve: Curve data
            params: Parameters of one suite entry

        Returns:
            List of parameter dictionaries, one per report
        """
        return [params]

    @abstractmethod
    def run(self, curve: CurveData, params: Dict[str, Any]) -> CheckReport:
        """
        Run the check once

        Args:
            curve: Curve data
            params: Parameters of this check

        Returns:
            CheckReport with the verdict

        Raises:
            HypothesisViolated: If the data fall outside the identity's hypotheses
            PrecisionUnsupported: If the precision budget is exhausted
        """
        pass

    # parameter helpers

    def _int(self, params: Dict[str, Any], key: str, default: Optional[int] = None) -> int:
        value = params.get(key, default)
        if value is None:
            raise ConfigInvalid(f"check '{self.check_id}' needs parameter '{key}'")
        try:
            return int(value)
        except (TypeError, ValueError):
            raise ConfigInvalid(f"check '{self.check_id}': '{key}' must be an integer, got {value!r}")

    def _field(self, params: Dict[str, Any], key: str = 'field') -> AbelianFieldSpec:
        value = params.get(key)
        if value is None:
            raise ConfigInvalid(f"check '{self.check_id}' needs parameter '{key}'")
        if isinstance(value, AbelianFieldSpec):
            return value
        return AbelianFieldSpec.parse(str(value))

    def _p(self, params: Dict[str, Any]) -> int:
        return self._int(params, 'p')

    def _k(self, params: Dict[str, Any]) -> int:
        return self._int(params, 'k', self.settings.get('padic_digits', 8))

    def _max_k(self) -> int:
        return int(self.settings.get('max_padic_digits', 64))
