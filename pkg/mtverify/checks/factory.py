"""
Check handler factory

Creates and returns the appropriate check handler instance based on the check id.
"""

from typing import Any, Dict, List, Type
import logging

from .base import CheckHandler
from .conjectures import HypothesisCheck, LeadingTermCheck, OrderCheck
from .formalgroup import HondaCheck, MultiplicativeCheck, TwistedSeriesCheck
from .mazurtate import FunctionalEquationCheck, IntegralityCheck, InterpolationCheck, NormRelationCheck
from .otsuki import OtsukiCheck


logger = logging.getLogger("mtverify")


class CheckFactory:
    """Factory for creating check handlers"""

    _handlers: Dict[str, Type[CheckHandler]] = {
        'norm': NormRelationCheck,
        'funceq': FunctionalEquationCheck,
        'interp': InterpolationCheck,
        'integrality': IntegralityCheck,
        'otsuki': OtsukiCheck,
        'honda': HondaCheck,
        'g-h': TwistedSeriesCheck,
        'multiplicative': MultiplicativeCheck,
        'hypothesis': HypothesisCheck,
        'order': OrderCheck,
        'leading-term': LeadingTermCheck,
    }

    @classmethod
    def supported(cls) -> List[str]:
        return list(cls._handlers.keys())

    @classmethod
    def get_handler(cls, check_id: str, settings: Dict[str, Any], cache=None) -> CheckHandler:
        """
        Get check handler instance

        Args:
            check_id: Check identifier ('norm', 'funceq', ..., 'leading-term')
            settings: Flat settings dictionary
            cache: Optional CoefficientCache

        Returns:
            Instance of CheckHandler

        Raises:
            ValueError: If the check id is not supported
        """
        handler_cls = cls._handlers.get(check_id)

        if not handler_cls:
            raise ValueError(f"Unsupported check type: {check_id}. Supported types: {cls.supported()}")

        logger.debug(f"Using {handler_cls.__name__} for check '{check_id}'")
        return handler_cls(settings, cache)
