import pytest
from unittest.mock import patch

from mtverify.checks.factory import CheckFactory
from mtverify.checks.conjectures import LeadingTermCheck, OrderCheck
from mtverify.checks.formalgroup import HondaCheck, TwistedSeriesCheck
from mtverify.checks.mazurtate import FunctionalEquationCheck, NormRelationCheck
from mtverify.checks.otsuki import OtsukiCheck
from mtverify.errors import ConfigInvalid


def test_factory_norm(settings):
    handler = CheckFactory.get_handler('norm', settings)
    assert isinstance(handler, NormRelationCheck)
    assert handler.options.digits == settings['decimal_digits']


def test_factory_other_handlers(settings):
    assert isinstance(CheckFactory.get_handler('funceq', settings), FunctionalEquationCheck)
    assert isinstance(CheckFactory.get_handler('otsuki', settings), OtsukiCheck)
    assert isinstance(CheckFactory.get_handler('honda', settings), HondaCheck)
    assert isinstance(CheckFactory.get_handler('g-h', settings), TwistedSeriesCheck)
    assert isinstance(CheckFactory.get_handler('order', settings), OrderCheck)
    assert isinstance(CheckFactory.get_handler('leading-term', settings), LeadingTermCheck)


def test_factory_invalid_type(settings):
    with pytest.raises(ValueError, match="Unsupported check type"):
        CheckFactory.get_handler('invalid', settings)


def test_norm_grid(settings, curve_11a1):
    handler = CheckFactory.get_handler('norm', settings)
    tasks = handler.expand(curve_11a1, {'max_product': 6})
    assert {'m': 3, 'ell': 2} in tasks
    assert {'m': 1, 'ell': 5} in tasks
    assert all(t['m'] * t['ell'] <= 6 for t in tasks)
    assert len(tasks) == 3 + 2 + 1  # ell = 2, 3, 5 over m <= 6 // ell


def test_funceq_grid_skips_inadmissible_levels(settings, curve_49a1):
    handler = CheckFactory.get_handler('funceq', settings)
    levels = [t['m'] for t in handler.expand(curve_49a1, {'max_m': 10})]
    # delta(7) = gcd(7, 7) = 7
    assert 7 not in levels
    assert levels == [1, 2, 3, 4, 5, 6, 8, 9, 10]


def test_interp_grid_lists_primitive_characters(settings, curve_11a1):
    handler = CheckFactory.get_handler('interp', settings)
    tasks = handler.expand(curve_11a1, {'m': 5})
    assert len(tasks) == 3
    assert all(t['chi'].startswith('5:') for t in tasks)


def test_missing_parameter(settings, curve_11a1):
    handler = CheckFactory.get_handler('norm', settings)
    with pytest.raises(ConfigInvalid, match="needs parameter 'ell'"):
        handler.run(curve_11a1, {'m': 3})


def test_unknown_otsuki_relation(settings, curve_11a1):
    handler = CheckFactory.get_handler('otsuki', settings)
    with pytest.raises(ValueError, match="Unsupported otsuki relation"):
        handler.run(curve_11a1, {'relation': 'nonsense'})


def test_funceq_stability_parameter(settings, curve_11a1):
    handler = CheckFactory.get_handler('funceq', settings)
    with patch('mtverify.checks.mazurtate.verify_sign_stability') as mock_stability:
        handler.run(curve_11a1, {'stability_max_m': 12})
    mock_stability.assert_called_once_with(curve_11a1, 12, handler.options)
