import pytest
import yaml

from mtverify.config.loader import default_settings
from mtverify.core.curve import curve_from_dict


CURVES = {
    '11a1': {'label': '11a1', 'a': [0, -1, 1, -10, -20], 'N': 11},
    '14a1': {
        'label': '14a1', 'a': [1, 0, 1, 4, -6], 'N': 14,
        'overrides': [{'ell': 2, 'kind': 'nonsplit_multiplicative', 'tamagawa': 2}],
    },
    '37a1': {'label': '37a1', 'a': [0, 0, 1, -1, 0], 'N': 37},
    '49a1': {'label': '49a1', 'a': [1, -1, 0, -2, -1], 'N': 49},
}


@pytest.fixture
def curve_11a1():
    return curve_from_dict(CURVES['11a1'])


@pytest.fixture
def curve_14a1():
    return curve_from_dict(CURVES['14a1'])


@pytest.fixture
def curve_37a1():
    return curve_from_dict(CURVES['37a1'])


@pytest.fixture
def curve_49a1():
    return curve_from_dict(CURVES['49a1'])


@pytest.fixture
def settings():
    return default_settings()


@pytest.fixture
def curve_file(tmp_path):
    """Write the 11a1 curve file"""
    path = tmp_path / '11a1.yaml'
    with open(path, 'w') as f:
        yaml.dump(CURVES['11a1'], f)
    return path


@pytest.fixture
def mock_config_file(tmp_path):
    """Create a temporary config.yaml file"""
    config_content = {
        'precision': {
            'padic_digits': 6,
            'decimal_digits': 25,
            'series_degree': 40,
            'max_padic_digits': 32,
        },
        'modsym': {
            'exact': True,
            'numeric_crosscheck': False,
        },
        'conjectures': {
            'reciprocity': 'direct',
            'c2_ap': 2,
            'aug_cap': 6,
        },
        'suite': {
            'workers': 2,
        },
        'cache': {
            'directory': str(tmp_path / 'cache'),
            'verify_fraction': 0.5,
            'seed': 7,
        },
        'logging': {
            'level': 'WARNING',
            'file': str(tmp_path / 'logs' / 'mtverify.log'),
        },
    }

    config_file = tmp_path / 'config.yaml'
    with open(config_file, 'w') as f:
        yaml.dump(config_content, f)

    return config_file


@pytest.fixture
def mock_env_vars(monkeypatch, tmp_path):
    """Set environment variables for testing"""
    monkeypatch.setenv('MTVERIFY_WORKERS', '3')
    monkeypatch.setenv('MTVERIFY_CACHE_DIR', str(tmp_path / 'env_cache'))
    monkeypatch.setenv('MTVERIFY_LOG_LEVEL', 'debug')
