"""
Configuration loader for mtverify

Loads configuration from YAML file and environment variables.
"""

import os
import yaml
from pathlib import Path
from typing import Dict, Any, Optional
from dotenv import load_dotenv, find_dotenv

from ..errors import ConfigInvalid


RECIPROCITY_CONVENTIONS = ('inverse', 'direct')


class ConfigLoader:
    """Loads and validates configuration from YAML and environment variables"""

    def __init__(self, config_path: Optional[str] = None):
        """
        Initialize the configuration loader

        Args:
            config_path: Path to config.yaml file. If None, searches in current directory.
        """
        # Load environment variables from .env file in current directory
        env_path = Path.cwd() / '.env'
        if env_path.exists():
            load_dotenv(dotenv_path=env_path)
        else:
            # Try parent directories
            load_dotenv(dotenv_path=find_dotenv())

        if config_path is None:
            config_path = self._find_config_file()

        self.config_path = Path(config_path)
        self.config = self._load_yaml()

    def _find_config_file(self) -> Path:
        """Find config.yaml in current directory or parent directories"""
        current = Path.cwd()

        # Search current directory and up to 3 parent directories
        for _ in range(4):
            config_file = current / "config.yaml"
            if config_file.exists():
                return config_file
            current = current.parent

        raise FileNotFoundError(
            "config.yaml not found. Please create a config.yaml file in your project directory."
        )

    def _load_yaml(self) -> Dict[str, Any]:
        """Load and parse YAML configuration file"""
        try:
            with open(self.config_path, 'r') as f:
                config = yaml.safe_load(f)
                return config if config else {}
        except yaml.YAMLError as e:
            raise ValueError(f"Error parsing config.yaml: {e}")
        except FileNotFoundError:
            raise FileNotFoundError(f"Configuration file not found: {self.config_path}")

    def _section(self, name: str) -> Dict[str, Any]:
        section = self.config.get(name) or {}
        if not isinstance(section, dict):
            raise ConfigInvalid(f"Section '{name}' must be a mapping")
        return section

    @staticmethod
    def _positive_int(section: str, key: str, value: Any) -> int:
        try:
            number = int(value)
        except (TypeError, ValueError):
            raise ConfigInvalid(f"{section}.{key} must be an integer, got {value!r}")
        if number <= 0:
            raise ConfigInvalid(f"{section}.{key} must be positive, got {number}")
        return number

    def get_precision_config(self) -> Dict[str, int]:
        """
        Get precision parameters

        Returns:
            Dictionary with padic_digits, decimal_digits, series_degree,
            max_padic_digits, max_terms and tate_series_terms
        """
        precision = self._section('precision')
        defaults = {
            'padic_digits': 8,
            'decimal_digits': 30,
            'series_degree': 120,
            'max_padic_digits': 64,
            'max_terms': 20000,
            'tate_series_terms': 64,
        }
        result = {
            key: self._positive_int('precision', key, precision.get(key, default))
            for key, default in defaults.items()
        }
        if result['max_padic_digits'] < result['padic_digits']:
            raise ConfigInvalid("precision.max_padic_digits must be at least precision.padic_digits")
        return result

    def get_modsym_config(self) -> Dict[str, Any]:
        """
        Get modular symbol settings

        Returns:
            Dictionary with exact, numeric_crosscheck, max_denominator and pin_search_limit
        """
        modsym = self._section('modsym')
        exact = bool(modsym.get('exact', True))
        crosscheck = bool(modsym.get('numeric_crosscheck', False))
        if not exact and not crosscheck:
            # Numeric reconstruction is the only remaining path
            crosscheck = True
        return {
            'exact': exact,
            'numeric_crosscheck': crosscheck,
            'max_denominator': self._positive_int('modsym', 'max_denominator', modsym.get('max_denominator', 10000)),
            'pin_search_limit': self._positive_int('modsym', 'pin_search_limit', modsym.get('pin_search_limit', 60)),
        }

    def get_conjecture_config(self) -> Dict[str, Any]:
        """
        Get settings for the conjecture checks

        Returns:
            Dictionary with reciprocity, c2_ap and aug_cap
        """
        conjectures = self._section('conjectures')
        reciprocity = str(conjectures.get('reciprocity', 'direct')).lower()
        if reciprocity not in RECIPROCITY_CONVENTIONS:
            raise ConfigInvalid(
                f"Unknown reciprocity convention: {reciprocity}. "
                f"Supported conventions: {list(RECIPROCITY_CONVENTIONS)}"
            )
        try:
            c2_ap = int(conjectures.get('c2_ap', 2))
        except (TypeError, ValueError):
            raise ConfigInvalid("conjectures.c2_ap must be an integer")
        return {
            'reciprocity': reciprocity,
            'c2_ap': c2_ap,
            'aug_cap': self._positive_int('conjectures', 'aug_cap', conjectures.get('aug_cap', 8)),
        }

    def get_suite_config(self) -> Dict[str, int]:
        """
        Get suite execution settings, honouring MTVERIFY_WORKERS
        """
        suite = self._section('suite')
        workers = os.getenv('MTVERIFY_WORKERS') or suite.get('workers', 4)
        return {'workers': self._positive_int('suite', 'workers', workers)}

    def get_cache_directory(self) -> Path:
        """
        Get cache directory path and create if it doesn't exist

        Returns:
            Path object for cache directory
        """
        cache_config = self._section('cache')
        directory = os.getenv('MTVERIFY_CACHE_DIR') or cache_config.get('directory', './.mtverify_cache')

        cache_path = Path(directory)
        cache_path.mkdir(parents=True, exist_ok=True)

        return cache_path.resolve()

    def get_cache_config(self) -> Dict[str, Any]:
        """
        Get cache verification settings
        """
        cache_config = self._section('cache')
        fraction = float(cache_config.get('verify_fraction', 0.01))
        if not 0 < fraction <= 1:
            raise ConfigInvalid(f"cache.verify_fraction must lie in (0, 1], got {fraction}")
        return {
            'directory': self.get_cache_directory(),
            'verify_fraction': fraction,
            'seed': int(cache_config.get('seed', 0)),
        }

    def get_log_file(self) -> Path:
        """Get the log file path (defaults to the cache directory)"""
        logging_config = self._section('logging')
        log_file = logging_config.get('file')
        if log_file:
            return Path(log_file)
        return self.get_cache_directory() / "mtverify.log"

    def get_log_level(self) -> str:
        """Get the console log level, honouring MTVERIFY_LOG_LEVEL"""
        logging_config = self._section('logging')
        return str(os.getenv('MTVERIFY_LOG_LEVEL') or logging_config.get('level', 'INFO')).upper()

    def get_settings(self) -> Dict[str, Any]:
        """
        Flatten every section into the settings dictionary passed to checks

        Returns:
            Dictionary combining precision, modsym and conjecture settings
        """
        settings: Dict[str, Any] = {}
        settings.update(self.get_precision_config())
        settings.update(self.get_modsym_config())
        settings.update(self.get_conjecture_config())
        return settings


def default_settings() -> Dict[str, Any]:
    """Settings used when no config.yaml is involved (library use and tests)"""
    return {
        'padic_digits': 8,
        'decimal_digits': 30,
        'series_degree': 120,
        'max_padic_digits': 64,
        'max_terms': 20000,
        'tate_series_terms': 64,
        'exact': True,
        'numeric_crosscheck': False,
        'max_denominator': 10000,
        'pin_search_limit': 60,
        'reciprocity': 'direct',
        'c2_ap': 2,
        'aug_cap': 8,
    }
