"""
Configuration manager for handling YAML configuration files.
Implements lazy evaluation across configuration levels.
"""
import os
import threading
from typing import Any, Dict, Optional

from src.core.utils.config_reader import ConfigReader
from src.core.utils.report_logger import ReportLogger


class ConfigManager:
    """
    Manager for handling configuration with hierarchy support.

    Config Priority (Low to High):
    1. Global Config (config.yaml)
    2. Environment Config (environment/{env}.yaml)
    3. Overrides (command-line flags, set through set_override)

    Values are resolved lazily on every lookup; nothing is merged up front.
    """

    _instance = None
    _lock = threading.Lock()

    DEFAULT_TREE_CAP = 14
    DEFAULT_COMPOSITION_BUDGET = 10 ** 7
    DEFAULT_ORACLE_BUDGET = 2 ** 24
    DEFAULT_ENSEMBLE_BUDGET = 10 ** 13

    def __new__(cls, logger: Optional[ReportLogger] = None):
        """Singleton so library modules and the CLI share one configuration."""
        if cls._instance is None:
            with cls._lock:
                if cls._instance is None:
                    cls._instance = super(ConfigManager, cls).__new__(cls)
        return cls._instance

    def __init__(self, logger: Optional[ReportLogger] = None):
        if getattr(self, 'initialized', False):
            return
        self.logger = logger or ReportLogger()
        self.config_reader = ConfigReader(logger=self.logger)
        self.test_data: Dict[str, Any] = {}
        self._configs: Dict[str, Dict[str, Any]] = {
            'global': {},
            'environment': {},
            'override': {},
        }
        self._environment: Optional[str] = None
        self._base_configs_loaded = False
        self.initialized = True

    def set_environment(self, environment: str):
        """Set environment and load environment-specific config."""
        if environment not in self.config_reader.list_environments():
            raise ValueError(f"Unknown environment: {environment}")
        if not self._base_configs_loaded:
            self._environment = environment
            self._load_base_configs()
            return
        if environment != self._environment:
            self._environment = environment
            self._configs['environment'] = self.config_reader.read_environment_config(environment)
            if self.get_logging_config():
                self.logger.setup_logger(self)
            self.logger.info(f"[CONFIG-DONE] Loaded environment {environment} configuration")

    def set_override(self, key_path: str, value: Any):
        """Highest-priority value for key_path, used for command-line flags."""
        current = self._configs['override']
        keys = key_path.split('.')
        for key in keys[:-1]:
            current = current.setdefault(key, {})
        current[keys[-1]] = value

    def clear_overrides(self):
        self._configs['override'] = {}

    def get_config_value(self, key_path: str, default: Any = None) -> Any:
        """
        Priority:
        1. Overrides
        2. Environment config
        3. Global config
        4. Default
        """
        if not self._base_configs_loaded:
            self._load_base_configs()
        keys = key_path.split('.')
        for level in ('override', 'environment', 'global'):
            value = self._get_nested_value(self._configs[level], keys)
            if value is not None:
                return value
        return default

    def get_config_section(self, key_path: str) -> Dict[str, Any]:
        """Mapping at key_path with the levels merged key by key (override wins)."""
        if not self._base_configs_loaded:
            self._load_base_configs()
        keys = key_path.split('.')
        merged: Dict[str, Any] = {}
        for level in ('global', 'environment', 'override'):
            value = self._get_nested_value(self._configs[level], keys)
            if isinstance(value, dict):
                merged = self._deep_merge(merged, value)
        return merged

    @staticmethod
    def _deep_merge(base: Dict[str, Any], update: Dict[str, Any]) -> Dict[str, Any]:
        result = dict(base)
        for key, value in update.items():
            if isinstance(value, dict) and isinstance(result.get(key), dict):
                result[key] = ConfigManager._deep_merge(result[key], value)
            else:
                result[key] = value
        return result

    def _get_nested_value(self, config: dict, keys: list) -> Any:
        """Get nested value from dictionary using key path, None when absent."""
        if not config:
            return None
        current = config
        for key in keys:
            if isinstance(current, dict) and key in current:
                current = current[key]
            else:
                return None
        return current

    def _load_base_configs(self):
        """Load global and environment configs once per process."""
        if self._base_configs_loaded:
            return
        self._configs['global'] = self.config_reader.read_main_config()
        env = self._environment or self._configs['global'].get('default_environment', 'dev')
        self._configs['environment'] = self.config_reader.read_environment_config(env)
        self._environment = env
        self._base_configs_loaded = True

        if self.logger._default and self.get_logging_config():
            self.logger.setup_logger(self)
        self.logger.debug(f"[CONFIG-DONE] Loaded global config and environment '{env}'")

    # ============================================
    # LIMITS
    # ============================================

    def _get_int(self, key_path: str, default: int) -> int:
        value = self.get_config_value(key_path, default)
        try:
            return int(value)
        except (TypeError, ValueError):
            self.logger.log_warning(f"'{key_path}' is not an integer ({value!r}), using {default}", "config")
            return default

    def get_tree_cap(self) -> int:
        return self._get_int('limits.tree_cap', self.DEFAULT_TREE_CAP)

    def get_composition_budget(self) -> int:
        return self._get_int('limits.composition_budget', self.DEFAULT_COMPOSITION_BUDGET)

    def get_oracle_budget(self) -> int:
        return self._get_int('limits.oracle_budget', self.DEFAULT_ORACLE_BUDGET)

    def get_ensemble_budget(self) -> int:
        return self._get_int('limits.ensemble_budget', self.DEFAULT_ENSEMBLE_BUDGET)

    # ============================================
    # NUMERICS & SIMULATION
    # ============================================

    def get_eigensolver_config(self) -> Dict[str, Any]:
        config = {'backend': 'auto', 'native_max_dimension': 400, 'max_iterations': 50}
        config.update(self.get_config_section('linalg.eigensolver'))
        return config

    def get_parallel_workers(self) -> int:
        """Worker threads for ensembles; BANDSPECTRA_THREADS wins over the files."""
        from_env = os.environ.get('BANDSPECTRA_THREADS')
        if from_env:
            try:
                return max(1, int(from_env))
            except ValueError:
                self.logger.log_warning(f"Ignoring BANDSPECTRA_THREADS={from_env!r}", "config")
        return max(1, self._get_int('parallel.workers', 1))

    def get_max_order(self) -> int:
        return self._get_int('simulation.max_order', 8)

    def get_histogram_bins(self) -> int:
        return self._get_int('simulation.histogram_bins', 100)

    def get_hutchinson_probes(self) -> int:
        return self._get_int('simulation.hutchinson_probes', 64)

    def get_preset(self, name: str) -> Dict[str, Any]:
        presets = self.get_config_section('presets')
        if name not in presets:
            raise ValueError(f"Unknown preset: {name} (available: {', '.join(sorted(presets))})")
        return dict(presets[name])

    # ============================================
    # TEST DATA
    # ============================================

    def load_test_data(self, data_name: str) -> Dict[str, Any]:
        """
        Load test data from YAML file.

        Args:
            data_name: key in the test_data section, e.g.
                test_data:
                    combinatorics_cases: "testdata/combinatorics.yaml"
        """
        if data_name not in self.test_data:
            data_file_path = self.get_config_value(f'test_data.{data_name}', '')
            if not data_file_path:
                self.logger.warning(f"No test data file configured for '{data_name}'")
                return {}
            self.test_data[data_name] = self.config_reader.read_test_data(data_file_path)
        return self.test_data[data_name]

    # ============================================
    # SECTIONS
    # ============================================

    def get_current_environment(self) -> str:
        if not self._base_configs_loaded:
            self._load_base_configs()
        return self._environment

    def get_framework_name(self) -> str:
        return str(self.get_config_value('framework.name', 'bandspectra'))

    def get_framework_version(self) -> str:
        return str(self.get_config_value('framework.version', '0.0.0'))

    def get_logging_config(self) -> Dict[str, Any]:
        return self.get_config_section('logging')

    def get_allure_config(self) -> Dict[str, Any]:
        return self.get_config_section('allure')

    def get_output_directory(self) -> str:
        return str(self.get_config_value('simulation.output_dir', 'reports/simulations'))

    def is_allure_enabled(self) -> bool:
        return bool(self.get_allure_config().get('enabled', False))

    def get_allure_results_directory(self) -> str:
        return self.get_allure_config().get('results_dir', 'reports/allure-results')

    def get_config_summary(self) -> Dict[str, Any]:
        return {
            'environment': self.get_current_environment(),
            'version': self.get_framework_version(),
            'parallel_workers': self.get_parallel_workers(),
            'tree_cap': self.get_tree_cap(),
            'eigensolver_backend': self.get_eigensolver_config()['backend'],
            'allure_enabled': self.is_allure_enabled(),
        }
