"""
Configuration reader utility for reading YAML configuration files.
"""
import os
import re
from typing import Any, Dict, List

import yaml

DEFAULT_CONFIG_DIR = os.path.normpath(os.path.join(os.path.dirname(__file__), "..", "..", "config"))


class ConfigReader:
    """Utility class for reading configuration files."""

    ENV_PATTERN = re.compile(r'\$\{([^}:]+)(?::([^}]*))?\}')

    def __init__(self, config_dir: str = DEFAULT_CONFIG_DIR, logger=None):
        self.config_dir = config_dir
        self.logger = logger

    def read_yaml(self, file_path: str) -> Dict[str, Any]:
        """Read YAML file relative to the config directory and return its contents."""
        return self._read(os.path.join(self.config_dir, file_path))

    def _read(self, full_path: str) -> Dict[str, Any]:
        try:
            self.logger.debug(f"Reading YAML file: {full_path}")
            with open(full_path, 'r', encoding='utf-8') as file:
                content = yaml.safe_load(file)
                return content if isinstance(content, dict) else {}
        except FileNotFoundError:
            self.logger.warning(f"Configuration file not found: {full_path}")
            return {}
        except yaml.YAMLError as e:
            self.logger.error(f"Error parsing YAML file {full_path}: {str(e)}")
            return {}
        except OSError as e:
            self.logger.error(f"Error reading configuration file {full_path}: {str(e)}")
            return {}

    # ============================================
    # Environment Variable Support
    # ============================================

    def expand_env_vars_in_config(self, config: Any) -> Any:
        """
        Expand environment variables in entire config.
        Supports ${VAR_NAME} and ${VAR_NAME:default} syntax.

        A string that is exactly one reference is re-parsed as YAML scalar, so
        "${BANDSPECTRA_THREADS:4}" yields the integer 4.
        """
        def replace_var(match):
            return os.environ.get(match.group(1), match.group(2) or "")

        def expand_value(value):
            if isinstance(value, str):
                expanded = self.ENV_PATTERN.sub(replace_var, value)
                if expanded != value and self.ENV_PATTERN.fullmatch(value):
                    try:
                        return yaml.safe_load(expanded) if expanded else None
                    except yaml.YAMLError:
                        return expanded
                return expanded
            if isinstance(value, dict):
                return {k: expand_value(v) for k, v in value.items()}
            if isinstance(value, list):
                return [expand_value(item) for item in value]
            return value

        return expand_value(config)

    def read_yaml_with_env_expansion(self, file_path: str) -> Dict[str, Any]:
        """Read YAML file and expand environment variables."""
        return self.expand_env_vars_in_config(self.read_yaml(file_path))

    def read_main_config(self) -> Dict[str, Any]:
        """Read main configuration file."""
        return self.read_yaml_with_env_expansion("config.yaml")

    def read_environment_config(self, environment: str) -> Dict[str, Any]:
        """Read environment-specific configuration with env var expansion."""
        return self.read_yaml_with_env_expansion(f"environment/{environment}.yaml")

    def read_test_data(self, data_file_path: str) -> Dict[str, Any]:
        """Read a test data file; paths starting with testdata/ resolve against the project root."""
        if data_file_path.startswith("testdata/"):
            project_root = os.path.dirname(os.path.dirname(self.config_dir))
            return self._read(os.path.join(project_root, data_file_path))
        return self.read_yaml(data_file_path)

    def list_environments(self) -> List[str]:
        """Names of the environment files available under environment/."""
        env_dir = os.path.join(self.config_dir, "environment")
        if not os.path.isdir(env_dir):
            return []
        return sorted(os.path.splitext(f)[0] for f in os.listdir(env_dir) if f.endswith(('.yaml', '.yml')))
