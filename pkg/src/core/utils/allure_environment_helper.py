"""
Allure environment helper for recording the numeric stack of a test run.
"""
import json
import os
import platform
from typing import Dict

import joblib
import numpy
import scipy

from src.core.utils.config_manager import ConfigManager
from src.core.utils.report_logger import ReportLogger


class AllureEnvironmentHelper:
    """Writes environment.properties and categories.json into the allure results directory."""

    def __init__(self):
        self.logger = ReportLogger()
        self.config_manager = ConfigManager(self.logger)

    def create_environment_file(self, output_dir: str = "reports/allure-results") -> str:
        """Create Allure environment file."""
        try:
            os.makedirs(output_dir, exist_ok=True)
            env_file_path = os.path.join(output_dir, "environment.properties")
            with open(env_file_path, 'w', encoding='utf-8') as f:
                for key, value in self._get_environment_data().items():
                    f.write(f"{key}={value}\n")
            self.logger.info(f"Created Allure environment file: {env_file_path}")
            return env_file_path
        except OSError as e:
            self.logger.log_error(e, "create_environment_file")
            return ""

    def _get_environment_data(self) -> Dict[str, str]:
        eigensolver = self.config_manager.get_eigensolver_config()
        return {
            "OS": platform.system(),
            "Architecture": platform.machine(),
            "Python Version": platform.python_version(),
            "NumPy Version": numpy.__version__,
            "SciPy Version": scipy.__version__,
            "Joblib Version": joblib.__version__,
            "Environment": self.config_manager.get_current_environment(),
            "Toolkit": self.config_manager.get_framework_name(),
            "Toolkit Version": self.config_manager.get_framework_version(),
            "Eigensolver Backend": str(eigensolver['backend']),
            "Worker Threads": str(self.config_manager.get_parallel_workers()),
        }

    def create_categories_file(self, output_dir: str = "reports/allure-results") -> str:
        """Group failures by the exception that caused them."""
        try:
            os.makedirs(output_dir, exist_ok=True)
            categories_file_path = os.path.join(output_dir, "categories.json")
            categories = [
                {"name": "Value mismatches", "matchedStatuses": ["failed"], "messageRegex": ".*AssertionError.*"},
                {"name": "Budget exceeded", "matchedStatuses": ["broken"],
                 "messageRegex": ".*(BudgetExceededError|EnumerationCapError).*"},
                {"name": "Numerical failures", "matchedStatuses": ["broken"], "messageRegex": ".*ConvergenceError.*"},
                {"name": "Skipped Tests", "matchedStatuses": ["skipped"], "messageRegex": ".*"},
            ]
            with open(categories_file_path, 'w', encoding='utf-8') as f:
                json.dump(categories, f, indent=2)
            self.logger.info(f"Created Allure categories file: {categories_file_path}")
            return categories_file_path
        except OSError as e:
            self.logger.log_error(e, "create_categories_file")
            return ""

    def setup_allure_environment(self, output_dir: str = "reports/allure-results") -> Dict[str, str]:
        """Setup complete Allure environment."""
        self.logger.info("Setting up Allure environment")
        files = {
            "environment_file": self.create_environment_file(output_dir),
            "categories_file": self.create_categories_file(output_dir),
        }
        self.logger.info("Allure environment setup completed")
        return files
