"""
Pytest configuration and fixtures for the bandspectra test suites.
Implements config hierarchy: Global → Environment → CLI
"""
import shutil
from pathlib import Path

import numpy as np
import pytest

from src.core.utils.allure_environment_helper import AllureEnvironmentHelper
from src.core.utils.config_manager import ConfigManager
from src.core.utils.report_logger import ReportLogger
from src.core.utils.run_context import RunContext
from src.core.utils.verification import Verification

# ============================================================================
# GLOBAL INSTANCES
# ============================================================================
logger = ReportLogger()
config_manager = ConfigManager(logger)
config_manager._load_base_configs()
allure_helper = AllureEnvironmentHelper()


# ============================================================================
# PYTEST CONFIGURATION
# ============================================================================
def pytest_addoption(parser):
    """Add custom command line options"""
    parser.addoption(
        "--env",
        action="store",
        default=None,
        help="Environment to run tests on (overrides default_environment in config.yaml)"
    )


def pytest_ignore_collect(collection_path, config):
    """Never collect toolkit sources under src/."""
    try:
        relative = collection_path.relative_to(config.rootpath)
    except ValueError:
        return None
    if relative.parts[:1] == ("src",):
        return True
    return None


def pytest_configure(config):
    """
    Configure pytest using config.yaml.
    """
    environment = config.getoption("--env")
    if environment:
        config_manager.set_environment(environment)

    # ============================================
    # 1. ALLURE SETTINGS
    # ============================================
    is_worker = hasattr(config, "workerinput")
    if config_manager.is_allure_enabled() and not is_worker:
        results_dir = config_manager.get_allure_results_directory()
        if config_manager.get_allure_config().get('clean_on_start', False):
            results_path = Path(results_dir)
            if results_path.exists():
                logger.info(f"[ALLURE] Cleaning results directory: {results_dir}")
                shutil.rmtree(results_path)
            results_path.mkdir(parents=True, exist_ok=True)
        logger.info(f"[ALLURE] Results directory: {results_dir}")

    # ============================================
    # 2. MARKERS
    # ============================================
    markers = config_manager.get_config_section('markers')
    for marker_name, description in markers.items():
        config.addinivalue_line("markers", f"{marker_name}: {description}")


def pytest_generate_tests(metafunc):
    """Parametrize fixtures named after lists in the files of the test_data section."""
    data_files = config_manager.get_config_section('test_data')
    for config_key in data_files:
        data = config_manager.load_test_data(config_key)
        if not isinstance(data, dict):
            continue
        for nested_key, nested_data in data.items():
            if nested_key in metafunc.fixturenames and isinstance(nested_data, list):
                ids = [d.get("test_id", f"{nested_key}_{i}") for i, d in enumerate(nested_data)]
                metafunc.parametrize(nested_key, nested_data, ids=ids)
                logger.debug(f"[PARAM] Parametrized '{nested_key}' with {len(nested_data)} items from '{config_key}'")


# ============================================================================
# SESSION FIXTURES
# ============================================================================

@pytest.fixture(scope="session", autouse=True)
def suite_setup():
    """Write the allure environment and log the configuration summary."""
    if config_manager.is_allure_enabled():
        allure_helper.setup_allure_environment(config_manager.get_allure_results_directory())

    summary = config_manager.get_config_summary()
    logger.info("[CONFIG] Toolkit Configuration:")
    logger.info(f"   ├─ Environment: {summary.get('environment')}")
    logger.info(f"   ├─ Version: {summary.get('version')}")
    logger.info(f"   ├─ Workers: {summary.get('parallel_workers')}")
    logger.info(f"   ├─ Tree cap: {summary.get('tree_cap')}")
    logger.info(f"   ├─ Eigensolver: {summary.get('eigensolver_backend')}")
    logger.info(f"   └─ Allure: {summary.get('allure_enabled')}")
    yield


@pytest.fixture(scope="session")
def run_context() -> RunContext:
    """Invocation metadata shared by tests that write reports."""
    return RunContext(["pytest"])


# ============================================================================
# FUNCTION FIXTURES
# ============================================================================

@pytest.fixture(autouse=True)
def reset_overrides():
    """Tests may set config overrides; none survive the test."""
    yield
    config_manager.clear_overrides()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def verifier() -> Verification:
    return Verification()
