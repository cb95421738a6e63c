"""
Centralized logging utility using ReportLogger.
"""
import logging
import os
import sys
import threading
import traceback
from datetime import datetime
from logging.handlers import RotatingFileHandler
from typing import TYPE_CHECKING, Any, Dict

import colorlog

if TYPE_CHECKING:
    from src.core.utils.config_manager import ConfigManager

LOGGER_NAME = "BandSpectra"

DEFAULT_FORMATS = {
    'detailed': '%(asctime)s - %(name)s - %(levelname)s - %(funcName)s:%(lineno)d - %(message)s',
    'simple': '%(asctime)s - %(levelname)s - %(message)s',
    'json': '{"timestamp": "%(asctime)s", "level": "%(levelname)s", "message": "%(message)s"}',
}
DATEFMT = '%Y-%m-%d %H:%M:%S'


class ReportLogger:
    """Centralized logging utility shared by the library, the CLI and the tests."""

    _instance = None
    _lock = threading.Lock()

    def __new__(cls):
        """Singleton pattern implementation."""
        if cls._instance is None:
            with cls._lock:
                if cls._instance is None:
                    cls._instance = super(ReportLogger, cls).__new__(cls)
        return cls._instance

    def __init__(self):
        """Initialize logger if not already initialized."""
        if not hasattr(self, 'initialized'):
            self._logger = None
            self.log_config: Dict[str, Any] = {}
            self.formats: Dict[str, str] = dict(DEFAULT_FORMATS)
            self.initialized = True
            self._default = True
            self._setup_default_logger()

    def setup_logger(self, config_manager: 'ConfigManager'):
        """Rebuild handlers from the logging section of the configuration."""
        try:
            self.log_config = config_manager.get_logging_config()
            self._default = False
            self._logger = logging.getLogger(LOGGER_NAME)
            self._logger.setLevel(logging.DEBUG)
            self._logger.propagate = False
            self._logger.handlers.clear()
            self._setup_formatters()
            self._setup_handlers()
        except (OSError, ValueError, KeyError) as e:
            sys.stderr.write(f"Failed to setup logger: {e}; falling back to default logger\n")
            self._setup_default_logger()

    def _setup_formatters(self):
        """Collect format strings from config; unknown names fall back to the defaults."""
        self.formats = dict(DEFAULT_FORMATS)
        for name, formatter_config in (self.log_config.get('formatters') or {}).items():
            self.formats[name] = formatter_config.get('format', DEFAULT_FORMATS['simple'])

    def _formatter(self, name: str, color: bool = False) -> logging.Formatter:
        fmt = self.formats.get(name, self.formats['simple'])
        if color:
            return colorlog.ColoredFormatter('%(log_color)s' + fmt, datefmt=DATEFMT)
        return logging.Formatter(fmt, datefmt=DATEFMT)

    def _setup_handlers(self):
        """Console on stderr, rotating run log and rotating error log."""
        console_config = self.log_config.get('console', {})
        if console_config.get('enabled', True):
            console_handler = logging.StreamHandler(sys.stderr)
            console_handler.setLevel(getattr(logging, str(console_config.get('level', 'INFO')).upper(), logging.INFO))
            console_handler.setFormatter(self._formatter(console_config.get('format', 'simple'),
                                                         color=bool(console_config.get('color', False))))
            self._logger.addHandler(console_handler)

        stamp = datetime.now().strftime('%Y%m%d_%H%M%S')
        for section, prefix, default_size, default_level in (
            ('file', 'bandspectra', 10485760, 'DEBUG'),
            ('error_file', 'errors', 5242880, 'ERROR'),
        ):
            file_config = self.log_config.get(section, {})
            if not file_config.get('enabled', False):
                continue
            log_dir = file_config.get('directory', 'reports/logs')
            os.makedirs(log_dir, exist_ok=True)
            handler = RotatingFileHandler(
                os.path.join(log_dir, f"{prefix}_{stamp}.log"),
                maxBytes=file_config.get('max_size', default_size),
                backupCount=file_config.get('backup_count', 3),
                encoding=file_config.get('encoding', 'utf-8'),
            )
            handler.setLevel(getattr(logging, str(file_config.get('level', default_level)).upper(), logging.DEBUG))
            handler.setFormatter(self._formatter(file_config.get('format', 'detailed')))
            self._logger.addHandler(handler)

    def _setup_default_logger(self):
        """Console-only logger used until configuration is loaded."""
        self._logger = logging.getLogger(LOGGER_NAME)
        self._logger.setLevel(logging.INFO)
        self._logger.propagate = False
        self._logger.handlers.clear()
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(logging.INFO)
        console_handler.setFormatter(logging.Formatter(DEFAULT_FORMATS['simple'], datefmt=DATEFMT))
        self._logger.addHandler(console_handler)

    def debug(self, message: str, *args, **kwargs):
        self._logger.debug(message, *args, **kwargs)

    def info(self, message: str, *args, **kwargs):
        self._logger.info(message, *args, **kwargs)

    def warning(self, message: str, *args, **kwargs):
        self._logger.warning(message, *args, **kwargs)

    def error(self, message: str, *args, **kwargs):
        self._logger.error(message, *args, **kwargs)

    # ============================================
    # Domain helpers
    # ============================================

    def log_check(self, name: str, passed: bool, detail: str = ""):
        """Log the outcome of one named verification check."""
        status = "[OK] PASSED" if passed else "[FAIL] FAILED"
        suffix = f" ({detail})" if detail else ""
        if passed:
            self.info(f"[CHECK] {name} - {status}{suffix}")
        else:
            self.error(f"[CHECK] {name} - {status}{suffix}")

    def log_verification(self, verification: str, result: bool):
        """Log verification result."""
        status = "[OK] PASSED" if result else "[FAIL] FAILED"
        self.debug(f"[VERIFY] {verification} - {status}")

    def log_ensemble_start(self, config: Any):
        self.info(f"[ENSEMBLE] Starting {config}")

    def log_replicate(self, index: int, seconds: float):
        self.info(f"[ENSEMBLE] Replicate {index} finished in {seconds:.3f}s")

    def log_budget(self, kind: str, requested: int, cap: int):
        self.error(f"[BUDGET] {kind}: requested {requested} exceeds cap {cap}")

    def log_error(self, error: Exception, context: str = ""):
        """Log error with context, stack trace at debug level."""
        error_msg = f"Error in {context}: {str(error)}" if context else f"Error: {str(error)}"
        self.error(error_msg)
        self.debug(f"Stack trace:\n{traceback.format_exc()}")

    def log_warning(self, warning: str, context: str = ""):
        warning_msg = f"[WARNING] Warning in {context}: {warning}" if context else f"[WARNING] Warning: {warning}"
        self.warning(warning_msg)

    def log_suite_start(self, suite_name: str, check_count: int):
        self.info(f"[SUITE] Starting suite: {suite_name} ({check_count} checks)")

    def log_suite_end(self, suite_name: str, passed: int, failed: int, duration: float):
        total = passed + failed
        pass_rate = (passed / total * 100) if total > 0 else 0
        self.info(f"[SUITE] Completed: {suite_name}")
        self.info(f"[SUITE] Results: {passed} passed, {failed} failed ({pass_rate:.1f}%)")
        self.info(f"[SUITE] Duration: {duration:.2f} seconds")

    def set_log_level(self, level: str):
        """Set console verbosity, e.g. from --verbose / --quiet."""
        log_level = getattr(logging, level.upper(), logging.INFO)
        self._logger.setLevel(min(log_level, self._logger.level))
        for handler in self._logger.handlers:
            if not isinstance(handler, logging.FileHandler):
                handler.setLevel(log_level)
