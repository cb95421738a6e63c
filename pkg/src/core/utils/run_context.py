"""
Run context for thread-safe invocation metadata.
"""
import shlex
import threading
from typing import Any, Dict, List, Optional

from src.core.utils.config_manager import ConfigManager
from src.core.utils.report_logger import ReportLogger


class RunContext:
    """Thread-safe key/value store describing the current invocation."""

    def __init__(self, argv: Optional[List[str]] = None):
        self.logger = ReportLogger()
        self._lock = threading.RLock()
        self._data: Dict[str, Any] = {}
        if argv is not None:
            self.set_invocation(argv)

    def set(self, key: str, value: Any):
        with self._lock:
            self._data[key] = value
            self.logger.debug(f"Run context set: {key} = {value}")

    def get(self, key: str, default: Any = None) -> Any:
        with self._lock:
            return self._data.get(key, default)

    def has(self, key: str) -> bool:
        with self._lock:
            return key in self._data

    def update(self, data: Dict[str, Any]):
        with self._lock:
            self._data.update(data)

    def get_all(self) -> Dict[str, Any]:
        with self._lock:
            return self._data.copy()

    def clear(self):
        with self._lock:
            self._data.clear()

    def set_invocation(self, argv: List[str]):
        """Record the command line as one shell-quoted string."""
        self.set("invocation", " ".join(shlex.quote(arg) for arg in argv))

    def get_invocation(self) -> str:
        return self.get("invocation", "")

    def metadata(self) -> Dict[str, Any]:
        """Invocation, toolkit version and environment, the header of every output file."""
        config_manager = ConfigManager()
        return {
            'invocation': self.get_invocation(),
            'toolkit': config_manager.get_framework_name(),
            'version': config_manager.get_framework_version(),
            'environment': self.get('environment') or config_manager.get_current_environment(),
        }
