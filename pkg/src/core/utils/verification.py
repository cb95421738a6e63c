"""
Verification utility for numeric checks and validations.
"""
import math
from typing import Any, Callable

from src.core.utils.report_logger import ReportLogger


class Verification:
    """Soft checks: each method logs its outcome and returns a bool instead of raising."""

    def __init__(self):
        self.logger = ReportLogger()

    def verify_equals(self, actual: Any, expected: Any, message: str = "") -> bool:
        """Verify that actual equals expected (exact, suitable for Fractions and integers)."""
        try:
            result = bool(actual == expected)
            self.logger.log_verification(message or "Equals verification", result)
            if not result:
                self.logger.error(f"Verification failed: expected {expected}, got {actual}")
            return result
        except Exception as e:
            self.logger.log_error(e, "verify_equals")
            return False

    def verify_close(self, actual: float, expected: float, rel_tol: float = 1e-9,
                     abs_tol: float = 0.0, message: str = "") -> bool:
        """Verify |actual - expected| <= max(rel_tol * max(|actual|, |expected|), abs_tol)."""
        try:
            result = math.isclose(float(actual), float(expected), rel_tol=rel_tol, abs_tol=abs_tol)
            self.logger.log_verification(message or "Close verification", result)
            if not result:
                self.logger.error(f"Verification failed: {actual} is not within rel {rel_tol} / abs {abs_tol} "
                                  f"of {expected}")
            return result
        except Exception as e:
            self.logger.log_error(e, "verify_close")
            return False

    def verify_true(self, condition: bool, message: str = "") -> bool:
        """Verify that condition is true."""
        result = bool(condition)
        self.logger.log_verification(message or "True verification", result)
        if not result:
            self.logger.error(f"Verification failed: {message or 'condition'} is false")
        return result

    def verify_less_equal(self, actual: float, bound: float, message: str = "") -> bool:
        """Verify that actual <= bound."""
        try:
            result = actual <= bound
            self.logger.log_verification(message or "Less-equal verification", result)
            if not result:
                self.logger.error(f"Verification failed: {actual} > {bound}")
            return result
        except Exception as e:
            self.logger.log_error(e, "verify_less_equal")
            return False

    def verify_within_range(self, value: float, min_val: float, max_val: float, message: str = "") -> bool:
        """Verify that value is within [min_val, max_val]."""
        try:
            result = min_val <= value <= max_val
            self.logger.log_verification(message or "Within range verification", result)
            if not result:
                self.logger.error(f"Verification failed: {value} is not within range [{min_val}, {max_val}]")
            return result
        except Exception as e:
            self.logger.log_error(e, "verify_within_range")
            return False

    def verify_decreasing(self, values, message: str = "") -> bool:
        """Verify that values are strictly decreasing."""
        values = list(values)
        result = all(a > b for a, b in zip(values, values[1:]))
        self.logger.log_verification(message or "Decreasing verification", result)
        if not result:
            self.logger.error(f"Verification failed: {values} is not strictly decreasing")
        return result

    def verify_exception_raised(self, func: Callable, *args, exception_type: type = Exception,
                                message: str = "", **kwargs) -> bool:
        """Verify that function raises expected exception."""
        try:
            func(*args, **kwargs)
            self.logger.error(f"Verification failed: expected {exception_type.__name__} was not raised")
            return False
        except exception_type:
            self.logger.log_verification(message or "Exception raised verification", True)
            return True
        except Exception as e:
            self.logger.error(f"Verification failed: expected {exception_type.__name__}, got {type(e).__name__}")
            return False
