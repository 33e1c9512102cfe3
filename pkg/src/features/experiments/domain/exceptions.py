"""
Exceptions specific to the experiments feature.
"""

from src.shared.exceptions import AppError


class ExperimentError(AppError):
    """Base exception for metric and scenario errors."""

    def __init__(self, message: str, code: str = "EXPERIMENT_ERROR"):
        super().__init__(message, code=code)


class EmptyInput(ExperimentError):
    """Raised when a metric is asked about nothing."""

    def __init__(self, what: str = "loads"):
        super().__init__(f"Cannot compute a metric over empty {what}.", code="EMPTY_INPUT")


class BatchIncomplete(ExperimentError):
    """Raised when batch latency is requested before every transaction is final."""

    def __init__(self, pending: int):
        self.pending = pending
        super().__init__(f"{pending} transaction(s) of the batch are not final.", code="BATCH_INCOMPLETE")


class BadParam(ExperimentError):
    """Raised when an approximation parameter is out of range."""

    def __init__(self, name: str, value):
        self.name = name
        super().__init__(f"Parameter {name} must be at least 1, got {value}.", code="BAD_PARAM")
