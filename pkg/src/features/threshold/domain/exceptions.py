"""
Exceptions specific to the threshold feature.
"""

from src.shared.exceptions import AppError


class ThresholdError(AppError):
    """Base exception for threshold signature errors."""

    def __init__(self, message: str, code: str = "THRESHOLD_ERROR"):
        super().__init__(message, code=code)


class BadThreshold(ThresholdError):
    """Raised when t is outside 1..n."""

    def __init__(self, n: int, t: int):
        self.n = n
        self.t = t
        super().__init__(f"Threshold {t} is invalid for {n} signers.", code="BAD_THRESHOLD")


class UnknownSigner(ThresholdError):
    """Raised when a signer holds no share in the registry."""

    def __init__(self, signer_id: int, group_id: str):
        self.signer_id = signer_id
        super().__init__(f"Signer {signer_id} has no share in group {group_id}.", code="UNKNOWN_SIGNER")


class InsufficientShares(ThresholdError):
    """Raised when fewer than t valid distinct partials remain after filtering."""

    def __init__(self, valid: int, required: int):
        self.valid = valid
        self.required = required
        super().__init__(f"Only {valid} valid partials, {required} required.", code="INSUFFICIENT_SHARES")


class MixedMessages(ThresholdError):
    """Raised when partials for different messages are combined."""

    def __init__(self):
        super().__init__("Partials sign different messages.", code="MIXED_MESSAGES")
