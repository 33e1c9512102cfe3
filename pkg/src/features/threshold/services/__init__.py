"""
Services layer for the threshold feature.
"""

from src.features.threshold.services.registry import (
    ShareRegistry,
    SignerView,
    combine,
    keygen,
    partial_sign,
    required_signers,
    verify_partial,
    verify_threshold,
)

__all__ = [
    "ShareRegistry",
    "SignerView",
    "keygen",
    "partial_sign",
    "verify_partial",
    "combine",
    "verify_threshold",
    "required_signers",
]
