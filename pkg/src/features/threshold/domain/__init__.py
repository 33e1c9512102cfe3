"""
Threshold feature domain layer.
"""

from src.features.threshold.domain.enums import ThresholdPolicy
from src.features.threshold.domain.exceptions import (
    BadThreshold,
    InsufficientShares,
    MixedMessages,
    ThresholdError,
    UnknownSigner,
)
from src.features.threshold.domain.interfaces import ThresholdScheme
from src.features.threshold.domain.models import PartialSignature, ThresholdSignatureValue

__all__ = [
    "ThresholdPolicy",
    "ThresholdError",
    "BadThreshold",
    "UnknownSigner",
    "InsufficientShares",
    "MixedMessages",
    "ThresholdScheme",
    "PartialSignature",
    "ThresholdSignatureValue",
]
