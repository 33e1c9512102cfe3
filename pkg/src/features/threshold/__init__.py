"""
Threshold feature module.

Simulated t-of-n threshold signatures: deterministic key dealing, partial
signing, filtered combination and aggregate verification.
"""

from src.features.threshold.domain import PartialSignature, ThresholdSignatureValue
from src.features.threshold.services import ShareRegistry, SignerView, keygen

__all__ = ["PartialSignature", "ThresholdSignatureValue", "ShareRegistry", "SignerView", "keygen"]
