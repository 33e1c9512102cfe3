"""
Domain models for the threshold feature.
"""

from typing import Tuple

from pydantic import BaseModel, ConfigDict, Field

from src.features.ledger.domain import Digest


class PartialSignature(BaseModel):
    """One signer's contribution over a message digest."""
    model_config = ConfigDict(frozen=True)

    signer_id: int
    message_digest: Digest
    sig: Digest


class ThresholdSignatureValue(BaseModel):
    """Aggregate over at least t partials, signers listed in ascending order."""
    model_config = ConfigDict(frozen=True)

    message_digest: Digest
    signer_set: Tuple[int, ...] = Field(default_factory=tuple)
    agg: Digest
