"""
Domain models for the merkle feature.
"""

from typing import Tuple

from pydantic import BaseModel, ConfigDict, Field

from src.features.ledger.domain import Digest
from src.features.merkle.domain.enums import SiblingSide


class ProofStep(BaseModel):
    """One sibling digest on the path from a leaf to the root."""
    model_config = ConfigDict(frozen=True)

    sibling: Digest
    side: SiblingSide


class MerkleProof(BaseModel):
    """Membership proof for a single key."""
    model_config = ConfigDict(frozen=True)

    key: Digest
    value: Digest
    path: Tuple[ProofStep, ...] = Field(default_factory=tuple)
    root_binding: Digest = Field(..., description="Root the proof was produced against")
