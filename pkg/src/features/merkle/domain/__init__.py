"""
Merkle feature domain layer.
"""

from src.features.merkle.domain.enums import SiblingSide
from src.features.merkle.domain.exceptions import DuplicateKey, KeyAbsent, MerkleError
from src.features.merkle.domain.models import MerkleProof, ProofStep

__all__ = [
    "SiblingSide",
    "MerkleError",
    "DuplicateKey",
    "KeyAbsent",
    "MerkleProof",
    "ProofStep",
]
