"""
Merkle feature module.

Per-shard authenticated state: order-independent roots, single-key
membership proofs and incremental updates.
"""

from src.features.merkle.domain import MerkleProof
from src.features.merkle.services import EMPTY_ROOT, StateTree, build, prove, update, verify

__all__ = ["EMPTY_ROOT", "MerkleProof", "StateTree", "build", "prove", "update", "verify"]
