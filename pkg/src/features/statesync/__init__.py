"""
State-sync feature module.

Global state view and disputes:
- Push gossip of signed shard roots with proof checks
- Committed-nonce audit producing replay evidence
- Stake-weighted challenges with rollback and slashing
"""

from src.features.statesync.domain import Challenge, PenaltyLedger, SyncConfig, Verdict
from src.features.statesync.services import DisputeManager, GossipMesh, NonceIndex, rollback

__all__ = [
    "Challenge",
    "PenaltyLedger",
    "SyncConfig",
    "Verdict",
    "DisputeManager",
    "GossipMesh",
    "NonceIndex",
    "rollback",
]
