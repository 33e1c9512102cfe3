"""
State-sync feature services.
"""

from src.features.statesync.services.audit import NonceIndex, audit_commit, decision_of
from src.features.statesync.services.dispute import DisputeManager, ballot_digest
from src.features.statesync.services.gossip import (
    GossipMesh,
    check_message,
    default_fanout,
    gossip_round,
    make_message,
    receive,
)
from src.features.statesync.services.rollback import rollback

__all__ = [
    "GossipMesh",
    "gossip_round",
    "make_message",
    "check_message",
    "receive",
    "default_fanout",
    "NonceIndex",
    "audit_commit",
    "decision_of",
    "DisputeManager",
    "ballot_digest",
    "rollback",
]
