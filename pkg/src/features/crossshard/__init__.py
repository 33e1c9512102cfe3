"""
Cross-shard feature module.

Atomic transactions across shards:
- Escrow and partial signatures from every input shard
- Threshold aggregation ordered by a sampled global committee
- Journaled output commit with replay after a crash
- Lock-based two-phase commit for the static baseline
"""

from src.features.crossshard.domain import CrossPhase, CrossShardConfig, CrossTxRecord, OrderedBatch
from src.features.crossshard.services import CrossShardLedger, TwoPhaseCoordinator, sample_committee

__all__ = [
    "CrossPhase",
    "CrossShardConfig",
    "CrossTxRecord",
    "OrderedBatch",
    "CrossShardLedger",
    "TwoPhaseCoordinator",
    "sample_committee",
]
