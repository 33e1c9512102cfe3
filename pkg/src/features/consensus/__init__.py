"""
Consensus feature module.

PBFT-style replicated decision per sequence number, used inside every shard
and by the cross-shard committee:
- Pre-prepare / prepare / commit with 2f+1 quorums
- View change with prepared certificates and exponential timer backoff
- Equivocation and authentication faults recorded as evidence
"""

from src.features.consensus.domain import ConsensusConfig, ConsensusInstance, ConsensusMessage
from src.features.consensus.services import check_agreement, leader, new_instance, quorum, step

__all__ = [
    "ConsensusConfig",
    "ConsensusInstance",
    "ConsensusMessage",
    "check_agreement",
    "leader",
    "new_instance",
    "quorum",
    "step",
]
