"""
Cross-shard feature domain layer.
"""

from src.features.crossshard.domain.enums import AbortReason, CommitProtocol, CrossPhase
from src.features.crossshard.domain.exceptions import (
    AccountLocked,
    CommitCrash,
    CrossShardError,
    NotDecided,
    ShardBusy,
)
from src.features.crossshard.domain.interfaces import OrderingCommittee
from src.features.crossshard.domain.models import (
    CommitJournal,
    CrossShardConfig,
    CrossTxRecord,
    Escrow,
    GlobalStateView,
    OrderedBatch,
)

__all__ = [
    # Enums
    "AbortReason",
    "CommitProtocol",
    "CrossPhase",
    # Exceptions
    "CrossShardError",
    "ShardBusy",
    "AccountLocked",
    "NotDecided",
    "CommitCrash",
    # Interfaces
    "OrderingCommittee",
    # Models
    "CrossShardConfig",
    "CrossTxRecord",
    "Escrow",
    "GlobalStateView",
    "OrderedBatch",
    "CommitJournal",
]
