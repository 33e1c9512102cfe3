"""
Sharding feature domain layer.
"""

from src.features.sharding.domain.enums import (
    ActionKind,
    EvaluationMode,
    ManagementStrategy,
    RedistributionScope,
    ShardStatus,
)
from src.features.sharding.domain.exceptions import OverlappingAccounts, ShardingError, TooFewValidators
from src.features.sharding.domain.models import (
    EpochCounters,
    LoadGauge,
    MgmtAction,
    Shard,
    ShardMgrConfig,
)

__all__ = [
    # Enums
    "ActionKind",
    "EvaluationMode",
    "ManagementStrategy",
    "RedistributionScope",
    "ShardStatus",
    # Exceptions
    "ShardingError",
    "TooFewValidators",
    "OverlappingAccounts",
    # Models
    "EpochCounters",
    "LoadGauge",
    "MgmtAction",
    "Shard",
    "ShardMgrConfig",
]
