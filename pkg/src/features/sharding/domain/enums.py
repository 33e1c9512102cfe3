"""
Enumerations for the sharding feature.
"""

from enum import Enum


class ShardStatus(str, Enum):
    """Lifecycle of a shard."""
    ACTIVE = "active"
    SPLITTING = "splitting"
    MERGING = "merging"
    RETIRED = "retired"


class ActionKind(str, Enum):
    """Management decision for one evaluation."""
    SPLIT = "split"
    MERGE = "merge"
    NONE = "none"


class EvaluationMode(str, Enum):
    """When management runs: at every epoch or every n_c commits."""
    EPOCH = "epoch"
    STRATEGY = "strategy"


class RedistributionScope(str, Enum):
    """Which shards take part in account redistribution after a change."""
    AFFECTED = "affected"
    GLOBAL = "global"


class ManagementStrategy(str, Enum):
    """Named (n_c, s) presets for strategy-mode evaluation."""
    NONE = "none"
    LIGHT = "light"
    MODERATE = "moderate"
    AGGRESSIVE = "aggressive"
    VERY = "very"
    ULTRA = "ultra"
