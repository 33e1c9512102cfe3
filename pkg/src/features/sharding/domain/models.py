"""
Domain models for the sharding feature.
"""

from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.features.ledger.domain import Digest, ShardState
from src.features.merkle.services import StateTree, tree_for_state
from src.features.sharding.constants import (
    ACCESS_KINDS,
    DEFAULT_COOLDOWN_EPOCHS,
    DEFAULT_EPOCH_US,
    DEFAULT_MERGE_EPOCHS,
    DEFAULT_MERGE_FANOUT,
    DEFAULT_MERGE_THRESHOLD,
    DEFAULT_SHARD_CAPACITY,
    DEFAULT_SIMILARITY,
    DEFAULT_SPLIT_FANOUT,
    DEFAULT_SPLIT_THRESHOLD,
    MIN_VALIDATORS,
    STRATEGY_PARAMETERS,
)
from src.features.sharding.domain.enums import (
    ActionKind,
    EvaluationMode,
    ManagementStrategy,
    RedistributionScope,
    ShardStatus,
)


class Shard(BaseModel):
    """A partition of validators and accounts with its own state tree."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    shard_id: int = Field(..., ge=0)
    validator_ids: Tuple[int, ...]
    state: ShardState
    tree: StateTree
    v: float = Field(default=0.0, ge=0, le=100)
    u: float = Field(default=0.0, ge=0, le=100)
    status: ShardStatus = ShardStatus.ACTIVE
    cooldown_until: int = 0
    lineage: Tuple[int, ...] = ()
    stake: float = Field(default=100.0, ge=0)
    reputation: float = Field(default=1.0, ge=0, le=1)

    @model_validator(mode="after")
    def validate_group_size(self) -> "Shard":
        if self.status is ShardStatus.ACTIVE and len(self.validator_ids) < MIN_VALIDATORS:
            raise ValueError(f"Active shards need at least {MIN_VALIDATORS} validators")
        return self

    @classmethod
    def create(cls, shard_id: int, validator_ids: Tuple[int, ...], state: ShardState, **kwargs) -> "Shard":
        return cls(shard_id=shard_id, validator_ids=tuple(validator_ids), state=state, tree=tree_for_state(state), **kwargs)

    @property
    def root(self) -> Digest:
        return self.tree.root

    @property
    def accounts(self) -> List[int]:
        return sorted(self.state.balances)

    @property
    def active(self) -> bool:
        return self.status is ShardStatus.ACTIVE


class EpochCounters(BaseModel):
    """Raw per-shard activity over one evaluation window."""
    model_config = ConfigDict(frozen=True)

    shard_id: int
    processed: int = Field(default=0, ge=0)
    busy_us: int = Field(default=0, ge=0, description="Validator busy time summed over the group")
    window_us: int = Field(..., gt=0)
    capacity: int = Field(..., gt=0, description="Work items the shard can finish in the window")
    validators: int = Field(..., ge=1)
    backlog: int = Field(default=0, ge=0)
    access: Tuple[int, ...] = Field(default=(0,) * ACCESS_KINDS)


class LoadGauge(BaseModel):
    """Normalized load of one shard: v and u as percentages of capacity."""
    model_config = ConfigDict(frozen=True)

    shard_id: int
    v: float = Field(..., ge=0, le=100)
    u: float = Field(..., ge=0, le=100)
    backlog: int = 0
    access: Tuple[int, ...] = Field(default=(0,) * ACCESS_KINDS)

    @property
    def load(self) -> float:
        return max(self.v, self.u)


class ShardMgrConfig(BaseModel):
    """Thresholds and cadence of adaptive shard management."""
    model_config = ConfigDict(frozen=True)

    enabled: bool = True
    split_threshold: float = Field(default=DEFAULT_SPLIT_THRESHOLD, ge=60, le=90)
    merge_threshold: float = Field(default=DEFAULT_MERGE_THRESHOLD, ge=20, le=40)
    merge_epochs: int = Field(default=DEFAULT_MERGE_EPOCHS, ge=1)
    cooldown_epochs: int = Field(default=DEFAULT_COOLDOWN_EPOCHS, ge=0)
    split_fanout: int = Field(default=DEFAULT_SPLIT_FANOUT, ge=2)
    merge_fanout: int = Field(default=DEFAULT_MERGE_FANOUT, ge=2)
    similarity_threshold: float = Field(default=DEFAULT_SIMILARITY, ge=0, le=1)
    epoch_length_us: int = Field(default=DEFAULT_EPOCH_US, gt=0)
    shard_capacity: int = Field(default=DEFAULT_SHARD_CAPACITY, gt=0)
    evaluation: EvaluationMode = EvaluationMode.EPOCH
    commits_between: Optional[int] = Field(default=None, gt=0)
    max_adjusted: Optional[int] = Field(default=None, gt=0)
    redistribute: RedistributionScope = RedistributionScope.GLOBAL
    reconfig_delay_us: int = Field(default=0, ge=0)
    max_shards: Optional[int] = Field(default=None, gt=0)

    @model_validator(mode="after")
    def validate_thresholds(self) -> "ShardMgrConfig":
        if self.merge_threshold >= self.split_threshold:
            raise ValueError("merge_threshold must be below split_threshold")
        if self.evaluation is EvaluationMode.STRATEGY and self.commits_between is None:
            raise ValueError("strategy evaluation needs commits_between")
        return self

    @classmethod
    def for_strategy(cls, strategy: ManagementStrategy, **overrides) -> "ShardMgrConfig":
        """Preset (n_c, s) evaluation; `none` disables management."""
        parameters = STRATEGY_PARAMETERS[ManagementStrategy(strategy).value]
        if parameters is None:
            return cls(enabled=False, **overrides)
        commits, adjusted = parameters
        return cls(
            evaluation=EvaluationMode.STRATEGY,
            commits_between=commits,
            max_adjusted=adjusted,
            **overrides,
        )


class MgmtAction(BaseModel):
    """One split or merge decided at an evaluation."""
    model_config = ConfigDict(frozen=True)

    kind: ActionKind
    shards: Tuple[int, ...] = ()
    k: int = 0
    epoch: int = 0

    @model_validator(mode="after")
    def validate_shape(self) -> "MgmtAction":
        if self.kind is ActionKind.MERGE and len(set(self.shards)) < 2:
            raise ValueError("Merge groups contain at least two shards")
        if self.kind is ActionKind.SPLIT and (len(self.shards) != 1 or self.k < 2):
            raise ValueError("Split names one shard and k >= 2")
        return self
