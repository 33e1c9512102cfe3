"""
Domain models for the simulation feature.
"""

from typing import Any, FrozenSet, NamedTuple, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.features.crossshard.domain import CrossShardConfig
from src.features.ledger.domain import Transaction
from src.features.sharding.domain import ShardMgrConfig
from src.features.simulation.constants import (
    DEFAULT_ACCOUNT_COUNT,
    DEFAULT_AMOUNT_MAX,
    DEFAULT_AMOUNT_MIN,
    DEFAULT_BASE_LATENCY_US,
    DEFAULT_BLOCK_CAPACITY,
    DEFAULT_BLOCK_INTERVAL_US,
    DEFAULT_BLOCK_OVERHEAD_US,
    DEFAULT_DELTA_US,
    DEFAULT_DURATION_US,
    DEFAULT_INITIAL_BALANCE,
    DEFAULT_JITTER_US,
    DEFAULT_MAX_DEFERRALS,
    DEFAULT_RATE,
    DEFAULT_SHARD_COUNT,
    DEFAULT_TX_COST_US,
    DEFAULT_VALIDATORS_PER_SHARD,
    DEFAULT_ZIPF_EXPONENT,
)
from src.features.simulation.domain.enums import ArrivalPattern, Behavior, ConsensusFidelity, RunMode
from src.features.statesync.constants import DEFAULT_GOSSIP_INTERVAL_US
from src.features.statesync.domain import SyncConfig


class SimEvent(NamedTuple):
    """
    One scheduled event.

    Tuples order by (fire_at, seq_no); seq_no is unique per scheduler, so
    the payload never takes part in comparisons.
    """
    fire_at: int
    seq_no: int
    target: str
    payload: Any


class Partition(BaseModel):
    """Nodes in `group` cannot reach the rest between start and end."""
    model_config = ConfigDict(frozen=True)

    start_us: int = Field(..., ge=0)
    end_us: int = Field(..., ge=0)
    group: FrozenSet[int]

    @model_validator(mode="after")
    def validate_window(self) -> "Partition":
        if self.end_us <= self.start_us:
            raise ValueError("Partition must end after it starts")
        return self

    def separates(self, src: int, dst: int, now: int) -> bool:
        return self.start_us <= now < self.end_us and ((src in self.group) != (dst in self.group))


class NetModel(BaseModel):
    """
    Partial-synchrony network.

    Before GST messages may be dropped, held behind partitions or delayed
    arbitrarily; from GST on every message is delivered within delta.
    """
    model_config = ConfigDict(frozen=True)

    base_latency_us: int = Field(default=DEFAULT_BASE_LATENCY_US, ge=0)
    jitter_us: int = Field(default=DEFAULT_JITTER_US, ge=0)
    delta_us: int = Field(default=DEFAULT_DELTA_US, gt=0)
    drop_rate: float = Field(default=0.0, ge=0, lt=1)
    gst_us: int = Field(default=0, ge=0)
    partitions: Tuple[Partition, ...] = ()

    @model_validator(mode="after")
    def validate_latency(self) -> "NetModel":
        if self.jitter_us > self.base_latency_us:
            raise ValueError("jitter_us cannot exceed base_latency_us")
        return self


class AdversarySpec(BaseModel):
    """Which nodes and shards misbehave, and how."""
    model_config = ConfigDict(frozen=True)

    corrupt_fraction: float = Field(default=0.0, ge=0, lt=1)
    corrupt_nodes: Tuple[int, ...] = ()
    behaviors: FrozenSet[Behavior] = frozenset()
    colluding_shards: Tuple[int, ...] = ()
    faulty_shards: Tuple[int, ...] = Field(
        default=(), description="Shards whose partial signatures are withheld or forged"
    )
    fault_rate: float = Field(default=1.0, ge=0, le=1)
    double_spend_rate: float = Field(default=0.0, ge=0, le=1)
    seed: Optional[int] = None

    def has(self, behavior: Behavior) -> bool:
        return behavior in self.behaviors


class WorkloadSpec(BaseModel):
    """Transaction stream: arrival process, account skew and cross-shard mix."""
    model_config = ConfigDict(frozen=True)

    rate: float = Field(default=DEFAULT_RATE, gt=0, description="Transactions per sim-second")
    cross_ratio: float = Field(default=0.0, ge=0, le=1)
    multi_input_ratio: float = Field(default=0.0, ge=0, le=1)
    account_count: int = Field(default=DEFAULT_ACCOUNT_COUNT, ge=2)
    zipf_exponent: float = Field(default=DEFAULT_ZIPF_EXPONENT, ge=0)
    arrival: ArrivalPattern = ArrivalPattern.POISSON
    duration_us: int = Field(default=DEFAULT_DURATION_US, gt=0)
    max_txs: Optional[int] = Field(default=None, gt=0)
    amount_min: int = Field(default=DEFAULT_AMOUNT_MIN, gt=0)
    amount_max: int = Field(default=DEFAULT_AMOUNT_MAX, gt=0)
    initial_balance: int = Field(default=DEFAULT_INITIAL_BALANCE, ge=0)
    seed: Optional[int] = None

    @model_validator(mode="after")
    def validate_amounts(self) -> "WorkloadSpec":
        if self.amount_min > self.amount_max:
            raise ValueError("amount_min cannot exceed amount_max")
        if self.arrival is ArrivalPattern.BURST and self.max_txs is None:
            raise ValueError("burst arrival needs max_txs")
        return self


class SimConfig(BaseModel):
    """Everything a run needs besides the workload and the adversary."""
    model_config = ConfigDict(frozen=True)

    seed: int = 0
    mode: RunMode = RunMode.ADAPTIVE
    shard_count: int = Field(default=DEFAULT_SHARD_COUNT, ge=1)
    validators_per_shard: int = Field(default=DEFAULT_VALIDATORS_PER_SHARD, ge=4)
    consensus: ConsensusFidelity = ConsensusFidelity.MODELED
    view_timeout_us: int = Field(default=40_000, gt=0)
    block_interval_us: int = Field(default=DEFAULT_BLOCK_INTERVAL_US, gt=0)
    block_capacity: int = Field(default=DEFAULT_BLOCK_CAPACITY, gt=0)
    tx_cost_us: int = Field(default=DEFAULT_TX_COST_US, ge=0)
    block_overhead_us: int = Field(default=DEFAULT_BLOCK_OVERHEAD_US, ge=0)
    gossip_interval_us: int = Field(default=DEFAULT_GOSSIP_INTERVAL_US, gt=0)
    max_deferrals: int = Field(default=DEFAULT_MAX_DEFERRALS, ge=0)
    network: NetModel = Field(default_factory=NetModel)
    management: ShardMgrConfig = Field(default_factory=ShardMgrConfig)
    crossshard: CrossShardConfig = Field(default_factory=CrossShardConfig)
    sync: SyncConfig = Field(default_factory=SyncConfig)

    @property
    def epoch_length_us(self) -> int:
        return self.management.epoch_length_us

    @property
    def adaptive(self) -> bool:
        return self.mode is RunMode.ADAPTIVE


class RunSummary(BaseModel):
    """Counters reported at the end of a run."""

    mode: RunMode
    until_us: int
    events: int = 0
    submitted: int = 0
    committed: int = 0
    aborted: int = 0
    rejected: int = 0
    cross_committed: int = 0
    final_shards: int = 0
    splits: int = 0
    merges: int = 0
    challenges: int = 0
    rollbacks: int = 0
    double_spends_committed: int = 0
    view_changes: int = 0
    trace_digest: str = ""


class WorkItem(NamedTuple):
    """
    One unit of shard work, costing one block slot.

    `kind` is one of intra, validate, prepare, decide, commit.
    """
    kind: str
    tx: Transaction
    shard_id: int
