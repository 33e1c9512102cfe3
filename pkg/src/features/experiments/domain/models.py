"""
Domain models for the experiments feature.
"""

from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.features.experiments.constants import (
    CROSS_RATIO_SWEEP,
    FAULT_MATRIX,
    LOAD_RATES,
    SETTLE_EPOCHS,
    STRATEGY_SWEEP,
)
from src.features.experiments.domain.enums import ScenarioKind
from src.features.sharding.domain import ManagementStrategy
from src.features.simulation.domain import AdversarySpec, Behavior, RunMode, SimConfig, WorkloadSpec
from src.shared.config import settings


class LatencyStats(BaseModel):
    """Commit latency over a window, in sim-seconds."""
    model_config = ConfigDict(frozen=True)

    count: int = 0
    mean: float = 0.0
    p50: float = 0.0
    p95: float = 0.0


class MetricsRecord(BaseModel):
    """
    Metrics of one run.

    Utilization figures are percentage points of shard capacity. Optional
    fields stay empty when the run has nothing to measure, for example a
    detection rate without any challenge.
    """

    scenario: str
    variant: str
    mode: str
    seed: int
    window_start_us: int = 0
    window_end_us: int = 0
    submitted: int = 0
    committed: int = 0
    aborted: int = 0
    rejected: int = 0
    cross_committed: int = 0
    tps: float = Field(default=0.0, ge=0)
    latency_mean_s: float = 0.0
    latency_p50_s: float = 0.0
    latency_p95_s: float = 0.0
    batch_latency_s: Optional[float] = None
    util_before: Optional[float] = None
    util_distance: Optional[float] = Field(default=None, ge=0)
    efficiency: Optional[float] = None
    final_shards: int = 0
    splits: int = 0
    merges: int = 0
    view_changes: int = 0
    double_spend_attempts: int = 0
    double_spend_success: Optional[float] = None
    challenges: int = 0
    rollbacks: int = 0
    collusion_detection: Optional[float] = None
    penalty_effectiveness: Optional[float] = None
    unsettled: int = Field(default=0, description="Cross-shard records neither committed nor aborted at the end")
    conserved: bool = True
    shard_v: Tuple[float, ...] = ()
    shard_u: Tuple[float, ...] = ()
    trace_digest: str = ""


class SweepSpec(BaseModel):
    """Axes a scenario kind iterates over."""
    model_config = ConfigDict(frozen=True)

    strategies: Tuple[ManagementStrategy, ...] = STRATEGY_SWEEP
    strategy_scale: float = Field(default=1.0, gt=0, description="Scales (n_c, s) to the batch and block size")
    cross_ratios: Tuple[float, ...] = CROSS_RATIO_SWEEP
    shard_counts: Tuple[int, ...] = ()
    rates: Dict[str, float] = Field(default_factory=lambda: dict(LOAD_RATES))
    faults: Tuple[Behavior, ...] = FAULT_MATRIX
    compare_baseline: bool = True
    settle_epochs: int = Field(default=SETTLE_EPOCHS, ge=0)

    @field_validator("cross_ratios")
    @classmethod
    def validate_ratios(cls, value: Tuple[float, ...]) -> Tuple[float, ...]:
        if any(not 0 <= ratio <= 1 for ratio in value):
            raise ValueError("cross ratios lie in [0, 1]")
        return value

    @field_validator("shard_counts")
    @classmethod
    def validate_shard_counts(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        if any(count < 1 for count in value):
            raise ValueError("shard counts are positive")
        return value


class ScenarioSpec(BaseModel):
    """A named experiment: base configuration, sweep axes and seeds."""
    model_config = ConfigDict(frozen=True)

    name: str = Field(..., min_length=1)
    kind: ScenarioKind = ScenarioKind.SINGLE
    seeds: Tuple[int, ...] = Field(default=(settings.simulation.default_seed,), min_length=1)
    config: SimConfig = Field(default_factory=SimConfig)
    workload: WorkloadSpec = Field(default_factory=WorkloadSpec)
    adversary: AdversarySpec = Field(default_factory=AdversarySpec)
    strategy: Optional[ManagementStrategy] = None
    sweep: SweepSpec = Field(default_factory=SweepSpec)
    horizon_us: Optional[int] = Field(default=None, gt=0)

    def with_overrides(
        self, seed: Optional[int] = None, seeds: Optional[int] = None, mode: Optional[RunMode] = None
    ) -> "ScenarioSpec":
        """Apply command-line overrides: a seed range and the protocol mode."""
        update = {}
        if seed is not None or seeds is not None:
            first = seed if seed is not None else self.seeds[0]
            count = seeds if seeds is not None else (1 if seed is not None else len(self.seeds))
            update["seeds"] = tuple(range(first, first + count))
        if mode is not None:
            update["config"] = self.config.model_copy(update={"mode": mode})
        return self.model_validate({**self.model_dump(), **update}) if update else self


class Aggregate(BaseModel):
    """Mean and sample standard deviation of one metric across seeds."""
    model_config = ConfigDict(frozen=True)

    variant: str
    metric: str
    mean: float
    stdev: float
    n: int


class Improvement(BaseModel):
    """Relative difference of a variant against its reference, in percent."""
    model_config = ConfigDict(frozen=True)

    label: str
    metric: str
    reference: float
    value: float
    percent: float


class Report(BaseModel):
    """Everything a scenario run produced."""

    scenario: str
    kind: ScenarioKind
    records: List[MetricsRecord] = Field(default_factory=list)
    aggregates: List[Aggregate] = Field(default_factory=list)
    improvements: List[Improvement] = Field(default_factory=list)

    def variants(self) -> List[str]:
        seen = []
        for record in self.records:
            if record.variant not in seen:
                seen.append(record.variant)
        return seen

    def mean(self, variant: str, metric: str) -> Optional[float]:
        for aggregate in self.aggregates:
            if aggregate.variant == variant and aggregate.metric == metric:
                return aggregate.mean
        return None


class ScenarioRequest(BaseModel):
    """Body of the scenario endpoint: a scenario document and optional overrides."""
    scenario: Dict = Field(..., description="Scenario tables as they appear in a scenario file")
    seed: Optional[int] = None
    seeds: Optional[int] = Field(default=None, ge=1)
    mode: Optional[RunMode] = None

