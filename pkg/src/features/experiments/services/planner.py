"""
Expands a scenario into independent runs.

A scenario kind decides the variants (one configuration each); every
variant runs once per seed.
"""

import logging
from typing import List, NamedTuple, Optional

from src.features.experiments.constants import BATCH_HORIZON_US, SECURITY_CORRUPT_FRACTION
from src.features.experiments.domain import ConfigError, ScenarioSpec
from src.features.sharding.domain import ManagementStrategy, ShardMgrConfig
from src.features.simulation.domain import (
    AdversarySpec,
    ArrivalPattern,
    Behavior,
    RunMode,
    SimConfig,
    WorkloadSpec,
)

logger = logging.getLogger(__name__)

_STRATEGY_FIELDS = {"enabled", "evaluation", "commits_between", "max_adjusted"}

_PARTIAL_FAULTS = {Behavior.WITHHOLD, Behavior.FORGE_PARTIAL}


class Variant(NamedTuple):
    """One configuration of a scenario, before seeding."""
    label: str
    config: SimConfig
    workload: WorkloadSpec
    adversary: AdversarySpec
    until: Optional[int] = None
    settle: bool = False
    batch: bool = False


class Job(NamedTuple):
    """One seeded run; picklable so it can cross a process boundary."""
    index: int
    scenario: str
    variant: str
    seed: int
    config: SimConfig
    workload: WorkloadSpec
    adversary: AdversarySpec
    until: Optional[int]
    settle: bool
    batch: bool
    settle_epochs: int
    trace_dir: Optional[str] = None


def strategy_management(
    strategy: ManagementStrategy, base: ShardMgrConfig, scale: float = 1.0
) -> ShardMgrConfig:
    """
    Management preset for a named strategy, keeping the thresholds of `base`.

    `scale` shrinks or grows (n_c, s) for batches smaller or larger than the
    preset was tuned for.
    """
    overrides = base.model_dump(exclude=_STRATEGY_FIELDS)
    config = ShardMgrConfig.for_strategy(strategy, **overrides)
    if not config.enabled or scale == 1.0:
        return config
    return config.model_copy(update={
        "commits_between": max(1, round(config.commits_between * scale)),
        "max_adjusted": max(1, round(config.max_adjusted * scale)),
    })


class ScenarioPlanner:
    """Builds the variants of each scenario kind."""

    def plan(self, spec: ScenarioSpec, trace_dir: Optional[str] = None) -> List[Job]:
        variants = self.variants(spec)
        if not variants:
            raise ConfigError(f"Scenario {spec.name} has nothing to run.")
        jobs = []
        for variant in variants:
            for seed in spec.seeds:
                jobs.append(Job(
                    index=len(jobs),
                    scenario=spec.name,
                    variant=variant.label,
                    seed=seed,
                    config=variant.config.model_copy(update={"seed": seed}),
                    workload=variant.workload,
                    adversary=variant.adversary,
                    until=variant.until,
                    settle=variant.settle,
                    batch=variant.batch,
                    settle_epochs=spec.sweep.settle_epochs,
                    trace_dir=trace_dir,
                ))
        logger.info("scenario %s: %s variants x %s seeds", spec.name, len(variants), len(spec.seeds))
        return jobs

    def variants(self, spec: ScenarioSpec) -> List[Variant]:
        builder = getattr(self, f"_{spec.kind.value}")
        return builder(spec)

    # Kinds

    def _single(self, spec: ScenarioSpec) -> List[Variant]:
        config = spec.config
        label = config.mode.value
        if spec.strategy is not None:
            config = self._with_strategy(spec, config, spec.strategy)
            label = f"{label}-{spec.strategy.value}"
        return [self._variant(spec, label, config)]

    def _latency(self, spec: ScenarioSpec) -> List[Variant]:
        if spec.workload.arrival is not ArrivalPattern.BURST:
            raise ConfigError("The latency scenario measures a burst batch; set workload.arrival = \"burst\".")
        adaptive = spec.config.model_copy(update={"mode": RunMode.ADAPTIVE})
        variants = [
            self._variant(spec, strategy.value, self._with_strategy(spec, adaptive, strategy))
            for strategy in spec.sweep.strategies
        ]
        if spec.sweep.compare_baseline:
            variants.append(self._variant(spec, RunMode.BASELINE.value, self._mode(spec.config, RunMode.BASELINE)))
        return variants

    def _utilization(self, spec: ScenarioSpec) -> List[Variant]:
        adaptive = self._mode(spec.config, RunMode.ADAPTIVE)
        if spec.strategy is not None:
            adaptive = self._with_strategy(spec, adaptive, spec.strategy)
        unmanaged = adaptive.model_copy(update={
            "management": adaptive.management.model_copy(update={"enabled": False}),
        })
        variants = [self._variant(spec, "unmanaged", unmanaged), self._variant(spec, "adaptive", adaptive)]
        if spec.sweep.compare_baseline:
            variants.append(self._variant(spec, "baseline", self._mode(spec.config, RunMode.BASELINE)))
        return variants

    def _throughput(self, spec: ScenarioSpec) -> List[Variant]:
        variants = []
        for shard_count in spec.sweep.shard_counts or (spec.config.shard_count,):
            for ratio in spec.sweep.cross_ratios:
                workload = spec.workload.model_copy(update={"cross_ratio": ratio})
                for mode in self._modes(spec):
                    config = self._mode(spec.config, mode).model_copy(update={"shard_count": shard_count})
                    label = f"s{shard_count}-x{ratio:g}-{mode.value}"
                    variants.append(self._variant(spec, label, config, workload=workload))
        return variants

    def _load(self, spec: ScenarioSpec) -> List[Variant]:
        variants = []
        for name, rate in spec.sweep.rates.items():
            workload = spec.workload.model_copy(update={"rate": rate})
            for mode in self._modes(spec):
                config = self._mode(spec.config, mode)
                variants.append(self._variant(spec, f"{name}-{mode.value}", config, workload=workload))
        return variants

    def _security(self, spec: ScenarioSpec) -> List[Variant]:
        adversary = spec.adversary
        update = {}
        if adversary.corrupt_fraction == 0 and not adversary.corrupt_nodes:
            update["corrupt_fraction"] = SECURITY_CORRUPT_FRACTION
        if not adversary.behaviors:
            update["behaviors"] = frozenset({Behavior.DOUBLE_SPEND_INJECT, Behavior.COLLUSION_APPROVE})
        adversary = adversary.model_copy(update=update)
        config = spec.config
        # Late challenges still need a full voting window after the last commit
        until = spec.horizon_us or (
            spec.workload.duration_us
            + config.crossshard.lock_timeout_us
            + (config.sync.dispute_window_rounds + 1) * config.gossip_interval_us
        )
        return [
            self._variant(spec, mode.value, self._mode(config, mode), adversary=adversary)._replace(until=until)
            for mode in self._modes(spec)
        ]

    def _atomicity(self, spec: ScenarioSpec) -> List[Variant]:
        variants = []
        for fault in spec.sweep.faults:
            update = {"behaviors": frozenset({fault})}
            if fault in _PARTIAL_FAULTS and not spec.adversary.faulty_shards:
                update["faulty_shards"] = (min(1, spec.config.shard_count - 1),)
            adversary = spec.adversary.model_copy(update=update)
            variants.append(self._variant(spec, fault.value, spec.config, adversary=adversary, settle=True))
        return variants

    # Helpers

    def _variant(
        self,
        spec: ScenarioSpec,
        label: str,
        config: SimConfig,
        workload: Optional[WorkloadSpec] = None,
        adversary: Optional[AdversarySpec] = None,
        settle: bool = False,
    ) -> Variant:
        workload = workload or spec.workload
        batch = workload.arrival is ArrivalPattern.BURST
        until = spec.horizon_us
        if batch or settle:
            until = until or BATCH_HORIZON_US
        return Variant(
            label=label,
            config=config,
            workload=workload,
            adversary=adversary or spec.adversary,
            until=until,
            settle=batch or settle,
            batch=batch,
        )

    def _with_strategy(self, spec: ScenarioSpec, config: SimConfig, strategy: ManagementStrategy) -> SimConfig:
        management = strategy_management(strategy, config.management, spec.sweep.strategy_scale)
        return config.model_copy(update={"management": management})

    @staticmethod
    def _mode(config: SimConfig, mode: RunMode) -> SimConfig:
        return config.model_copy(update={"mode": mode})

    @staticmethod
    def _modes(spec: ScenarioSpec) -> List[RunMode]:
        if spec.sweep.compare_baseline:
            return [RunMode.ADAPTIVE, RunMode.BASELINE]
        return [spec.config.mode]
