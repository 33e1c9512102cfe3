"""
Runs scenario jobs and turns their traces into a report.

Jobs are independent, so they fan out over a process pool; aggregation
happens afterwards in the calling process.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Sequence

import numpy as np

from src.features.crossshard.domain import CrossPhase
from src.features.experiments.constants import AGGREGATED_METRICS, US_PER_SECOND
from src.features.experiments.domain import (
    Aggregate,
    Improvement,
    MetricsRecord,
    Report,
    ScenarioKind,
    ScenarioSpec,
)
from src.features.experiments.services.metrics import (
    batch_latency,
    improvement,
    latency_stats,
    tps,
    utilization,
)
from src.features.experiments.services.planner import Job, ScenarioPlanner
from src.features.simulation.domain import RunMode, TraceKind
from src.features.simulation.infrastructure import NdjsonTraceStore
from src.features.simulation.services import run as simulate
from src.shared.config import settings

logger = logging.getLogger(__name__)

_FINAL_PHASES = (CrossPhase.COMMITTED, CrossPhase.ABORTED)


def trace_name(job: Job) -> str:
    return f"{job.scenario}-{job.variant}-s{job.seed}.ndjson"


def execute(job: Job) -> MetricsRecord:
    """Simulate one job and measure it."""
    result = simulate(job.config, job.workload, job.adversary, until=job.until, stop_when_settled=job.settle)
    summary, engine = result.summary, result.engine
    records = result.trace.records
    end = summary.until_us
    window = (0, end) if job.settle else (0, min(job.workload.duration_us, end))

    latency = latency_stats(records)
    util = utilization(records, job.settle_epochs)
    last_epoch = result.trace.last(TraceKind.EPOCH)
    samples = last_epoch["shards"] if last_epoch else []
    attempts = len(engine.adversary.injected)
    penalties = engine.disputes.penalties

    if job.trace_dir:
        NdjsonTraceStore(job.trace_dir).write(trace_name(job), records)

    return MetricsRecord(
        scenario=job.scenario,
        variant=job.variant,
        mode=job.config.mode.value,
        seed=job.seed,
        window_start_us=window[0],
        window_end_us=window[1],
        submitted=summary.submitted,
        committed=summary.committed,
        aborted=summary.aborted,
        rejected=summary.rejected,
        cross_committed=summary.cross_committed,
        tps=tps(records, window),
        latency_mean_s=latency.mean,
        latency_p50_s=latency.p50,
        latency_p95_s=latency.p95,
        batch_latency_s=batch_latency(records) / US_PER_SECOND if job.batch else None,
        util_before=util.before,
        util_distance=util.after,
        efficiency=util.efficiency,
        final_shards=summary.final_shards,
        splits=summary.splits,
        merges=summary.merges,
        view_changes=summary.view_changes,
        double_spend_attempts=attempts,
        double_spend_success=summary.double_spends_committed / attempts if attempts else None,
        challenges=summary.challenges,
        rollbacks=summary.rollbacks,
        collusion_detection=summary.rollbacks / summary.challenges if summary.challenges else None,
        penalty_effectiveness=penalties.effectiveness() if penalties.history else None,
        unsettled=sum(1 for record in engine.ledger.records.values() if record.phase not in _FINAL_PHASES),
        conserved=engine.supply() == engine.genesis_supply,
        shard_v=tuple(sample["v"] for sample in samples),
        shard_u=tuple(sample["u"] for sample in samples),
        trace_digest=summary.trace_digest,
    )


def run_jobs(jobs: Sequence[Job], workers: Optional[int] = None) -> List[MetricsRecord]:
    """Execute jobs in order; more than one worker spreads them over processes."""
    workers = settings.harness.workers if workers is None else workers
    if workers <= 1 or len(jobs) <= 1:
        return [execute(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        return list(pool.map(execute, jobs))


def aggregate(records: Sequence[MetricsRecord]) -> List[Aggregate]:
    """Mean and sample standard deviation per variant and metric; empty metrics are skipped."""
    groups: Dict[str, List[MetricsRecord]] = {}
    for record in records:
        groups.setdefault(record.variant, []).append(record)

    aggregates = []
    for variant, group in groups.items():
        for metric in AGGREGATED_METRICS:
            values = [getattr(record, metric) for record in group if getattr(record, metric) is not None]
            if not values:
                continue
            array = np.asarray(values, dtype=float)
            aggregates.append(Aggregate(
                variant=variant,
                metric=metric,
                mean=float(array.mean()),
                stdev=float(array.std(ddof=1)) if len(array) > 1 else 0.0,
                n=len(array),
            ))
    return aggregates


def compare(spec: ScenarioSpec, report: Report) -> List[Improvement]:
    """Improvement percentages a scenario kind reports."""
    improvements = []

    def add(label, metric, reference_variant, variant, higher_is_better=False, reference_metric=None):
        reference = report.mean(reference_variant, reference_metric or metric)
        value = report.mean(variant, metric)
        if reference is None or value is None:
            return
        improvements.append(Improvement(
            label=label,
            metric=metric,
            reference=reference,
            value=value,
            percent=improvement(reference, value, higher_is_better),
        ))

    variants = report.variants()
    if spec.kind is ScenarioKind.LATENCY:
        reference = spec.sweep.strategies[0].value
        for variant in variants:
            if variant != reference and variant != RunMode.BASELINE.value:
                add(variant, "batch_latency_s", reference, variant)
    elif spec.kind is ScenarioKind.UTILIZATION:
        for variant in variants:
            add(variant, "util_distance", variant, variant, reference_metric="util_before")
        add("adaptive-vs-unmanaged", "util_distance", "unmanaged", "adaptive")
        add("adaptive-vs-baseline", "util_distance", "baseline", "adaptive")
    else:
        suffix = f"-{RunMode.ADAPTIVE.value}"
        for variant in variants:
            if not variant.endswith(suffix):
                continue
            prefix = variant[: -len(suffix)]
            baseline = f"{prefix}-{RunMode.BASELINE.value}"
            add(prefix, "tps", baseline, variant, higher_is_better=True)
            add(prefix, "latency_mean_s", baseline, variant)
    return improvements


def build_report(spec: ScenarioSpec, records: Sequence[MetricsRecord]) -> Report:
    report = Report(scenario=spec.name, kind=spec.kind, records=list(records), aggregates=aggregate(records))
    report.improvements = compare(spec, report)
    return report


def run_scenario(
    spec: ScenarioSpec,
    workers: Optional[int] = None,
    trace_dir: Optional[str] = None,
    planner: Optional[ScenarioPlanner] = None,
) -> Report:
    """
    Run every variant of a scenario for every seed.

    Args:
        spec: Scenario to run
        workers: Process count; defaults to the configured worker count
        trace_dir: Directory for per-run trace files, none written when omitted
        planner: Variant builder, mainly for tests

    Returns:
        Records per run plus aggregates and improvement percentages

    Raises:
        ConfigError: The scenario cannot be planned or a run is misconfigured
        BatchIncomplete: A batch did not settle before the horizon
    """
    jobs = (planner or ScenarioPlanner()).plan(spec, trace_dir)
    records = run_jobs(jobs, workers)
    report = build_report(spec, records)
    logger.info("scenario %s finished: %s runs", spec.name, len(records))
    return report
