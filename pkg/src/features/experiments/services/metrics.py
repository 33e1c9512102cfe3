"""
Metrics computed from run traces.

Every number here is a pure function of trace records, so a report can be
recomputed from a saved trace file.
"""

from typing import Collection, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from src.features.experiments.constants import US_PER_SECOND
from src.features.experiments.domain import BatchIncomplete, EmptyInput, LatencyStats
from src.features.simulation.domain import TraceKind
from src.features.simulation.infrastructure import TraceRecord

Window = Tuple[int, int]

_FINAL = frozenset({TraceKind.COMMIT.value, TraceKind.ABORT.value, TraceKind.REJECT.value})


def util_distance(loads: Sequence[float]) -> float:
    """Mean absolute deviation of per-shard load from the equal share, in load units."""
    if len(loads) == 0:
        raise EmptyInput("loads")
    values = np.asarray(loads, dtype=float)
    return float(np.mean(np.abs(values - values.mean())))


def efficiency(loads: Sequence[float], capacity: float = 100.0) -> float:
    """100 minus the utilization distance as a percentage of shard capacity."""
    return float(np.clip(100.0 - 100.0 * util_distance(loads) / capacity, 0.0, 100.0))


def tps(trace: Iterable[TraceRecord], window: Window) -> float:
    """Commits with start <= t < end, per sim-second of the window."""
    start, end = window
    if end <= start:
        return 0.0
    commit = TraceKind.COMMIT.value
    count = sum(1 for record in trace if record["kind"] == commit and start <= record["t"] < end)
    return count * US_PER_SECOND / (end - start)


def commit_latencies(trace: Iterable[TraceRecord], window: Optional[Window] = None) -> List[int]:
    commit = TraceKind.COMMIT.value
    return [
        record["latency"] for record in trace
        if record["kind"] == commit and (window is None or window[0] <= record["t"] < window[1])
    ]


def latency_stats(trace: Iterable[TraceRecord], window: Optional[Window] = None) -> LatencyStats:
    latencies = commit_latencies(trace, window)
    if not latencies:
        return LatencyStats()
    seconds = np.asarray(latencies, dtype=float) / US_PER_SECOND
    return LatencyStats(
        count=len(latencies),
        mean=float(seconds.mean()),
        p50=float(np.percentile(seconds, 50)),
        p95=float(np.percentile(seconds, 95)),
    )


def batch_latency(trace: Iterable[TraceRecord], batch: Optional[Collection[str]] = None) -> int:
    """
    Sim-time from the first submit to the last final record of a batch.

    Args:
        trace: Trace records
        batch: Transaction ids as written in the trace; every submitted
            transaction when omitted

    Returns:
        Latency in trace time units (microseconds)

    Raises:
        EmptyInput: The batch has no submitted transaction
        BatchIncomplete: Some transaction of the batch is not final yet
    """
    records = list(trace)
    submit = TraceKind.SUBMIT.value
    submitted = {}
    for record in records:
        if record["kind"] == submit and (batch is None or record["tx"] in batch):
            submitted.setdefault(record["tx"], record["t"])
    if batch is not None:
        missing = set(batch) - set(submitted)
        if missing:
            raise BatchIncomplete(len(missing))
    if not submitted:
        raise EmptyInput("batch")

    finished = {}
    for record in records:
        if record["kind"] in _FINAL and record["tx"] in submitted:
            finished[record["tx"]] = record["t"]
    pending = len(submitted) - len(finished)
    if pending:
        raise BatchIncomplete(pending)
    return max(finished.values()) - min(submitted.values())


def epoch_loads(trace: Iterable[TraceRecord]) -> List[List[float]]:
    """Per-shard load samples of every epoch record, oldest first."""
    epoch = TraceKind.EPOCH.value
    return [[sample["load"] for sample in record["shards"]] for record in trace if record["kind"] == epoch]


class Utilization(NamedTuple):
    before: Optional[float] = None
    after: Optional[float] = None
    efficiency: Optional[float] = None


def utilization(trace: Iterable[TraceRecord], settle_epochs: int = 0) -> Utilization:
    """
    Utilization distance before and after management had time to act.

    `before` is the first epoch; `after` and `efficiency` average the epochs
    from `settle_epochs` on, or every epoch when the run is shorter. Epochs
    with no load at all are skipped.
    """
    loads = [sample for sample in epoch_loads(trace) if any(sample)]
    if not loads:
        return Utilization()
    settled = loads[settle_epochs:] or loads
    return Utilization(
        before=util_distance(loads[0]),
        after=float(np.mean([util_distance(sample) for sample in settled])),
        efficiency=float(np.mean([efficiency(sample) for sample in settled])),
    )


def improvement(reference: float, value: float, higher_is_better: bool = False) -> float:
    """Relative difference of `value` against `reference`, in percent; positive is better."""
    if reference == 0:
        return 0.0
    change = (value - reference) if higher_is_better else (reference - value)
    return 100.0 * change / abs(reference)
