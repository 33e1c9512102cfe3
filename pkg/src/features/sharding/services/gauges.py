"""
Load gauges: transaction volume v and resource utilization u per shard.
"""

from typing import Dict, Iterable

from src.features.sharding.domain import EpochCounters, LoadGauge


def _clamp(value: float) -> float:
    return max(0.0, min(100.0, value))


def snapshot(counters: Iterable[EpochCounters]) -> Dict[int, LoadGauge]:
    """
    Normalize raw counters of a finished window.

    v = 100 * processed / capacity
    u = 100 * busy time / (window * validators)
    """
    gauges = {}
    for counter in counters:
        gauges[counter.shard_id] = LoadGauge(
            shard_id=counter.shard_id,
            v=_clamp(100.0 * counter.processed / counter.capacity),
            u=_clamp(100.0 * counter.busy_us / (counter.window_us * counter.validators)),
            backlog=counter.backlog,
            access=counter.access,
        )
    return gauges
