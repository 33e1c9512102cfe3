"""
Property-based test for metrics recomputed from traces.

**Feature: adaptive-shard-simulator, Property 19: Metric Recomputability**
"""

import numpy as np
import pytest
from hypothesis import given, strategies as st, settings

import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent.parent.parent.parent))

from src.features.experiments.domain import BatchIncomplete, EmptyInput
from src.features.experiments.services import (
    batch_latency,
    efficiency,
    improvement,
    latency_stats,
    tps,
    util_distance,
    utilization,
)
from src.features.simulation.domain import TraceKind
from src.features.simulation.services import run
from tests.features.simulation.test_engine import small_config, small_workload


def submit(tx, t):
    return {"t": t, "kind": TraceKind.SUBMIT.value, "tx": tx}


def commit(tx, t, submitted=0):
    return {"t": t, "kind": TraceKind.COMMIT.value, "tx": tx, "submitted": submitted, "latency": t - submitted}


def epoch(number, loads):
    return {
        "t": number * 1_000_000,
        "kind": TraceKind.EPOCH.value,
        "epoch": number,
        "shards": [{"id": index, "load": load} for index, load in enumerate(loads)],
    }


shard_loads = st.lists(st.integers(min_value=0, max_value=10_000), min_size=1, max_size=32)


def test_util_distance_examples():
    assert util_distance([10, 10, 10, 10]) == 0
    assert util_distance([40, 0, 0, 0]) == 15
    assert util_distance([55]) == 0


def test_util_distance_rejects_empty_input():
    with pytest.raises(EmptyInput):
        util_distance([])


@given(loads=shard_loads)
@settings(max_examples=200, deadline=None)
def test_property_util_distance_is_zero_only_when_balanced(loads):
    """Property 19: distance >= 0, and 0 exactly when all shards carry the same load."""
    distance = util_distance(loads)
    assert distance >= 0
    if len(set(loads)) == 1:
        assert distance == 0
    else:
        assert distance > 0


def test_efficiency_is_complement_of_distance():
    assert efficiency([40, 0, 0, 0]) == pytest.approx(85.0)
    assert efficiency([25, 25, 25, 25]) == 100.0
    assert efficiency([400, 0], capacity=100) == 0.0


def test_tps_examples():
    trace = [commit(f"t{index}", 10_000 * index) for index in range(100)]
    assert tps(trace, (0, 2_000_000)) == pytest.approx(50.0)
    assert tps(trace, (5_000_000, 6_000_000)) == 0.0
    assert tps(trace, (1_000, 1_000)) == 0.0


@given(
    times=st.lists(st.integers(min_value=0, max_value=9_999_999), max_size=200),
    cut=st.integers(min_value=1, max_value=9_999_999),
)
@settings(max_examples=100, deadline=None)
def test_property_disjoint_windows_add_up(times, cut):
    """Property 19: commits counted over split windows equal commits over the whole window."""
    trace = [commit(f"t{index}", at) for index, at in enumerate(times)]
    first = tps(trace, (0, cut)) * cut / 1_000_000
    second = tps(trace, (cut, 10_000_000)) * (10_000_000 - cut) / 1_000_000
    assert first + second == pytest.approx(len(times))
    assert tps(trace, (0, 10_000_000)) == pytest.approx(len(times) / 10)


def test_batch_latency_examples():
    assert batch_latency([submit("a", 0), commit("a", 5)]) == 5
    trace = [submit("a", 0), submit("b", 0), commit("a", 4), commit("b", 9)]
    assert batch_latency(trace) == 9
    assert batch_latency(trace, batch={"a"}) == 4


def test_batch_latency_counts_aborts_as_final():
    trace = [submit("a", 2), submit("b", 3), commit("a", 7), {"t": 11, "kind": TraceKind.ABORT.value, "tx": "b"}]
    assert batch_latency(trace) == 9


def test_batch_latency_needs_a_finished_batch():
    with pytest.raises(BatchIncomplete) as raised:
        batch_latency([submit("a", 0), submit("b", 1), commit("a", 5)])
    assert raised.value.pending == 1
    assert raised.value.code == "BATCH_INCOMPLETE"
    with pytest.raises(BatchIncomplete):
        batch_latency([submit("a", 0), commit("a", 5)], batch={"a", "never-submitted"})
    with pytest.raises(EmptyInput):
        batch_latency([])


def test_utilization_before_and_after_settling():
    trace = [epoch(1, [40, 0, 0, 0]), epoch(2, [20, 20, 0, 0]), epoch(3, [10, 10, 10, 10]), epoch(4, [12, 8, 10, 10])]
    util = utilization(trace, settle_epochs=2)
    assert util.before == 15
    assert util.after == pytest.approx((0 + 1) / 2)
    assert util.efficiency == pytest.approx(100 - 0.5)


def test_utilization_skips_idle_epochs_and_short_runs():
    assert utilization([]).before is None
    trace = [epoch(1, [0, 0]), epoch(2, [30, 10])]
    util = utilization(trace, settle_epochs=5)
    assert util.before == util.after == 10


def test_improvement_is_relative_difference():
    assert improvement(100.0, 50.0) == 50.0
    assert improvement(100.0, 120.0, higher_is_better=True) == pytest.approx(20.0)
    assert improvement(3.44, 0.73) == pytest.approx(78.779, abs=1e-3)
    assert improvement(0.0, 5.0) == 0.0


def test_property_metrics_recount_from_a_real_trace():
    """Property 19: summary counters match an independent scan of the raw trace."""
    result = run(small_config(), small_workload())
    records = result.trace.records
    commits = [record for record in records if record["kind"] == TraceKind.COMMIT.value]
    end = result.summary.until_us

    assert tps(records, (0, end)) * end / 1_000_000 == pytest.approx(result.summary.committed)
    stats = latency_stats(records)
    assert stats.count == result.summary.committed
    assert stats.mean == pytest.approx(np.mean([c["t"] - c["submitted"] for c in commits]) / 1_000_000)
    assert stats.p50 <= stats.p95

    submits = {record["tx"]: record["t"] for record in records if record["kind"] == TraceKind.SUBMIT.value}
    assert batch_latency(records) == max(c["t"] for c in commits) - min(submits.values())
