"""
Property-based test for whole runs of the event engine.

**Feature: adaptive-shard-simulator, Property 17: Deterministic Conserving Runs**
"""

from collections import deque

import pytest
from hypothesis import given, strategies as st, settings

import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent.parent.parent.parent))

from src.features.crossshard.domain import CrossPhase
from src.features.ledger.domain import Leg, Transaction
from src.features.sharding.domain import EvaluationMode, RedistributionScope, ShardMgrConfig
from src.features.simulation.domain import (
    ArrivalPattern,
    ConfigError,
    ConsensusFidelity,
    RunMode,
    SimConfig,
    SimulationError,
    TraceKind,
    WorkItem,
    WorkloadSpec,
)
from src.features.simulation.services import Engine, run
from src.features.statesync.domain import SyncConfig
from src.features.statesync.services import check_message


def small_config(**overrides):
    values = dict(
        seed=3,
        shard_count=4,
        validators_per_shard=4,
        block_interval_us=50_000,
        block_capacity=40,
        management=ShardMgrConfig(enabled=False),
    )
    values.update(overrides)
    return SimConfig(**values)


def small_workload(**overrides):
    values = dict(rate=200, cross_ratio=0.3, account_count=64, duration_us=500_000)
    values.update(overrides)
    return WorkloadSpec(**values)


def assert_conserved(engine):
    assert engine.supply() == engine.genesis_supply
    assert engine.ledger.escrowed_total() == 0
    assert engine.ledger.journal.incomplete() == []


class TestHonestRuns:
    def test_adaptive_commits_everything(self):
        result = run(small_config(), small_workload())
        summary = result.summary
        assert summary.submitted > 0
        assert summary.committed == summary.submitted
        assert summary.aborted == 0 and summary.rejected == 0
        assert 0 < summary.cross_committed < summary.committed
        assert summary.challenges == 0 and summary.double_spends_committed == 0
        assert_conserved(result.engine)

    def test_trace_shape(self):
        result = run(small_config(), small_workload())
        trace = result.trace
        assert len(trace.of(TraceKind.SUBMIT)) == result.summary.submitted
        assert len(trace.of(TraceKind.COMMIT)) == result.summary.committed
        assert trace.of(TraceKind.BATCH)
        assert trace.records[-1]["kind"] == TraceKind.END.value
        assert [record["t"] for record in trace] == sorted(record["t"] for record in trace)
        for commit in trace.of(TraceKind.COMMIT):
            assert commit["latency"] == commit["t"] - commit["submitted"] >= 0
        assert result.summary.trace_digest == trace.digest()

    def test_epoch_samples_every_live_shard(self):
        result = run(small_config(), small_workload(duration_us=2_500_000), until=2_500_000)
        epochs = result.trace.of(TraceKind.EPOCH)
        assert [record["epoch"] for record in epochs] == [1, 2]
        for record in epochs:
            assert [sample["id"] for sample in record["shards"]] == [0, 1, 2, 3]
            assert all(0 <= sample["u"] <= 100 for sample in record["shards"])

    def test_replicated_consensus_commits_everything(self):
        config = small_config(
            shard_count=2, consensus=ConsensusFidelity.REPLICATED, view_timeout_us=200_000, block_interval_us=100_000,
        )
        result = run(config, small_workload(rate=50, duration_us=300_000, account_count=16))
        assert result.summary.submitted > 0
        assert result.summary.committed == result.summary.submitted
        assert_conserved(result.engine)

    def test_baseline_settles_with_locks_released(self):
        config = small_config(mode=RunMode.BASELINE, management=ShardMgrConfig())
        result = run(config, small_workload(rate=100, account_count=200, zipf_exponent=0.0))
        summary = result.summary
        assert summary.committed + summary.aborted + summary.rejected == summary.submitted
        assert summary.cross_committed > 0
        assert summary.splits == summary.merges == 0 and summary.final_shards == 4
        assert summary.challenges == 0
        assert result.engine.two_phase.locks == {}
        assert result.engine.supply() == result.engine.genesis_supply
        for record in result.engine.ledger.records.values():
            assert record.phase in (CrossPhase.COMMITTED, CrossPhase.ABORTED)
            assert not record.locks

    @pytest.mark.parametrize("max_proofs", [1, 16])
    def test_gossip_carries_proofs_of_changed_accounts(self, max_proofs):
        config = small_config(sync=SyncConfig(max_proofs=max_proofs))
        engine = run(config, small_workload()).engine
        messages = [message for node in engine.mesh.nodes.values() for message in node.latest.values()]
        assert any(message.proofs for message in messages)
        for message in messages:
            check_message(engine.ledger.keyring, message)
            assert len(message.proofs) <= max_proofs

    def test_stop_when_settled_ends_early(self):
        result = run(small_config(), small_workload(), until=60_000_000, stop_when_settled=True)
        assert result.summary.committed == result.summary.submitted
        assert result.summary.until_us < 60_000_000


class TestDeterminism:
    @given(seed=st.integers(min_value=0, max_value=1_000))
    @settings(max_examples=5, deadline=None)
    def test_same_inputs_same_trace(self, seed):
        config = small_config(seed=seed)
        workload = small_workload(duration_us=200_000)
        first, second = run(config, workload), run(config, workload)
        assert first.summary == second.summary
        assert first.trace.records == second.trace.records

    def test_seed_changes_the_trace(self):
        workload = small_workload(duration_us=200_000)
        assert run(small_config(seed=1), workload).summary.trace_digest != (
            run(small_config(seed=2), workload).summary.trace_digest
        )


class TestManagement:
    def test_overload_splits_and_conserves(self):
        config = SimConfig(
            seed=1,
            shard_count=2,
            validators_per_shard=8,
            block_interval_us=100_000,
            block_capacity=10,
            management=ShardMgrConfig(split_threshold=60),
        )
        workload = WorkloadSpec(rate=400, account_count=100, zipf_exponent=0.0, duration_us=3_000_000)
        result = run(config, workload)
        summary = result.summary
        assert summary.splits >= 1
        assert summary.final_shards == 2 + summary.splits - summary.merges
        assert len(result.trace.of(TraceKind.RECONFIG)) == summary.splits + summary.merges
        assert result.engine.supply() == result.engine.genesis_supply
        homes = result.engine.ledger.homes
        for shard_id in result.engine.ledger.active_ids():
            for account in result.engine.ledger.shards[shard_id].accounts:
                assert homes[account] == shard_id

    def test_idle_shards_merge(self):
        config = SimConfig(
            seed=2,
            shard_count=4,
            validators_per_shard=4,
            block_interval_us=100_000,
            block_capacity=10,
            management=ShardMgrConfig(merge_epochs=1),
        )
        workload = WorkloadSpec(rate=80, account_count=64, zipf_exponent=0.0, duration_us=3_000_000)
        result = run(config, workload)
        summary = result.summary
        assert summary.merges >= 1
        assert summary.final_shards == 4 - summary.merges
        assert result.engine.supply() == result.engine.genesis_supply
        assert summary.committed == summary.submitted

    def test_draining_shard_keeps_applying_intra_work(self):
        engine = Engine(small_config(), small_workload())

        def item(kind, sender, receiver, nonce=1):
            tx = Transaction(
                inputs=(Leg(shard_id=0, account=sender, amount=1),),
                outputs=(Leg(shard_id=0, account=receiver, amount=1),),
                nonce=nonce,
            )
            return WorkItem(kind, tx, 0)

        free = item("intra", 0, 4)
        unlocked = item("validate", 8, 1)
        behind = item("intra", 8, 12, nonce=2)
        other = item("intra", 16, 20)
        queue = deque([free, unlocked, behind, other])
        assert engine._drain_pick(queue) == (free, other)
        assert list(queue) == [unlocked, behind]


def burst_latency(management: ShardMgrConfig) -> int:
    config = SimConfig(
        seed=5,
        shard_count=2,
        validators_per_shard=16,
        block_interval_us=100_000,
        block_capacity=20,
        management=management,
    )
    workload = WorkloadSpec(
        arrival=ArrivalPattern.BURST, max_txs=2_000, cross_ratio=0.4, account_count=200, zipf_exponent=0.5,
    )
    result = run(config, workload, until=60_000_000, stop_when_settled=True)
    assert result.summary.committed + result.summary.aborted + result.summary.rejected == result.summary.submitted
    assert result.engine.supply() == result.engine.genesis_supply
    return max(record["t"] for record in result.trace.of(TraceKind.COMMIT))


def test_frequent_evaluation_drains_a_burst_sooner():
    managed = dict(
        evaluation=EvaluationMode.STRATEGY,
        max_adjusted=4,
        split_threshold=60,
        merge_threshold=20,
        redistribute=RedistributionScope.AFFECTED,
    )
    unmanaged = burst_latency(ShardMgrConfig(enabled=False))
    slow = burst_latency(ShardMgrConfig(commits_between=400, **managed))
    fast = burst_latency(ShardMgrConfig(commits_between=100, **managed))
    assert unmanaged > slow > fast


class TestConfiguration:
    def test_more_shards_than_accounts(self):
        with pytest.raises(ConfigError):
            Engine(small_config(shard_count=8), small_workload(account_count=4))

    def test_event_budget(self):
        engine = Engine(small_config(), small_workload(), max_events=50)
        with pytest.raises(SimulationError):
            engine.run(1_000_000)
