"""
Property-based test for runs under Byzantine behaviour.

**Feature: adaptive-shard-simulator, Property 18: Atomicity and Rollback Under Faults**
"""

import pytest
from hypothesis import given, strategies as st, settings

import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent.parent.parent.parent))

from src.features.crossshard.domain import CrossPhase, CrossShardConfig
from src.features.simulation.domain import (
    AdversarySpec,
    Behavior,
    ConfigError,
    ConsensusFidelity,
    TraceKind,
)
from src.features.simulation.services import run
from src.features.statesync.domain import Outcome
from tests.features.simulation.test_engine import assert_conserved, small_config, small_workload


def behaviors(*names):
    return frozenset(names)


class TestDoubleSpends:
    def test_honest_shards_refuse_the_twin(self):
        adversary = AdversarySpec(behaviors=behaviors(Behavior.DOUBLE_SPEND_INJECT), double_spend_rate=1.0)
        result = run(small_config(), small_workload(cross_ratio=1.0), adversary)
        summary = result.summary
        twins = len(result.engine.adversary.injected)
        assert twins > 0
        assert summary.rejected == twins
        assert summary.committed == summary.submitted - twins
        assert summary.challenges == 0 and summary.double_spends_committed == 0
        assert_conserved(result.engine)

    def test_colluding_shard_is_overruled_and_rolled_back(self):
        adversary = AdversarySpec(
            behaviors=behaviors(Behavior.DOUBLE_SPEND_INJECT, Behavior.COLLUSION_APPROVE),
            colluding_shards=(0,),
            double_spend_rate=1.0,
        )
        result = run(small_config(), small_workload(cross_ratio=1.0), adversary)
        summary = result.summary
        engine = result.engine
        assert summary.challenges >= 1
        assert summary.rollbacks == summary.challenges
        assert summary.double_spends_committed == 0
        resolutions = result.trace.of(TraceKind.RESOLUTION)
        assert len(resolutions) == summary.challenges
        assert all(record["outcome"] == Outcome.ROLLED_BACK.value for record in resolutions)
        assert all(0 in record["slashed"] for record in resolutions)
        assert engine.ledger.shards[0].stake < engine.ledger.shards[1].stake
        assert_conserved(engine)


class TestCommitCrash:
    def test_recovery_finishes_every_commit(self):
        adversary = AdversarySpec(behaviors=behaviors(Behavior.COMMIT_CRASH))
        workload = small_workload(cross_ratio=1.0, multi_input_ratio=1.0)
        result = run(small_config(), workload, adversary)
        assert result.trace.of(TraceKind.CRASH)
        assert result.summary.committed == result.summary.submitted
        assert_conserved(result.engine)
        for record in result.engine.ledger.records.values():
            assert record.phase is CrossPhase.COMMITTED


class TestFaultyPartials:
    @pytest.mark.parametrize("behavior", [Behavior.WITHHOLD, Behavior.FORGE_PARTIAL])
    def test_inputs_on_faulty_shard_abort_cleanly(self, behavior):
        config = small_config(crossshard=CrossShardConfig(lock_timeout_us=300_000))
        adversary = AdversarySpec(behaviors=behaviors(behavior), faulty_shards=(1,))
        workload = small_workload(cross_ratio=1.0)
        result = run(config, workload, adversary, until=workload.duration_us + 1_000_000)
        summary = result.summary
        assert summary.aborted + summary.rejected > 0
        assert summary.committed + summary.aborted + summary.rejected == summary.submitted
        assert_conserved(result.engine)
        for record in result.engine.ledger.records.values():
            touches_faulty = any(leg.shard_id == 1 for leg in record.tx.inputs)
            expected = CrossPhase.ABORTED if touches_faulty else CrossPhase.COMMITTED
            assert record.phase is expected


class TestConsensusFaults:
    def test_committee_leader_crash_costs_a_view(self):
        adversary = AdversarySpec(behaviors=behaviors(Behavior.LEADER_CRASH))
        result = run(small_config(), small_workload(), adversary)
        assert result.summary.view_changes > 0
        assert result.summary.committed == result.summary.submitted
        assert_conserved(result.engine)

    @given(seed=st.integers(min_value=0, max_value=100))
    @settings(max_examples=3, deadline=None)
    def test_equivocating_replicas_stay_safe(self, seed):
        config = small_config(
            seed=seed, shard_count=2, consensus=ConsensusFidelity.REPLICATED, block_interval_us=100_000,
        )
        adversary = AdversarySpec(corrupt_fraction=0.25, behaviors=behaviors(Behavior.EQUIVOCATE))
        result = run(config, small_workload(rate=50, duration_us=300_000, account_count=16), adversary)
        assert len(result.engine.adversary.corrupt) == 2
        assert result.summary.committed > 0
        assert result.engine.supply() == result.engine.genesis_supply

    def test_withholding_beyond_tolerance_is_refused(self):
        adversary = AdversarySpec(corrupt_nodes=(0, 1), behaviors=behaviors(Behavior.WITHHOLD))
        with pytest.raises(ConfigError):
            run(small_config(), small_workload(), adversary)
