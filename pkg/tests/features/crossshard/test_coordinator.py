"""
Property-based test for cross-shard atomicity.

**Feature: adaptive-shard-simulator, Property 8: Cross-Shard Atomicity**
"""

import hashlib
from typing import Dict, Optional

import pytest
from hypothesis import given, strategies as st, settings

import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent.parent.parent.parent))

from src.features.consensus.domain import ConsensusConfig
from src.features.consensus.services import LocalGroup, check_agreement
from src.features.crossshard.domain import (
    AbortReason,
    CommitCrash,
    CrossPhase,
    CrossShardConfig,
    CrossShardError,
    NotDecided,
    OrderedBatch,
    ShardBusy,
)
from src.features.crossshard.services import CrossShardLedger
from src.features.ledger.domain import (
    InsufficientBalance,
    Leg,
    NonceReplay,
    ShardMap,
    ShardState,
    Transaction,
)
from src.features.sharding.domain import Shard, ShardStatus
from src.features.threshold.domain import PartialSignature, ThresholdPolicy
from src.features.threshold.services import keygen

SHARDS = 3
ACCOUNTS = 12
FUNDS = 100


def make_ledger(config: Optional[CrossShardConfig] = None) -> CrossShardLedger:
    homes = ShardMap({account: account % SHARDS for account in range(ACCOUNTS)})
    shards = {
        shard_id: Shard.create(
            shard_id,
            tuple(range(shard_id * 4, shard_id * 4 + 4)),
            ShardState.funded(homes.accounts_of(shard_id), FUNDS),
        )
        for shard_id in range(SHARDS)
    }
    return CrossShardLedger(shards, homes, config or CrossShardConfig(lock_timeout_us=1000), seed=11)


def transfer(inputs, outputs, nonce=1) -> Transaction:
    return Transaction(
        inputs=tuple(Leg(shard_id=account % SHARDS, account=account, amount=amount) for account, amount in inputs),
        outputs=tuple(Leg(shard_id=account % SHARDS, account=account, amount=amount) for account, amount in outputs),
        nonce=nonce,
    )


def balances(ledger: CrossShardLedger) -> Dict[int, int]:
    merged = {}
    for shard in ledger.shards.values():
        merged.update(shard.state.balances)
    return merged


def supply(ledger: CrossShardLedger) -> int:
    return sum(balances(ledger).values()) + ledger.escrowed_total()


def committee(seed: int = 0, crashed=(), max_steps: int = 50_000) -> LocalGroup:
    nodes = tuple(range(100, 104))
    keys = keygen("committee", 4, 1, seed, signer_ids=nodes)
    return LocalGroup(ConsensusConfig(group_id="committee", nodes=nodes, keys=keys), seed=seed, crashed=crashed, max_steps=max_steps)


def validate_all(ledger, record, now=0, overrides=None):
    overrides = overrides or {}
    for shard_id in sorted({ledger.homes[leg.account] for leg in record.tx.inputs}):
        ledger.validate_input(shard_id, record, now, **overrides.get(shard_id, {}))


def forged(shard_id: int):
    def sign(message_digest):
        return PartialSignature(
            signer_id=shard_id, message_digest=message_digest, sig=hashlib.sha256(b"forged").digest()
        )
    return sign


class TestValidateInput:
    def test_funded_input_escrows_and_signs(self):
        ledger = make_ledger()
        record = ledger.open(transfer([(0, 30)], [(1, 30)]))
        partial = ledger.validate_input(0, record)
        assert ledger.registry().verify_partial(partial)
        assert ledger.shards[0].state.balance_of(0) == FUNDS - 30
        assert record.locks == {(0, 0)}
        assert supply(ledger) == SHARDS * 4 * FUNDS

    def test_reused_nonce_is_refused_without_lock(self):
        ledger = make_ledger()
        first = ledger.open(transfer([(0, 30)], [(1, 30)]))
        ledger.validate_input(0, first)
        second = ledger.open(transfer([(0, 20)], [(2, 20)]))
        before = ledger.shards[0].state
        with pytest.raises(NonceReplay):
            ledger.validate_input(0, second)
        assert second.locks == set() and second.escrows == {}
        assert ledger.shards[0].state == before

    def test_insufficient_balance_burns_nonce(self):
        ledger = make_ledger()
        record = ledger.open(transfer([(0, FUNDS + 1)], [(1, FUNDS + 1)]))
        with pytest.raises(InsufficientBalance):
            ledger.validate_input(0, record)
        assert ledger.shards[0].state.nonce_of(0) == 1
        assert ledger.shards[0].state.balance_of(0) == FUNDS

    def test_busy_shard(self):
        ledger = make_ledger()
        ledger.shards[0].status = ShardStatus.SPLITTING
        record = ledger.open(transfer([(0, 5)], [(1, 5)]))
        with pytest.raises(ShardBusy):
            ledger.validate_input(0, record)

    def test_shard_without_inputs(self):
        ledger = make_ledger()
        record = ledger.open(transfer([(0, 5)], [(1, 5)]))
        with pytest.raises(CrossShardError):
            ledger.validate_input(1, record)


class TestCollect:
    def test_two_inputs_collect(self):
        ledger = make_ledger()
        record = ledger.open(transfer([(0, 10), (1, 10)], [(2, 20)]))
        validate_all(ledger, record)
        ledger.collect_and_combine(record)
        assert record.phase is CrossPhase.COLLECTED
        assert ledger.verify_sigma(record)
        assert record.sigma.signer_set == (0, 1)

    def test_withheld_partial_aborts_at_deadline(self):
        ledger = make_ledger()
        initial = balances(ledger)
        record = ledger.open(transfer([(0, 10), (1, 10)], [(2, 20)]))
        validate_all(ledger, record, now=0, overrides={1: {"sign": lambda digest: None}})
        ledger.collect_and_combine(record, now=500)
        assert record.phase is CrossPhase.VALIDATING
        ledger.collect_and_combine(record, now=1000)
        assert record.phase is CrossPhase.ABORTED
        assert record.abort_reason is AbortReason.DEADLINE
        assert balances(ledger) == initial
        assert record.locks == set()

    def test_forged_partial_filtered(self):
        ledger = make_ledger()
        initial = balances(ledger)
        record = ledger.open(transfer([(0, 10), (1, 10)], [(2, 20)]))
        validate_all(ledger, record, overrides={1: {"sign": forged(1)}})
        ledger.collect_and_combine(record, now=2000)
        assert record.phase is CrossPhase.ABORTED
        assert balances(ledger) == initial

    def test_two_thirds_policy_tolerates_one_missing(self):
        ledger = make_ledger(CrossShardConfig(threshold_policy=ThresholdPolicy.TWO_THIRDS, lock_timeout_us=1000))
        record = ledger.open(transfer([(0, 5), (1, 5), (2, 5)], [(3, 15)]))
        validate_all(ledger, record, overrides={2: {"sign": lambda digest: None}})
        ledger.collect_and_combine(record)
        assert record.phase is CrossPhase.COLLECTED
        assert ledger.verify_sigma(record)


class TestGlobalOrder:
    def collected(self, ledger, count):
        records = []
        for index in range(count):
            record = ledger.open(transfer([(index, 5)], [((index + 1) % ACCOUNTS, 5)]))
            validate_all(ledger, record)
            ledger.collect_and_combine(record)
            records.append(record)
        return records

    def test_batch_is_decided_identically(self):
        ledger = make_ledger()
        records = self.collected(ledger, 3)
        group = committee()
        batch = ledger.global_order(group, seq=1)
        assert batch is not None and batch.tx_ids() == [record.tx_id for record in records]
        assert all(record.phase is CrossPhase.GLOBALLY_ORDERED for record in records)
        assert check_agreement(group.last_instances.values())
        assert {instance.decided_value for instance in group.last_instances.values()} == {batch.digest}

    def test_under_signed_aggregate_excluded(self):
        ledger = make_ledger()
        record = ledger.open(transfer([(0, 10), (1, 10)], [(2, 20)]))
        validate_all(ledger, record)
        ledger.collect_and_combine(record)
        weak = ledger.registry().with_threshold(1).combine([record.partials[0]])
        record.sigma = weak
        batch = ledger.global_order(committee(), seq=1)
        assert batch.entries == ()
        assert record.phase is CrossPhase.ABORTED

    def test_empty_batch(self):
        ledger = make_ledger()
        batch = ledger.global_order(committee(), seq=4)
        assert batch == OrderedBatch(seq=4)

    def test_leader_crash_still_orders(self):
        ledger = make_ledger()
        self.collected(ledger, 2)
        batch = ledger.global_order(committee(crashed=(100,)), seq=1)
        assert batch is not None and len(batch.entries) == 2

    def test_no_quorum_keeps_records_pending(self):
        ledger = make_ledger()
        records = self.collected(ledger, 1)
        assert ledger.global_order(committee(crashed=(100, 101), max_steps=2000), seq=1) is None
        assert records[0].phase is CrossPhase.COLLECTED


def ordered(ledger, tx):
    record = ledger.open(tx)
    validate_all(ledger, record)
    ledger.collect_and_combine(record)
    batch = ledger.build_batch(1)
    ledger.mark_ordered(batch)
    return record, batch


class TestCommitOutputs:
    def test_legs_applied_once(self):
        ledger = make_ledger()
        record, batch = ordered(ledger, transfer([(0, 10), (1, 15)], [(2, 25)]))
        ledger.commit_outputs(record, batch)
        assert record.phase is CrossPhase.COMMITTED
        after = balances(ledger)
        assert (after[0], after[1], after[2]) == (90, 85, 125)
        assert supply(ledger) == ACCOUNTS * FUNDS

        ledger.commit_outputs(record, batch)
        assert balances(ledger) == after

    def test_crash_then_recover_matches_golden(self):
        tx = transfer([(0, 10)], [(1, 4), (2, 6)])
        golden = make_ledger()
        record, batch = ordered(golden, tx)
        golden.commit_outputs(record, batch)

        crashed = make_ledger()
        record, batch = ordered(crashed, tx)
        with pytest.raises(CommitCrash):
            crashed.commit_outputs(record, batch, crash_after=1)
        assert record.phase is CrossPhase.GLOBALLY_ORDERED
        crashed.recover()
        assert record.phase is CrossPhase.COMMITTED
        assert balances(crashed) == balances(golden)
        assert {s: crashed.shards[s].root for s in crashed.shards} == {s: golden.shards[s].root for s in golden.shards}

    def test_not_in_decision(self):
        ledger = make_ledger()
        record, _ = ordered(ledger, transfer([(0, 10)], [(1, 10)]))
        with pytest.raises(NotDecided):
            ledger.commit_outputs(record, OrderedBatch(seq=9))

    def test_view_tracks_roots(self):
        ledger = make_ledger()
        record, batch = ordered(ledger, transfer([(0, 10)], [(1, 10)]))
        ledger.commit_outputs(record, batch)
        assert ledger.view.roots == {shard_id: shard.root for shard_id, shard in ledger.shards.items()}


class TestProcessIntra:
    def test_funded_intra(self):
        ledger = make_ledger()
        ledger.process_intra(0, transfer([(0, 40)], [(3, 40)]))
        assert (balances(ledger)[0], balances(ledger)[3]) == (60, 140)

    @pytest.mark.parametrize("first_amount,second_amount", [(10, 20), (20, 10)])
    def test_conflicting_pair_single_winner(self, first_amount, second_amount):
        ledger = make_ledger()
        winners = 0
        for amount in (first_amount, second_amount):
            try:
                ledger.process_intra(0, transfer([(0, amount)], [(3, amount)]))
                winners += 1
            except NonceReplay:
                pass
        assert winners == 1
        assert balances(ledger)[0] == FUNDS - first_amount

    def test_cooldown_does_not_block(self):
        ledger = make_ledger()
        ledger.shards[0].cooldown_until = 99
        ledger.process_intra(0, transfer([(0, 1)], [(3, 1)]))
        assert balances(ledger)[3] == FUNDS + 1

    def test_cross_rejected(self):
        with pytest.raises(CrossShardError):
            make_ledger().process_intra(0, transfer([(0, 1)], [(1, 1)]))


class TestChangedAccounts:
    def test_writes_are_collected_per_shard(self):
        ledger = make_ledger()
        ledger.process_intra(0, transfer([(0, 5)], [(3, 5)]))
        ledger.credit(9, 1)
        ledger.credit(4, 1)
        assert ledger.take_changed(0) == [0, 3, 9]
        assert ledger.take_changed(1) == [4]
        assert ledger.take_changed(0) == []

    def test_limit_keeps_the_rest_pending(self):
        ledger = make_ledger()
        for account in (9, 0, 6, 3):
            ledger.credit(account, 1)
        assert ledger.take_changed(0, limit=3) == [0, 3, 6]
        assert ledger.take_changed(0, limit=3) == [9]

    def test_accounts_that_left_are_dropped(self):
        ledger = make_ledger()
        ledger.credit(3, 1)
        ledger.credit(6, 1)
        shard = ledger.shards[0]
        shard.state = ShardState(
            balances={account: balance for account, balance in shard.state.balances.items() if account != 3},
            version=shard.state.version + 1,
        )
        assert ledger.take_changed(0) == [6]


FAULTS = ["none", "withhold", "forge", "leader_crash", "commit_crash"]


@given(
    fault=st.sampled_from(FAULTS),
    seed=st.integers(min_value=0, max_value=10_000),
    amounts=st.lists(st.integers(min_value=1, max_value=40), min_size=1, max_size=4),
)
@settings(max_examples=100, deadline=None)
def test_property_all_or_nothing(fault, seed, amounts):
    """Every cross-shard transfer ends fully applied or fully absent; supply is exact."""
    ledger = make_ledger()
    initial = balances(ledger)
    records = []
    for index, amount in enumerate(amounts):
        sender, cosigner, receiver = index, index + 1, index + 5
        tx = transfer([(sender, amount), (cosigner, amount)], [(receiver, 2 * amount)])
        record = ledger.open(tx)
        overrides = {}
        if fault == "withhold":
            overrides = {ledger.homes[cosigner]: {"sign": lambda digest: None}}
        elif fault == "forge":
            overrides = {ledger.homes[cosigner]: {"sign": forged(ledger.homes[cosigner])}}
        validate_all(ledger, record, overrides=overrides)
        ledger.collect_and_combine(record, now=5000)
        records.append(record)

    crashed = (100,) if fault == "leader_crash" else ()
    batch = ledger.global_order(committee(seed, crashed), seq=1, now=5000)
    if batch is not None:
        for record in ledger.mark_ordered(batch):
            try:
                ledger.commit_outputs(record, batch, crash_after=1 if fault == "commit_crash" else None)
            except CommitCrash:
                pass
        ledger.recover()

    final = balances(ledger)
    assert supply(ledger) == ACCOUNTS * FUNDS
    expected = dict(initial)
    for record in records:
        assert record.phase in (CrossPhase.COMMITTED, CrossPhase.ABORTED)
        if record.phase is CrossPhase.COMMITTED:
            for leg in record.tx.inputs:
                expected[leg.account] -= leg.amount
            for leg in record.tx.outputs:
                expected[leg.account] += leg.amount
    assert final == expected
    if fault in ("withhold", "forge"):
        assert all(record.phase is CrossPhase.ABORTED for record in records)
