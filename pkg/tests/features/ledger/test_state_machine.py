"""
Property-based test for state application and routing.

**Feature: adaptive-shard-simulator, Property 2: Pure State Application**
"""

import pytest
from hypothesis import given, strategies as st, settings

import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent.parent.parent.parent))

from src.features.ledger.domain import (
    CrossShard,
    InsufficientBalance,
    IntraShard,
    Leg,
    NonceGap,
    NonceReplay,
    ShardMap,
    ShardState,
    SignedLeg,
    Transaction,
    TxKind,
    UnknownAccount,
)
from src.features.ledger.services import apply, apply_all, classify, consume_nonce, total_supply


def transfer(inputs, outputs, nonce=1):
    return Transaction(
        inputs=tuple(Leg(shard_id=0, account=a, amount=v) for a, v in inputs),
        outputs=tuple(Leg(shard_id=0, account=a, amount=v) for a, v in outputs),
        nonce=nonce,
    )


class TestClassify:
    def test_single_shard(self):
        shard_map = ShardMap({1: 3, 2: 3})
        assert classify(transfer([(1, 5)], [(2, 5)]), shard_map) == IntraShard(3)

    def test_cross_shard_sets(self):
        shard_map = ShardMap({1: 1, 2: 2, 3: 3, 4: 3})
        result = classify(transfer([(1, 5), (2, 5)], [(3, 4), (4, 6)]), shard_map)
        assert result == CrossShard(inputs=frozenset({1, 2}), outputs=frozenset({3}))
        assert result.kind is TxKind.CROSS
        assert result.shards == frozenset({1, 2, 3})

    def test_unmapped_account(self):
        with pytest.raises(UnknownAccount):
            classify(transfer([(1, 5)], [(99, 5)]), ShardMap({1: 0}))

    def test_leg_hints_are_ignored(self):
        tx = Transaction(
            inputs=(Leg(shard_id=7, account=1, amount=1),),
            outputs=(Leg(shard_id=8, account=2, amount=1),),
            nonce=1,
        )
        assert classify(tx, ShardMap({1: 0, 2: 0})) == IntraShard(0)


class TestApply:
    def test_debit_arithmetic(self):
        state = ShardState.funded([1], 100)
        after = apply(state, SignedLeg(1, -40, 1))
        assert after.balance_of(1) == 60
        assert after.version == state.version + 1
        assert after.nonce_of(1) == 1
        assert state.balance_of(1) == 100

    def test_overdraft(self):
        state = ShardState.funded([1], 30)
        with pytest.raises(InsufficientBalance):
            apply(state, SignedLeg(1, -40, 1))

    def test_replayed_debit(self):
        state = apply(ShardState.funded([1], 100), SignedLeg(1, -10, 1))
        with pytest.raises(NonceReplay):
            apply(state, SignedLeg(1, -10, 1))

    def test_future_nonce(self):
        with pytest.raises(NonceGap):
            apply(ShardState.funded([1], 100), SignedLeg(1, -10, 3))

    def test_unchecked_debit_keeps_nonce(self):
        state = apply(ShardState.funded([1], 100), SignedLeg(1, -10), nonce_check=False)
        assert state.nonce_of(1) == 0
        assert state.balance_of(1) == 90

    def test_credit_to_foreign_account(self):
        with pytest.raises(UnknownAccount):
            apply(ShardState.funded([1], 100), SignedLeg(2, 10))

    def test_failed_batch_leaves_input(self):
        state = ShardState.funded([1, 2], 50)
        with pytest.raises(InsufficientBalance):
            apply_all(state, [SignedLeg(1, -20, 1), SignedLeg(2, -80, 1)])
        assert state.balance_of(1) == 50


@given(
    amounts=st.lists(st.integers(min_value=0, max_value=50), min_size=1, max_size=30),
)
@settings(max_examples=100)
def test_property_transfers_conserve_supply(amounts):
    """Debit/credit pairs never change the total, and replays give identical states."""
    initial = ShardState.funded([1, 2], 500)
    state = initial
    nonce = 0
    for amount in amounts:
        if state.balance_of(1) < amount:
            continue
        nonce += 1
        state = apply_all(state, [SignedLeg(1, -amount, nonce), SignedLeg(2, amount)])
    assert total_supply([state]) == total_supply([initial])

    replay = initial
    nonce = 0
    for amount in amounts:
        if replay.balance_of(1) < amount:
            continue
        nonce += 1
        replay = apply_all(replay, [SignedLeg(1, -amount, nonce), SignedLeg(2, amount)])
    assert replay == state


def test_shard_map_reverse_index():
    shard_map = ShardMap({1: 0, 2: 0, 3: 1})
    shard_map.assign(2, 1)
    assert shard_map.accounts_of(0) == [1]
    assert shard_map.accounts_of(1) == [2, 3]
    shard_map.assign(1, 1)
    assert shard_map.shards() == [1]


class TestConsumeNonce:
    def test_advances_without_moving_funds(self):
        state = consume_nonce(ShardState.funded([1], 10), 1, 1)
        assert state.nonce_of(1) == 1
        assert state.balance_of(1) == 10

    def test_replay_and_gap(self):
        state = ShardState.funded([1], 10)
        with pytest.raises(NonceGap):
            consume_nonce(state, 1, 2)
        with pytest.raises(NonceReplay):
            consume_nonce(consume_nonce(state, 1, 1), 1, 1)
