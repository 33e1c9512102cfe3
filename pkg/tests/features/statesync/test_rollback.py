"""
Golden-replay test for rollback of committed cross-shard transactions.

**Feature: adaptive-shard-simulator, Property 13: Rollback Equals Golden Replay**
"""

import pytest
from hypothesis import given, strategies as st, settings

import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent.parent.parent.parent))

from src.features.ledger.domain import Leg, Transaction
from src.features.statesync.domain import UnknownTx
from src.features.statesync.services import NonceIndex, decision_of, rollback
from tests.features.statesync.test_dispute import balances, commit, transfer
from tests.features.statesync.test_gossip import build_ledger


class TestRollback:
    def test_commit_then_rollback_restores_balances(self):
        ledger = build_ledger(shard_count=4)
        before = balances(ledger)
        record = commit(ledger, transfer(ledger, 0, 1, 40), position=1)
        report = rollback(ledger, record.tx_id)
        assert balances(ledger) == before
        assert (report.recovered, report.shortfall) == (40, 0)
        assert report.shards == (0, 1)

    def test_never_committed(self):
        ledger = build_ledger(shard_count=4)
        record = ledger.open(transfer(ledger, 0, 1, 40))
        with pytest.raises(UnknownTx):
            rollback(ledger, record.tx_id)
        with pytest.raises(UnknownTx):
            rollback(ledger, b"\x00" * 32)

    def test_second_rollback_is_unknown(self):
        ledger = build_ledger(shard_count=4)
        record = commit(ledger, transfer(ledger, 0, 1, 40), position=1)
        rollback(ledger, record.tx_id)
        with pytest.raises(UnknownTx):
            rollback(ledger, record.tx_id)

    def test_spent_credit_reports_shortfall(self):
        ledger = build_ledger(shard_count=4)
        record = commit(ledger, transfer(ledger, 0, 1, 30), position=1)
        spend = Transaction(
            inputs=(Leg(shard_id=1, account=1, amount=120),),
            outputs=(Leg(shard_id=1, account=5, amount=120),),
            nonce=1,
        )
        ledger.process_intra(1, spend)
        report = rollback(ledger, record.tx_id)
        assert (report.recovered, report.shortfall) == (10, 20)
        after = balances(ledger)
        assert (after[0], after[1], after[5]) == (80, 0, 220)
        assert sum(after.values()) == 8 * 100


@given(
    transfers=st.lists(
        st.tuples(st.integers(min_value=0, max_value=7), st.integers(min_value=0, max_value=7), st.integers(1, 20)),
        min_size=1,
        max_size=4,
    ),
    victim=st.integers(min_value=0, max_value=5),
)
@settings(max_examples=100, deadline=None)
def test_property_rollback_matches_replay_without_tx(transfers, victim):
    """Rolling back one commit leaves the balances of a run that never had it."""
    moves = [(sender, receiver, amount) for sender, receiver, amount in transfers if sender % 4 != receiver % 4]
    if not moves:
        return
    victim %= len(moves)

    ledger = build_ledger(shard_count=4)
    golden = build_ledger(shard_count=4)
    nonces = {}
    committed = []
    for position, (sender, receiver, amount) in enumerate(moves, start=1):
        nonces[sender] = nonces.get(sender, 0) + 1
        tx = transfer(ledger, sender, receiver, amount, nonce=nonces[sender])
        committed.append(commit(ledger, tx, position))
        if position - 1 != victim:
            commit(golden, tx, position, nonce_check=False)

    report = rollback(ledger, committed[victim].tx_id)
    assert report.shortfall == 0
    assert balances(ledger) == balances(golden)


class TestNonceIndex:
    def test_first_spend_owns_slot(self):
        ledger = build_ledger(shard_count=4)
        index = NonceIndex()
        first = decision_of(transfer(ledger, 0, 1, 5), 1)
        replay = decision_of(transfer(ledger, 0, 2, 5), 2)
        assert index.record(first) is None
        assert index.record(first) is None
        conflict = index.record(replay)
        assert conflict.first == first and conflict.second == replay
        assert index.first_spend(0, 1) == first

    def test_forget_promotes_replay(self):
        ledger = build_ledger(shard_count=4)
        index = NonceIndex()
        first = decision_of(transfer(ledger, 0, 1, 5), 1)
        replay = decision_of(transfer(ledger, 0, 2, 5), 2)
        index.record(first)
        index.record(replay)
        index.forget(first.tx_id)
        assert index.first_spend(0, 1) == replay
        assert not index.is_replay(replay.tx_id)
