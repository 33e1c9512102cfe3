"""
Lock-based two-phase commit used by the static baseline.

The lowest-id input shard coordinates. Every participant prepares its own
legs under exclusive account locks, the coordinator decides, and each
participant then commits or releases. Locked accounts block every other
access until released; a conflicting prepare votes no instead of waiting.
"""

import logging
from typing import Dict, Iterable, List, Optional

from src.features.crossshard.domain import (
    AbortReason,
    CrossPhase,
    CrossShardError,
    CrossTxRecord,
)
from src.features.crossshard.services.coordinator import CrossShardLedger
from src.features.ledger.domain import Digest, LedgerError, NonceGap, SignedLeg, Transaction
from src.features.ledger.services import apply, consume_nonce

logger = logging.getLogger(__name__)


class TwoPhaseCoordinator:
    """Prepare/decide/commit over the ledger's shards with account locks."""

    def __init__(self, ledger: CrossShardLedger):
        self.ledger = ledger
        self.locks: Dict[int, Digest] = {}

    def open(self, tx: Transaction, now: int = 0) -> CrossTxRecord:
        record = self.ledger.open(tx, now)
        if not record.participants:
            homes = self.ledger.homes
            record.participants = tuple(sorted(
                {homes[leg.account] for leg in tx.inputs} | {homes[leg.account] for leg in tx.outputs}
            ))
            record.deadline = now + self.ledger.config.lock_timeout_us
        return record

    def coordinator(self, record: CrossTxRecord) -> int:
        homes = self.ledger.homes
        return min(homes[leg.account] for leg in record.tx.inputs)

    def blocked(self, accounts: Iterable[int], owner: Optional[Digest] = None) -> bool:
        """Whether any account is locked by a transaction other than `owner`."""
        return any(self.locks.get(account, owner) != owner for account in accounts)

    def _local_accounts(self, shard_id: int, record: CrossTxRecord) -> List[int]:
        homes = self.ledger.homes
        return sorted({
            leg.account for leg in (*record.tx.inputs, *record.tx.outputs) if homes[leg.account] == shard_id
        })

    def prepare(self, shard_id: int, record: CrossTxRecord) -> bool:
        """
        Vote on this shard's legs.

        The sender's nonce is consumed here, vote yes or no, so later
        transactions from the same account stay in sequence. A nonce that is
        ahead of sequence raises NonceGap and the caller retries later.
        """
        if shard_id in record.votes:
            return record.votes[shard_id]
        tx = record.tx
        ledger = self.ledger
        shard = ledger.shards[shard_id]
        accounts = self._local_accounts(shard_id, record)
        sender_here = ledger.homes[tx.sender] == shard_id

        if sender_here:
            try:
                ledger.write(shard, consume_nonce(shard.state, tx.sender, tx.nonce), [tx.sender])
            except NonceGap:
                raise
            except LedgerError:
                return self._vote(shard_id, record, False)
        if record.phase is CrossPhase.ABORTED:
            return self._vote(shard_id, record, False)
        if self.blocked(accounts, record.tx_id):
            return self._vote(shard_id, record, False)

        scratch = shard.state
        try:
            for leg in tx.inputs:
                if ledger.homes[leg.account] == shard_id:
                    scratch = apply(scratch, SignedLeg(leg.account, -leg.amount), nonce_check=False)
        except LedgerError:
            return self._vote(shard_id, record, False)

        for account in accounts:
            self.locks[account] = record.tx_id
            record.locks.add((shard_id, account))
        return self._vote(shard_id, record, True)

    def _vote(self, shard_id: int, record: CrossTxRecord, vote: bool) -> bool:
        record.votes[shard_id] = vote
        return vote

    def ready(self, record: CrossTxRecord, now: int) -> bool:
        """Coordinator can decide: every vote is in, a no arrived, or the deadline passed."""
        votes = record.votes
        if any(vote is False for vote in votes.values()):
            return True
        if all(shard_id in votes for shard_id in record.participants):
            return True
        return record.deadline is not None and now >= record.deadline

    def decide(self, record: CrossTxRecord, now: int = 0) -> bool:
        """Commit iff every participant voted yes; missing votes count as no."""
        if record.phase is not CrossPhase.VALIDATING:
            return record.phase in (CrossPhase.GLOBALLY_ORDERED, CrossPhase.COMMITTED)
        commit = all(record.votes.get(shard_id) is True for shard_id in record.participants)
        if commit:
            record.phase = CrossPhase.GLOBALLY_ORDERED
            record.ordered_at = now
        else:
            record.phase = CrossPhase.ABORTED
            record.abort_reason = AbortReason.VOTED_NO
            self._release(record, record.participants)
        return commit

    def commit(self, shard_id: int, record: CrossTxRecord, now: int = 0) -> None:
        """Apply this shard's legs of a decided transaction and release its locks."""
        if record.phase is CrossPhase.ABORTED:
            self._release(record, [shard_id])
            return
        if record.phase not in (CrossPhase.GLOBALLY_ORDERED, CrossPhase.COMMITTED):
            raise CrossShardError("Commit before a decision.")
        done = {shard for shard, _ in record.locks}
        if shard_id not in done:
            return

        ledger = self.ledger
        shard = ledger.shards[shard_id]
        tx = record.tx
        legs = [
            SignedLeg(leg.account, -leg.amount) for leg in tx.inputs if ledger.homes[leg.account] == shard_id
        ] + [
            SignedLeg(leg.account, leg.amount) for leg in tx.outputs if ledger.homes[leg.account] == shard_id
        ]
        state = shard.state
        for leg in legs:
            state = apply(state, leg, nonce_check=False)
        ledger.write(shard, state, self._local_accounts(shard_id, record))
        self._release(record, [shard_id])
        if not record.locks:
            record.phase = CrossPhase.COMMITTED
            record.committed_at = now

    def _release(self, record: CrossTxRecord, shard_ids: Iterable[int]) -> None:
        wanted = set(shard_ids)
        for shard_id, account in sorted(record.locks):
            if shard_id in wanted:
                if self.locks.get(account) == record.tx_id:
                    del self.locks[account]
                record.locks.discard((shard_id, account))
