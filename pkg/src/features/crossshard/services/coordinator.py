"""
Threshold-signed cross-shard commit.

Input shards escrow their legs and sign h(tx); the combined signature is
ordered by the global committee; outputs are then credited at the accounts'
current homes. Every mutation goes through `write` so trees and the global
view stay in step with shard state.
"""

import logging
from collections import defaultdict
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Set

from src.features.crossshard.constants import SHARD_KEY_GROUP
from src.features.crossshard.domain import (
    AbortReason,
    CommitCrash,
    CommitJournal,
    CrossPhase,
    CrossShardConfig,
    CrossShardError,
    CrossTxRecord,
    Escrow,
    GlobalStateView,
    NotDecided,
    OrderedBatch,
    OrderingCommittee,
    ShardBusy,
)
from src.features.ledger.domain import (
    Digest,
    InsufficientBalance,
    IntraShard,
    LedgerError,
    ShardMap,
    ShardState,
    SignedLeg,
    Transaction,
)
from src.features.ledger.services import apply, classify, consume_nonce
from src.features.merkle.services import refresh_accounts
from src.features.sharding.domain import Shard
from src.features.threshold.domain import PartialSignature, ThresholdError
from src.features.threshold.services import ShareRegistry, keygen, required_signers
from src.shared.utils import derive_seed

logger = logging.getLogger(__name__)

Signer = Callable[[Digest], Optional[PartialSignature]]


class CrossShardLedger:
    """Shard states, account homes and every open cross-shard record."""

    def __init__(
        self,
        shards: Dict[int, Shard],
        homes: ShardMap,
        config: Optional[CrossShardConfig] = None,
        seed: int = 0,
    ):
        self.shards = shards
        self.homes = homes
        self.config = config or CrossShardConfig()
        self.seed = seed
        self.keyring: Dict[int, ShareRegistry] = {}
        self.key_epoch = 0
        self.view = GlobalStateView()
        self.journal = CommitJournal()
        self.records: Dict[Digest, CrossTxRecord] = {}
        self.rolled_back: set = set()
        self.changed: Dict[int, Set[int]] = defaultdict(set)
        self._next_seq = 0
        self.rekey(0)
        self.refresh_view()

    # Keys and views

    def active_ids(self) -> List[int]:
        return sorted(shard_id for shard_id, shard in self.shards.items() if shard.active)

    def rekey(self, epoch: int) -> ShareRegistry:
        """Deal fresh shard signing keys over the active shard set."""
        active = self.active_ids()
        registry = keygen(
            f"{SHARD_KEY_GROUP}-{epoch}",
            len(active),
            1,
            derive_seed(self.seed, "shard-keys", epoch),
            signer_ids=active,
        )
        self.keyring[epoch] = registry
        self.key_epoch = epoch
        return registry

    def registry(self, epoch: Optional[int] = None) -> ShareRegistry:
        return self.keyring[self.key_epoch if epoch is None else epoch]

    def refresh_view(self) -> None:
        active = self.active_ids()
        for shard_id in active:
            shard = self.shards[shard_id]
            self.view.observe(shard_id, shard.root, shard.state.version)
        self.view.retain(set(active))

    def write(self, shard: Shard, state: ShardState, accounts: Iterable[int]) -> None:
        shard.state = state
        accounts = list(accounts)
        shard.tree = refresh_accounts(shard.tree, state, accounts)
        self.changed[shard.shard_id].update(accounts)
        self.view.observe(shard.shard_id, shard.root, state.version)

    def take_changed(self, shard_id: int, limit: Optional[int] = None) -> List[int]:
        """
        Accounts of `shard_id` written since the last take, lowest ids first.

        With `limit` the rest stay pending for a later take. Accounts that
        moved away in the meantime are dropped.
        """
        pending = self.changed.pop(shard_id, set())
        shard = self.shards.get(shard_id)
        held = sorted(account for account in pending if shard is not None and account in shard.state.balances)
        if limit is None or len(held) <= limit:
            return held
        self.changed[shard_id].update(held[limit:])
        return held[:limit]

    def home_shard(self, account: int) -> Shard:
        return self.shards[self.homes[account]]

    def credit(self, account: int, amount: int) -> None:
        shard = self.home_shard(account)
        self.write(shard, apply(shard.state, SignedLeg(account, amount)), [account])

    # Records

    def open(self, tx: Transaction, now: int = 0) -> CrossTxRecord:
        """Record for `tx`, created on first sight."""
        record = self.records.get(tx.tx_id)
        if record is None:
            record = CrossTxRecord.open(tx, self._next_seq, now, self.key_epoch)
            self._next_seq += 1
            self.records[tx.tx_id] = record
        return record

    def pending_legs(self, shard_id: int, record: CrossTxRecord) -> List[int]:
        """Un-escrowed input legs whose account is currently homed at `shard_id`."""
        return sorted(
            index for index in record.pending_inputs
            if self.homes.get(record.tx.inputs[index].account) == shard_id
        )

    def validate_input(
        self,
        shard_id: int,
        record: CrossTxRecord,
        now: int = 0,
        sign: Optional[Signer] = None,
        nonce_check: bool = True,
    ) -> Optional[PartialSignature]:
        """
        Escrow this shard's input legs and return its partial signature.

        The sender leg (input 0) is nonce-checked; co-signer legs are only
        balance-checked. A refusal raises before anything is locked. `sign`
        replaces the shard's own signer and may withhold (return None).
        """
        shard = self.shards[shard_id]
        if not shard.active:
            raise ShardBusy(shard_id)
        legs = self.pending_legs(shard_id, record)
        tx = record.tx
        if record.phase is not CrossPhase.VALIDATING:
            if nonce_check and 0 in legs:
                self._burn_sender_nonce(shard, tx)
            raise CrossShardError(f"Record is {record.phase.value}, not validating.")
        if not legs:
            raise CrossShardError(f"Shard {shard_id} holds no pending input of this transaction.")

        # Untouched records follow the key epoch forward across a reconfiguration.
        if not record.escrows and not record.partials and shard_id not in self.registry(record.key_epoch):
            record.key_epoch = self.key_epoch
        registry = self.registry(record.key_epoch)
        if shard_id not in registry:
            if nonce_check and 0 in legs:
                self._burn_sender_nonce(shard, tx)
            raise CrossShardError(f"Shard {shard_id} has no key in epoch {record.key_epoch}.")

        state = shard.state
        try:
            for index in legs:
                leg = tx.inputs[index]
                checked = nonce_check and index == 0
                state = apply(state, SignedLeg(leg.account, -leg.amount, tx.nonce), nonce_check=checked)
        except InsufficientBalance:
            if nonce_check and 0 in legs:
                self._burn_sender_nonce(shard, tx)
            raise

        self.write(shard, state, [tx.inputs[index].account for index in legs])
        for index in legs:
            leg = tx.inputs[index]
            record.escrows[index] = Escrow(index, shard_id, leg.account, leg.amount)
            record.locks.add((shard_id, leg.account))
            record.pending_inputs.discard(index)
        if record.deadline is None:
            record.deadline = now + self.config.lock_timeout_us

        if sign is None:
            sign = registry.view_for(shard_id).sign
        partial = sign(tx.tx_id)
        if partial is not None:
            record.partials[shard_id] = partial
        return partial

    def collect_and_combine(self, record: CrossTxRecord, now: int = 0) -> CrossTxRecord:
        """Combine once every input is escrowed and enough partials verify; abort past the deadline."""
        if record.phase is not CrossPhase.VALIDATING:
            return record
        if not record.pending_inputs:
            sigma = self._try_combine(record)
            if sigma is not None:
                record.sigma = sigma
                record.phase = CrossPhase.COLLECTED
                record.collected_at = now
                return record
        if record.deadline is not None and now >= record.deadline:
            logger.debug("record %s missed its deadline", record.tx_id.hex()[:12])
            self.abort(record, AbortReason.DEADLINE, now)
        return record

    def _try_combine(self, record: CrossTxRecord):
        shards = record.signing_shards
        threshold = required_signers(len(shards), self.config.threshold_policy)
        partials = [
            record.partials[shard_id] for shard_id in shards
            if shard_id in record.partials and record.partials[shard_id].message_digest == record.tx_id
        ]
        try:
            return self.registry(record.key_epoch).with_threshold(threshold).combine(partials)
        except ThresholdError:
            return None

    def verify_sigma(self, record: CrossTxRecord) -> bool:
        """Aggregate verifies under the record's key epoch and only input shards signed."""
        sigma = record.sigma
        if sigma is None or sigma.message_digest != record.tx_id:
            return False
        shards = record.signing_shards
        if not set(sigma.signer_set) <= set(shards):
            return False
        threshold = required_signers(len(shards), self.config.threshold_policy)
        registry = self.keyring.get(record.key_epoch)
        return registry is not None and registry.with_threshold(threshold).verify_threshold(sigma)

    def refuse(self, record: CrossTxRecord, reason: str, now: int = 0) -> None:
        record.refusal = reason
        self.abort(record, AbortReason.REFUSED, now)

    def abort(self, record: CrossTxRecord, reason: AbortReason, now: int = 0) -> None:
        """Release every escrow back to its account; no output is touched."""
        if record.settled:
            return
        if record.phase is CrossPhase.GLOBALLY_ORDERED:
            raise CrossShardError("Ordered records cannot abort.")
        for index in sorted(record.escrows):
            escrow = record.escrows[index]
            self.credit(escrow.account, escrow.amount)
        record.escrows.clear()
        record.locks.clear()
        record.phase = CrossPhase.ABORTED
        record.abort_reason = reason

    # Ordering

    def collected(self) -> List[CrossTxRecord]:
        return sorted(
            (record for record in self.records.values() if record.phase is CrossPhase.COLLECTED),
            key=lambda record: record.seq,
        )

    def build_batch(self, seq: int, records: Optional[Sequence[CrossTxRecord]] = None, now: int = 0) -> OrderedBatch:
        """
        Next batch proposal: collected records in opening order.

        Records whose aggregate fails verification are dropped from the list
        and aborted.
        """
        pool = self.collected() if records is None else sorted(records, key=lambda record: record.seq)
        entries = []
        for record in pool:
            if len(entries) >= self.config.batch_size:
                break
            if record.phase is not CrossPhase.COLLECTED:
                continue
            if not self.verify_sigma(record):
                self.refuse(record, "aggregate signature does not verify", now)
                continue
            entries.append((record.tx_id, record.sigma))
        return OrderedBatch(seq=seq, entries=tuple(entries))

    def mark_ordered(self, batch: OrderedBatch, now: int = 0) -> List[CrossTxRecord]:
        ordered = []
        for tx_id in batch.tx_ids():
            record = self.records[tx_id]
            if record.phase is CrossPhase.COLLECTED:
                record.phase = CrossPhase.GLOBALLY_ORDERED
                record.ordered_at = now
            self.journal.decisions.setdefault(tx_id, batch.seq)
            ordered.append(record)
        return ordered

    def global_order(
        self,
        committee: OrderingCommittee,
        seq: int,
        records: Optional[Sequence[CrossTxRecord]] = None,
        now: int = 0,
    ) -> Optional[OrderedBatch]:
        """Agree on one batch; records stay collected when the committee does not decide."""
        batch = self.build_batch(seq, records, now)
        decided = committee.agree(seq, batch.digest)
        if decided != batch.digest:
            logger.info("committee did not decide batch %s", seq)
            return None
        self.mark_ordered(batch, now)
        return batch

    # Commit

    def commit_outputs(
        self,
        record: CrossTxRecord,
        batch: OrderedBatch,
        now: int = 0,
        crash_after: Optional[int] = None,
    ) -> CrossTxRecord:
        """Credit every output leg once; repeated delivery of the decision is a no-op."""
        if record.tx_id not in batch:
            raise NotDecided()
        if record.phase is CrossPhase.COLLECTED:
            self.mark_ordered(OrderedBatch(seq=batch.seq, entries=((record.tx_id, record.sigma),)), now)
        return self._finish(record, now, crash_after)

    def recover(self, now: int = 0) -> List[CrossTxRecord]:
        """Replay every decided but unfinished commit from its journal entry."""
        return [self._finish(self.records[tx_id], now, None) for tx_id in self.journal.incomplete()]

    def _finish(self, record: CrossTxRecord, now: int, crash_after: Optional[int]) -> CrossTxRecord:
        tx_id = record.tx_id
        if record.phase is CrossPhase.COMMITTED or tx_id in self.journal.complete:
            return record
        if record.phase is not CrossPhase.GLOBALLY_ORDERED:
            raise CrossShardError(f"Record is {record.phase.value}, not ordered.")

        outputs = record.tx.outputs
        applied = self.journal.applied.setdefault(tx_id, set())
        for index, leg in enumerate(outputs):
            if index in applied:
                continue
            self.credit(leg.account, leg.amount)
            applied.add(index)
            if crash_after is not None and len(applied) >= crash_after and len(applied) < len(outputs):
                raise CommitCrash(len(applied))

        self.journal.complete.add(tx_id)
        record.escrows.clear()
        record.locks.clear()
        record.phase = CrossPhase.COMMITTED
        record.committed_at = now
        return record

    # Intra-shard

    def process_intra(self, shard_id: int, tx: Transaction, nonce_check: bool = True) -> ShardState:
        """Apply an intra-shard transaction already ordered by the shard's own consensus."""
        shard = self.shards[shard_id]
        if not shard.active:
            raise ShardBusy(shard_id)
        if classify(tx, self.homes) != IntraShard(shard_id):
            raise CrossShardError(f"Transaction is not intra-shard for shard {shard_id}.")

        legs = [
            SignedLeg(leg.account, -leg.amount, tx.nonce) for leg in tx.inputs
        ] + [SignedLeg(leg.account, leg.amount) for leg in tx.outputs]
        state = shard.state
        try:
            for index, leg in enumerate(legs):
                state = apply(state, leg, nonce_check=nonce_check and index == 0)
        except InsufficientBalance:
            if nonce_check:
                self._burn_sender_nonce(shard, tx)
            raise
        self.write(shard, state, tx.accounts())
        return state

    def _burn_sender_nonce(self, shard: Shard, tx: Transaction) -> None:
        try:
            state = consume_nonce(shard.state, tx.sender, tx.nonce)
        except LedgerError:
            return
        self.write(shard, state, [tx.sender])

    # Inspection

    def committed(self) -> List[CrossTxRecord]:
        return sorted(
            (record for record in self.records.values() if record.phase is CrossPhase.COMMITTED),
            key=lambda record: record.seq,
        )

    def open_records(self) -> List[CrossTxRecord]:
        return [record for record in self.records.values() if not record.settled]

    def escrowed_total(self) -> int:
        return sum(record.escrowed_total() for record in self.records.values())

    def touching(self, shard_ids: Iterable[int]) -> List[CrossTxRecord]:
        """Unsettled records holding escrow or locks in any of `shard_ids`."""
        wanted = set(shard_ids)
        return [
            record for record in self.open_records()
            if any(shard_id in wanted for shard_id, _ in record.locks)
        ]
