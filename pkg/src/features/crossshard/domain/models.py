"""
Domain models for the cross-shard feature.
"""

from typing import Dict, List, NamedTuple, Optional, Set, Tuple

from pydantic import BaseModel, ConfigDict, Field, computed_field

from src.features.crossshard.constants import (
    DEFAULT_BATCH_INTERVAL_US,
    DEFAULT_BATCH_SIZE,
    DEFAULT_COMMITTEE_FRACTION,
    DEFAULT_LOCK_TIMEOUT_US,
    MIN_COMMITTEE,
)
from src.features.crossshard.domain.enums import AbortReason, CrossPhase
from src.features.ledger.domain import Digest, DomainTag, Transaction, enc_list, enc_u64, hash_digest
from src.features.threshold.domain import PartialSignature, ThresholdPolicy, ThresholdSignatureValue


class CrossShardConfig(BaseModel):
    """Tunables of cross-shard coordination."""
    model_config = ConfigDict(frozen=True)

    batch_size: int = Field(default=DEFAULT_BATCH_SIZE, gt=0)
    batch_interval_us: int = Field(default=DEFAULT_BATCH_INTERVAL_US, gt=0)
    lock_timeout_us: int = Field(default=DEFAULT_LOCK_TIMEOUT_US, gt=0)
    committee_fraction: float = Field(default=DEFAULT_COMMITTEE_FRACTION, gt=0, le=1)
    min_committee: int = Field(default=MIN_COMMITTEE, ge=1)
    threshold_policy: ThresholdPolicy = ThresholdPolicy.ALL_INPUTS


class Escrow(NamedTuple):
    """Funds debited from one input leg and held by the record."""
    leg_index: int
    shard_id: int
    account: int
    amount: int


class CrossTxRecord(BaseModel):
    """
    Coordination state of one cross-shard transaction.

    Input legs are escrowed (debited) by the shard that validates them.
    The funds live only in `escrows` until the record commits, which consumes
    them, or aborts, which credits them back.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    tx: Transaction
    seq: int = Field(..., ge=0, description="Opening order, used for deterministic batching")
    phase: CrossPhase = CrossPhase.VALIDATING
    opened_at: int = 0
    deadline: Optional[int] = None
    key_epoch: int = 0
    pending_inputs: Set[int] = Field(default_factory=set)
    escrows: Dict[int, Escrow] = Field(default_factory=dict)
    partials: Dict[int, PartialSignature] = Field(default_factory=dict)
    sigma: Optional[ThresholdSignatureValue] = None
    locks: Set[Tuple[int, int]] = Field(default_factory=set)
    participants: Tuple[int, ...] = ()
    votes: Dict[int, bool] = Field(default_factory=dict)
    abort_reason: Optional[AbortReason] = None
    refusal: Optional[str] = None
    collected_at: Optional[int] = None
    ordered_at: Optional[int] = None
    committed_at: Optional[int] = None

    @classmethod
    def open(cls, tx: Transaction, seq: int, now: int = 0, key_epoch: int = 0) -> "CrossTxRecord":
        return cls(
            tx=tx,
            seq=seq,
            opened_at=now,
            key_epoch=key_epoch,
            pending_inputs=set(range(len(tx.inputs))),
        )

    @property
    def tx_id(self) -> Digest:
        return self.tx.tx_id

    @property
    def signing_shards(self) -> List[int]:
        """Shards holding an escrow for this record."""
        return sorted({escrow.shard_id for escrow in self.escrows.values()})

    @property
    def settled(self) -> bool:
        return self.phase in (CrossPhase.COMMITTED, CrossPhase.ABORTED)

    def escrowed_total(self) -> int:
        return sum(escrow.amount for escrow in self.escrows.values())


class GlobalStateView(BaseModel):
    """One observer's picture of every active shard's state root."""

    roots: Dict[int, Digest] = Field(default_factory=dict)
    versions: Dict[int, int] = Field(default_factory=dict)
    version: int = Field(default=0, ge=0)

    def observe(self, shard_id: int, root: Digest, shard_version: int) -> bool:
        """Adopt a root if it is newer than the one held; returns whether it changed."""
        if shard_version <= self.versions.get(shard_id, -1):
            return False
        self.roots[shard_id] = root
        self.versions[shard_id] = shard_version
        self.version += 1
        return True

    def retain(self, active: Set[int]) -> None:
        """Drop shards that are no longer active."""
        stale = [shard_id for shard_id in self.roots if shard_id not in active]
        for shard_id in stale:
            del self.roots[shard_id]
            self.versions.pop(shard_id, None)
        if stale:
            self.version += 1


def _encode_entry(entry: Tuple[Digest, ThresholdSignatureValue]) -> bytes:
    tx_id, sigma = entry
    return tx_id + sigma.agg + enc_list(sigma.signer_set, enc_u64)


class OrderedBatch(BaseModel):
    """Ordered (tx_id, aggregate signature) list the committee agrees on."""
    model_config = ConfigDict(frozen=True)

    seq: int = Field(..., ge=0)
    entries: Tuple[Tuple[Digest, ThresholdSignatureValue], ...] = ()

    @computed_field
    @property
    def digest(self) -> Digest:
        return hash_digest(DomainTag.BATCH, enc_u64(self.seq) + enc_list(self.entries, _encode_entry))

    def tx_ids(self) -> List[Digest]:
        return [tx_id for tx_id, _ in self.entries]

    def __contains__(self, tx_id: Digest) -> bool:
        return any(entry_id == tx_id for entry_id, _ in self.entries)


class CommitJournal(BaseModel):
    """Output legs applied per transaction; survives a crash mid-commit."""

    applied: Dict[Digest, Set[int]] = Field(default_factory=dict)
    complete: Set[Digest] = Field(default_factory=set)
    decisions: Dict[Digest, int] = Field(default_factory=dict)

    def incomplete(self) -> List[Digest]:
        return sorted(tx_id for tx_id in self.decisions if tx_id not in self.complete)
