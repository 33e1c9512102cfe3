"""
Domain models for the state-sync feature.
"""

from typing import Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

from src.features.crossshard.domain import GlobalStateView
from src.features.ledger.domain import Digest, DomainTag, enc_bytes, enc_list, enc_u64, hash_digest
from src.features.merkle.domain import MerkleProof
from src.features.statesync.constants import (
    DEFAULT_DISPUTE_WINDOW_ROUNDS,
    DEFAULT_MAX_PROOFS,
    DEFAULT_REPUTATION_DECAY,
    DEFAULT_SLASH_FRACTION,
)
from src.features.statesync.domain.enums import ChallengeStatus, Outcome, Verdict
from src.features.threshold.domain import PartialSignature


class SyncConfig(BaseModel):
    """Gossip and dispute tunables."""
    model_config = ConfigDict(frozen=True)

    dispute_window_rounds: int = Field(default=DEFAULT_DISPUTE_WINDOW_ROUNDS, gt=0)
    slash_fraction: float = Field(default=DEFAULT_SLASH_FRACTION, ge=0, le=1)
    reputation_decay: float = Field(default=DEFAULT_REPUTATION_DECAY, ge=0, le=1)
    gossip_fanout: Optional[int] = Field(default=None, gt=0, description="None means ceil(log2 n) + 1")
    observers_vote: bool = Field(default=True, description="Shards outside the transaction may vote")
    max_proofs: int = Field(default=DEFAULT_MAX_PROOFS, ge=0, description="Proofs attached per root announcement")


def _encode_proof(proof: MerkleProof) -> bytes:
    return proof.key + proof.value


class GossipMsg(BaseModel):
    """A shard's signed root announcement with proofs for the records it changed."""
    model_config = ConfigDict(frozen=True)

    origin_shard: int = Field(..., ge=0)
    root: Digest
    version: int = Field(..., ge=0)
    key_epoch: int = 0
    proofs: Tuple[MerkleProof, ...] = ()
    signature: Optional[PartialSignature] = None

    @computed_field
    @property
    def digest(self) -> Digest:
        payload = (
            enc_u64(self.origin_shard)
            + enc_bytes(self.root)
            + enc_u64(self.version)
            + enc_u64(self.key_epoch)
            + enc_list(self.proofs, _encode_proof)
        )
        return hash_digest(DomainTag.GOSSIP, payload)


class GossipNode(BaseModel):
    """What one shard has heard: the newest message per origin and what it rejected."""

    shard_id: int
    view: GlobalStateView = Field(default_factory=GlobalStateView)
    latest: Dict[int, GossipMsg] = Field(default_factory=dict)
    rejected: List[GossipMsg] = Field(default_factory=list)

    def known_version(self, origin: int) -> int:
        message = self.latest.get(origin)
        return -1 if message is None else message.version


class GossipReport(BaseModel):
    """Counts from one gossip round."""

    round_no: int
    adopted: int = 0
    stale: int = 0
    rejected: int = 0


class DecisionRecord(BaseModel):
    """One committed spend: the (account, nonce) it consumed and where it was ordered."""
    model_config = ConfigDict(frozen=True)

    tx_id: Digest
    account: int
    nonce: int
    position: int = Field(..., ge=0, description="Batch sequence or block height of the commit")
    signer_set: Tuple[int, ...] = ()


class ProofEvidence(BaseModel):
    """A Merkle proof together with the root it claims to verify against."""
    model_config = ConfigDict(frozen=True)

    shard_id: int
    root: Digest
    proof: MerkleProof
    version: int = 0


class ConflictEvidence(BaseModel):
    """Two committed spends of the same (account, nonce)."""
    model_config = ConfigDict(frozen=True)

    first: DecisionRecord
    second: DecisionRecord

    @model_validator(mode="after")
    def validate_conflict(self) -> "ConflictEvidence":
        if (self.first.account, self.first.nonce) != (self.second.account, self.second.nonce):
            raise ValueError("Conflicting records must spend the same account nonce")
        if self.first.tx_id == self.second.tx_id:
            raise ValueError("Conflicting records must name different transactions")
        return self


Evidence = Union[ProofEvidence, ConflictEvidence]


class Vote(BaseModel):
    """A shard's weighted verdict on a challenge."""
    model_config = ConfigDict(frozen=True)

    shard_id: int
    verdict: Verdict
    stake: float = Field(..., ge=0)
    reputation: float = Field(..., ge=0, le=1)
    evidence_attached: Tuple[Evidence, ...] = ()
    signature: Optional[PartialSignature] = None

    @computed_field
    @property
    def effective_weight(self) -> float:
        return self.stake * self.reputation


class Challenge(BaseModel):
    """An open dispute over one committed transaction."""

    challenge_id: str
    disputed_tx: Digest
    challenger_shard: int
    evidence: Tuple[Evidence, ...] = Field(..., min_length=1)
    opened_at: int = Field(..., ge=0, description="Gossip round the challenge was opened in")
    closes_at: int = Field(..., ge=0)
    eligible: Tuple[int, ...] = ()
    involved: Tuple[int, ...] = ()
    votes: Dict[int, Vote] = Field(default_factory=dict)
    status: ChallengeStatus = ChallengeStatus.OPEN

    def weight_of(self, verdict: Verdict) -> float:
        return sum(vote.effective_weight for vote in self.votes.values() if vote.verdict is verdict)

    @property
    def cast_weight(self) -> float:
        return sum(vote.effective_weight for vote in self.votes.values())


class Slash(BaseModel):
    model_config = ConfigDict(frozen=True)

    challenge_id: str
    shard_id: int
    amount: float = Field(..., ge=0)


class PenaltyLedger(BaseModel):
    """
    Stake balances of penalized shards and every slash applied to them.

    `exposed` keeps the stake a shard held when it was first slashed, so the
    share of offending stake that was removed can be reported.
    """

    slash_fraction: float = Field(default=DEFAULT_SLASH_FRACTION, ge=0, le=1)
    stakes: Dict[int, float] = Field(default_factory=dict)
    exposed: Dict[int, float] = Field(default_factory=dict)
    history: List[Slash] = Field(default_factory=list)

    def slash(self, challenge_id: str, shard_id: int, stake: float) -> float:
        """Remove slash_fraction of `stake`; returns the remaining stake."""
        amount = stake * self.slash_fraction
        remaining = max(0.0, stake - amount)
        self.exposed.setdefault(shard_id, stake)
        self.stakes[shard_id] = remaining
        self.history.append(Slash(challenge_id=challenge_id, shard_id=shard_id, amount=amount))
        return remaining

    @property
    def total_slashed(self) -> float:
        return sum(entry.amount for entry in self.history)

    def effectiveness(self) -> float:
        """Share of the offending shards' stake removed by slashing, in [0, 1]."""
        exposed = sum(self.exposed.values())
        return 0.0 if exposed == 0 else min(1.0, self.total_slashed / exposed)


class RollbackReport(BaseModel):
    """What a rollback restored and what it could not."""
    model_config = ConfigDict(frozen=True)

    tx_id: Digest
    recovered: int = Field(..., ge=0)
    shortfall: int = Field(..., ge=0)
    shards: Tuple[int, ...] = ()


class Resolution(BaseModel):
    model_config = ConfigDict(frozen=True)

    challenge_id: str
    tx_id: Digest
    outcome: Outcome
    invalid_weight: float
    cast_weight: float
    slashed: Tuple[int, ...] = ()
    rollback: Optional[RollbackReport] = None

