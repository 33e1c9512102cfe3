"""
Stake-weighted dispute resolution.

A challenge opened over a committed transaction is broadcast to every
eligible shard. Each shard re-verifies independently (aggregate signature,
attached proofs, committed-nonce history) and casts a vote weighted by
stake times reputation. After the window a strict majority of cast weight
voting Invalid rolls the transaction back and slashes every shard that voted
Valid or signed it; a tie upholds.
"""

import logging
from typing import Dict, Iterable, Optional, Sequence

from src.features.crossshard.domain import CrossPhase
from src.features.crossshard.services import CrossShardLedger
from src.features.ledger.domain import Digest, DomainTag, enc_bytes, enc_u64, hash_digest
from src.features.merkle.services import verify
from src.features.statesync.domain import (
    BadProof,
    Challenge,
    ChallengeStatus,
    ConflictEvidence,
    EmptyEvidence,
    Evidence,
    NotEligible,
    Outcome,
    PenaltyLedger,
    ProofEvidence,
    Resolution,
    SyncConfig,
    SyncError,
    UnknownTx,
    Verdict,
    Vote,
    WindowClosed,
)
from src.features.statesync.services.audit import NonceIndex
from src.features.statesync.services.rollback import rollback

logger = logging.getLogger(__name__)


def ballot_digest(challenge_id: str, shard_id: int, verdict: Verdict) -> Digest:
    return hash_digest(
        DomainTag.MSG,
        enc_bytes(challenge_id.encode()) + enc_u64(shard_id) + enc_bytes(verdict.value.encode()),
    )


class DisputeManager:
    """Open challenges, votes and penalties over one ledger."""

    def __init__(
        self,
        ledger: CrossShardLedger,
        config: Optional[SyncConfig] = None,
        index: Optional[NonceIndex] = None,
        penalties: Optional[PenaltyLedger] = None,
    ):
        self.ledger = ledger
        self.config = config or SyncConfig()
        self.index = index if index is not None else NonceIndex()
        self.penalties = penalties or PenaltyLedger(slash_fraction=self.config.slash_fraction)
        self.challenges: Dict[str, Challenge] = {}
        self.resolutions: Dict[str, Resolution] = {}
        self._open_by_tx: Dict[Digest, str] = {}

    def involved_shards(self, tx_id: Digest) -> tuple:
        """Active shards that signed the transaction or now home one of its accounts."""
        record = self.ledger.records[tx_id]
        shards = set(record.sigma.signer_set) if record.sigma is not None else set()
        shards |= {self.ledger.homes[account] for account in record.tx.accounts()}
        return tuple(sorted(shard_id for shard_id in shards if self.ledger.shards[shard_id].active))

    def open_challenge(
        self,
        shard_id: int,
        tx_id: Digest,
        evidence: Sequence[Evidence],
        round_no: int = 0,
    ) -> Challenge:
        """Open (or return the already open) challenge over `tx_id`."""
        if not evidence:
            raise EmptyEvidence()
        existing = self._open_by_tx.get(tx_id)
        if existing is not None:
            return self.challenges[existing]
        if tx_id not in self.ledger.records:
            raise UnknownTx(tx_id)
        for item in evidence:
            self._check_evidence(tx_id, item)

        involved = self.involved_shards(tx_id)
        eligible = tuple(self.ledger.active_ids()) if self.config.observers_vote else involved
        challenge = Challenge(
            challenge_id=f"ch-{len(self.challenges):05d}-{tx_id.hex()[:8]}",
            disputed_tx=tx_id,
            challenger_shard=shard_id,
            evidence=tuple(evidence),
            opened_at=round_no,
            closes_at=round_no + self.config.dispute_window_rounds,
            eligible=eligible,
            involved=involved,
        )
        self.challenges[challenge.challenge_id] = challenge
        self._open_by_tx[tx_id] = challenge.challenge_id
        logger.info("shard %s challenged %s (%s)", shard_id, tx_id.hex()[:12], challenge.challenge_id)
        return challenge

    def _check_evidence(self, tx_id: Digest, item: Evidence) -> None:
        if isinstance(item, ProofEvidence):
            if not verify(item.root, item.proof):
                raise BadProof(item.shard_id, "evidence proof does not fold to its root")
        elif isinstance(item, ConflictEvidence):
            if tx_id not in (item.first.tx_id, item.second.tx_id):
                raise BadProof(item.second.account, "conflict does not name the disputed transaction")

    def honest_verdict(self, challenge: Challenge) -> Verdict:
        """Re-verify the disputed transaction from local knowledge only."""
        record = self.ledger.records.get(challenge.disputed_tx)
        if record is None or record.phase is not CrossPhase.COMMITTED:
            return Verdict.VALID
        if not self.ledger.verify_sigma(record):
            return Verdict.INVALID
        if self.index.is_replay(record.tx_id):
            return Verdict.INVALID
        return Verdict.VALID

    def cast_vote(
        self,
        shard_id: int,
        challenge: Challenge,
        round_no: int,
        verdict: Optional[Verdict] = None,
    ) -> Vote:
        """
        Record one shard's vote.

        `verdict` overrides the shard's own re-verification (a colluding shard
        votes what the adversary tells it). A second vote by the same shard
        returns the first.
        """
        if challenge.status is ChallengeStatus.RESOLVED or round_no >= challenge.closes_at:
            raise WindowClosed(challenge.challenge_id)
        if shard_id not in challenge.eligible:
            raise NotEligible(shard_id, challenge.challenge_id)
        if shard_id in challenge.votes:
            return challenge.votes[shard_id]

        shard = self.ledger.shards[shard_id]
        verdict = verdict or self.honest_verdict(challenge)
        registry = self.ledger.registry()
        signature = None
        if shard_id in registry:
            signature = registry.view_for(shard_id).sign(ballot_digest(challenge.challenge_id, shard_id, verdict))
        vote = Vote(
            shard_id=shard_id,
            verdict=verdict,
            stake=shard.stake,
            reputation=shard.reputation,
            evidence_attached=challenge.evidence if verdict is Verdict.INVALID else (),
            signature=signature,
        )
        challenge.votes[shard_id] = vote
        return vote

    def resolve(self, challenge: Challenge, round_no: int) -> Resolution:
        """Tally once the window has closed (or every eligible shard has voted)."""
        if challenge.status is ChallengeStatus.RESOLVED:
            return self.resolutions[challenge.challenge_id]
        missing = [shard_id for shard_id in challenge.eligible if shard_id not in challenge.votes]
        if round_no < challenge.closes_at and missing:
            raise SyncError(f"Voting on {challenge.challenge_id} is still open.", code="WINDOW_OPEN")

        invalid = challenge.weight_of(Verdict.INVALID)
        cast = challenge.cast_weight
        tx_id = challenge.disputed_tx
        report = None
        slashed: tuple = ()
        if invalid > cast / 2:
            outcome = Outcome.ROLLED_BACK
            try:
                report = rollback(self.ledger, tx_id)
            except UnknownTx:
                logger.info("%s was already reverted", tx_id.hex()[:12])
            self.index.forget(tx_id)
            slashed = self._penalize(challenge)
        else:
            outcome = Outcome.UPHELD

        challenge.status = ChallengeStatus.RESOLVED
        self._open_by_tx.pop(tx_id, None)
        resolution = Resolution(
            challenge_id=challenge.challenge_id,
            tx_id=tx_id,
            outcome=outcome,
            invalid_weight=invalid,
            cast_weight=cast,
            slashed=slashed,
            rollback=report,
        )
        self.resolutions[challenge.challenge_id] = resolution
        logger.info(
            "%s %s: invalid weight %.2f of %.2f", challenge.challenge_id, outcome.value, invalid, cast,
        )
        return resolution

    def _penalize(self, challenge: Challenge) -> tuple:
        offenders = {shard_id for shard_id, vote in challenge.votes.items() if vote.verdict is Verdict.VALID}
        record = self.ledger.records[challenge.disputed_tx]
        if record.sigma is not None:
            offenders |= set(record.sigma.signer_set)
        offenders = sorted(shard_id for shard_id in offenders if shard_id in self.ledger.shards)
        for shard_id in offenders:
            shard = self.ledger.shards[shard_id]
            shard.stake = self.penalties.slash(challenge.challenge_id, shard_id, shard.stake)
            shard.reputation = shard.reputation * self.config.reputation_decay
        return tuple(offenders)

    def open_challenges(self) -> Iterable[Challenge]:
        return [challenge for challenge in self.challenges.values() if challenge.status is ChallengeStatus.OPEN]

    def due(self, round_no: int) -> Iterable[Challenge]:
        return [challenge for challenge in self.open_challenges() if round_no >= challenge.closes_at]
