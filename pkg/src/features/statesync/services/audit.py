"""
Committed-nonce index.

Every committed spend is recorded under its (account, nonce). The first spend
owns the slot; any later spend of the same slot is a replay, and the pair of
decision records is the evidence a challenge carries.
"""

from typing import Dict, List, Optional, Tuple

from src.features.crossshard.domain import CrossTxRecord
from src.features.crossshard.services import CrossShardLedger
from src.features.ledger.domain import Digest, Transaction
from src.features.merkle.services import prove_account
from src.features.statesync.domain import ConflictEvidence, DecisionRecord, Evidence, ProofEvidence


def decision_of(tx: Transaction, position: int, signer_set: Tuple[int, ...] = ()) -> DecisionRecord:
    return DecisionRecord(
        tx_id=tx.tx_id,
        account=tx.sender,
        nonce=tx.nonce,
        position=position,
        signer_set=tuple(signer_set),
    )


class NonceIndex:
    """First committed spend per (account, nonce) and every replay seen since."""

    def __init__(self):
        self._first: Dict[Tuple[int, int], DecisionRecord] = {}
        self.conflicts: Dict[Digest, ConflictEvidence] = {}

    def __len__(self) -> int:
        return len(self._first)

    def record(self, decision: DecisionRecord) -> Optional[ConflictEvidence]:
        """Index a committed spend; returns conflict evidence if the slot was taken."""
        slot = (decision.account, decision.nonce)
        first = self._first.get(slot)
        if first is None:
            self._first[slot] = decision
            return None
        if first.tx_id == decision.tx_id:
            return None
        evidence = ConflictEvidence(first=first, second=decision)
        self.conflicts[decision.tx_id] = evidence
        return evidence

    def first_spend(self, account: int, nonce: int) -> Optional[DecisionRecord]:
        return self._first.get((account, nonce))

    def is_replay(self, tx_id: Digest) -> bool:
        return tx_id in self.conflicts

    def forget(self, tx_id: Digest) -> None:
        """Drop a rolled-back spend; a replay of it becomes the slot's owner."""
        self.conflicts.pop(tx_id, None)
        for slot, decision in list(self._first.items()):
            if decision.tx_id != tx_id:
                continue
            del self._first[slot]
            heirs = sorted(
                (evidence.second for evidence in self.conflicts.values()
                 if (evidence.second.account, evidence.second.nonce) == slot),
                key=lambda replay: replay.position,
            )
            if heirs:
                self._first[slot] = heirs[0]
                self.conflicts.pop(heirs[0].tx_id, None)


def audit_commit(
    index: NonceIndex,
    ledger: CrossShardLedger,
    record: CrossTxRecord,
    position: int,
) -> List[Evidence]:
    """
    Index a committed cross-shard record.

    Returns an empty list for a first spend, otherwise the conflicting
    decision records plus the sender's current account proof.
    """
    signers = record.sigma.signer_set if record.sigma is not None else ()
    conflict = index.record(decision_of(record.tx, position, signers))
    if conflict is None:
        return []
    sender = record.tx.sender
    home = ledger.home_shard(sender)
    proof = ProofEvidence(
        shard_id=home.shard_id,
        root=home.root,
        proof=prove_account(home.tree, sender),
        version=home.state.version,
    )
    return [conflict, proof]
