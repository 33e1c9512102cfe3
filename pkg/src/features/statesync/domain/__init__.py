"""
State-sync feature domain layer.
"""

from src.features.statesync.domain.enums import ChallengeStatus, Outcome, Verdict
from src.features.statesync.domain.exceptions import (
    BadProof,
    EmptyEvidence,
    NotEligible,
    StaleVersion,
    SyncError,
    UnknownTx,
    WindowClosed,
)
from src.features.statesync.domain.models import (
    Challenge,
    ConflictEvidence,
    DecisionRecord,
    Evidence,
    GossipMsg,
    GossipNode,
    GossipReport,
    PenaltyLedger,
    ProofEvidence,
    Resolution,
    RollbackReport,
    Slash,
    SyncConfig,
    Vote,
)

__all__ = [
    # Enums
    "ChallengeStatus",
    "Outcome",
    "Verdict",
    # Exceptions
    "SyncError",
    "StaleVersion",
    "BadProof",
    "EmptyEvidence",
    "WindowClosed",
    "NotEligible",
    "UnknownTx",
    # Models
    "SyncConfig",
    "GossipMsg",
    "GossipNode",
    "GossipReport",
    "DecisionRecord",
    "ProofEvidence",
    "ConflictEvidence",
    "Evidence",
    "Vote",
    "Challenge",
    "Slash",
    "PenaltyLedger",
    "RollbackReport",
    "Resolution",
]
