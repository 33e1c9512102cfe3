"""
Enumerations for the cross-shard feature.
"""

from enum import Enum


class CrossPhase(str, Enum):
    """Lifecycle of one cross-shard record."""
    VALIDATING = "validating"
    COLLECTED = "collected"
    GLOBALLY_ORDERED = "globally_ordered"
    COMMITTED = "committed"
    ABORTED = "aborted"


class AbortReason(str, Enum):
    """Why a record ended without committing."""
    DEADLINE = "deadline"
    REFUSED = "refused"
    VOTED_NO = "voted_no"


class CommitProtocol(str, Enum):
    """How cross-shard outputs are made atomic."""
    THRESHOLD = "threshold"
    TWO_PHASE = "two_phase"
