"""
Exceptions specific to the state-sync feature.
"""

from src.features.ledger.domain import Digest
from src.shared.exceptions import AppError


class SyncError(AppError):
    """Base exception for gossip and dispute errors."""

    def __init__(self, message: str, code: str = "SYNC_ERROR"):
        super().__init__(message, code=code)


class StaleVersion(SyncError):
    """Raised when gossip carries a version no newer than the one held."""

    def __init__(self, origin: int, version: int, held: int):
        self.origin = origin
        self.version = version
        self.held = held
        super().__init__(
            f"Shard {origin} version {version} is not newer than {held}.",
            code="STALE_VERSION",
        )


class BadProof(SyncError):
    """Raised when a proof or signature does not verify against its claimed root."""

    def __init__(self, origin: int, reason: str):
        self.origin = origin
        self.reason = reason
        super().__init__(f"Rejected update from shard {origin}: {reason}.", code="BAD_PROOF")


class EmptyEvidence(SyncError):
    """Raised when a challenge is opened without evidence."""

    def __init__(self):
        super().__init__("A challenge needs at least one piece of evidence.", code="EMPTY_EVIDENCE")


class WindowClosed(SyncError):
    """Raised when a vote arrives after the dispute window."""

    def __init__(self, challenge_id: str):
        self.challenge_id = challenge_id
        super().__init__(f"Voting on {challenge_id} has closed.", code="WINDOW_CLOSED")


class NotEligible(SyncError):
    """Raised when a shard that may not vote on a challenge tries to."""

    def __init__(self, shard_id: int, challenge_id: str):
        self.shard_id = shard_id
        super().__init__(f"Shard {shard_id} may not vote on {challenge_id}.", code="NOT_ELIGIBLE")


class UnknownTx(SyncError):
    """Raised when rolling back a transaction that is not committed (or already rolled back)."""

    def __init__(self, tx_id: Digest):
        self.tx_id = tx_id
        super().__init__(f"Transaction {tx_id.hex()[:16]} is not committed.", code="UNKNOWN_TX")
