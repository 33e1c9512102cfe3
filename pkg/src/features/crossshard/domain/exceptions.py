"""
Exceptions specific to the cross-shard feature.
"""

from src.shared.exceptions import AppError


class CrossShardError(AppError):
    """Base exception for cross-shard coordination errors."""

    def __init__(self, message: str, code: str = "CROSS_SHARD_ERROR"):
        super().__init__(message, code=code)


class ShardBusy(CrossShardError):
    """Raised when a shard is reconfiguring and refuses new work."""

    def __init__(self, shard_id: int):
        self.shard_id = shard_id
        super().__init__(f"Shard {shard_id} is reconfiguring, retry next epoch.", code="SHARD_BUSY")


class AccountLocked(CrossShardError):
    """Raised when a two-phase lock on an account is held by another transaction."""

    def __init__(self, account: int):
        self.account = account
        super().__init__(f"Account {account} is locked by a pending transaction.", code="ACCOUNT_LOCKED")


class NotDecided(CrossShardError):
    """Raised when outputs are committed for a transaction missing from the decision."""

    def __init__(self):
        super().__init__("Transaction is not part of the decided batch.", code="NOT_DECIDED")


class CommitCrash(CrossShardError):
    """Injected crash between output legs; recovery replays from the decision."""

    def __init__(self, applied: int):
        self.applied = applied
        super().__init__(f"Commit interrupted after {applied} output legs.", code="COMMIT_CRASH")
