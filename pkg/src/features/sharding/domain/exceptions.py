"""
Exceptions specific to the sharding feature.
"""

from typing import Iterable

from src.shared.exceptions import AppError


class ShardingError(AppError):
    """Base exception for shard management errors."""

    def __init__(self, message: str, code: str = "SHARDING_ERROR"):
        super().__init__(message, code=code)


class TooFewValidators(ShardingError):
    """Raised when a split would leave a child below the minimum replica group."""

    def __init__(self, shard_id: int, validators: int, k: int):
        self.shard_id = shard_id
        self.validators = validators
        self.k = k
        super().__init__(
            f"Shard {shard_id} has {validators} validators, cannot split into {k}.",
            code="TOO_FEW_VALIDATORS",
        )


class OverlappingAccounts(ShardingError):
    """Raised when shards to be merged claim the same account."""

    def __init__(self, accounts: Iterable[int]):
        self.accounts = sorted(accounts)
        super().__init__(
            f"Accounts {self.accounts[:5]} are homed in more than one shard.",
            code="OVERLAPPING_ACCOUNTS",
        )
