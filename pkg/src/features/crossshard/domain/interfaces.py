"""
Interfaces (protocols) for the cross-shard feature.
"""

from typing import Optional, Protocol, Tuple, runtime_checkable

from src.features.ledger.domain import Digest


@runtime_checkable
class OrderingCommittee(Protocol):
    """Group that agrees on one value per batch."""

    members: Tuple[int, ...]

    def agree(self, seq: int, value_digest: Digest) -> Optional[Digest]:
        """Run one instance; None when no decision is reached within the view budget."""
        ...
