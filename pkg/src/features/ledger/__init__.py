"""
Ledger feature module.

Ledger primitives shared by every other feature:
- Domain-separated digests over a canonical encoding
- Account-model transactions with value conservation
- Pure state application with nonce replay protection
- Intra/cross routing against the live shard map
"""

from src.features.ledger.domain import (
    Digest,
    DomainTag,
    ShardMap,
    ShardState,
    SignedLeg,
    Transaction,
)
from src.features.ledger.services import apply, classify, hash

__all__ = [
    "Digest",
    "DomainTag",
    "ShardMap",
    "ShardState",
    "SignedLeg",
    "Transaction",
    "apply",
    "classify",
    "hash",
]
