"""
Ledger feature domain layer.

Accounts, transactions, shard state and the canonical byte encoding
every other feature hashes over.
"""

from src.features.ledger.domain.encoding import (
    DIGEST_SIZE,
    Digest,
    account_key,
    account_value,
    enc_bytes,
    enc_concat,
    enc_list,
    enc_u64,
    hash_digest,
)
from src.features.ledger.domain.enums import DomainTag, TxKind
from src.features.ledger.domain.exceptions import (
    InsufficientBalance,
    LedgerError,
    NonceGap,
    NonceReplay,
    UnknownAccount,
)
from src.features.ledger.domain.models import (
    Classification,
    CrossShard,
    IntraShard,
    Leg,
    ShardMap,
    ShardState,
    SignedLeg,
    Transaction,
)

__all__ = [
    # Encoding
    "DIGEST_SIZE",
    "Digest",
    "account_key",
    "account_value",
    "enc_bytes",
    "enc_concat",
    "enc_list",
    "enc_u64",
    "hash_digest",
    # Enums
    "DomainTag",
    "TxKind",
    # Exceptions
    "LedgerError",
    "UnknownAccount",
    "InsufficientBalance",
    "NonceReplay",
    "NonceGap",
    # Models
    "Leg",
    "Transaction",
    "SignedLeg",
    "IntraShard",
    "CrossShard",
    "Classification",
    "ShardState",
    "ShardMap",
]
