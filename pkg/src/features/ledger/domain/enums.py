"""
Enumerations for the ledger feature.
"""

from enum import Enum, IntEnum


class DomainTag(IntEnum):
    """One-byte prefixes that separate hash domains."""
    LEAF = 0
    NODE = 1
    TX = 2
    MSG = 3
    SHARE = 4
    ACCOUNT_KEY = 5
    ACCOUNT_RECORD = 6
    BATCH = 7
    GOSSIP = 8


class TxKind(str, Enum):
    """Routing class of a transaction under the current shard map."""
    INTRA = "intra"
    CROSS = "cross"
