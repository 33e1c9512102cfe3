"""
Canonical binary encoding and domain-separated hashing.

Layout (all integers big-endian):
    u64       8 bytes, unsigned
    bytes     u32 length prefix, then the raw bytes
    list      u32 item count, then each item's encoding in order
    Leg       u64 shard_id | u64 account | u64 amount
    Tx body   list[Leg] inputs | list[Leg] outputs | u64 nonce | u64 created_at
    Record    u64 account | u64 balance | u64 nonce

A digest is SHA-256 over one tag byte followed by the payload.
"""

import hashlib
import struct
from typing import Callable, Iterable, Sequence, TypeVar

from src.features.ledger.domain.enums import DomainTag

Digest = bytes
DIGEST_SIZE = 32

T = TypeVar("T")

_U64 = struct.Struct(">Q")
_U32 = struct.Struct(">I")


def hash_digest(tag: DomainTag, payload: bytes) -> Digest:
    """Hash a canonical payload under a domain tag."""
    return hashlib.sha256(bytes((int(tag),)) + payload).digest()


def enc_u64(value: int) -> bytes:
    return _U64.pack(value)


def enc_bytes(value: bytes) -> bytes:
    return _U32.pack(len(value)) + value


def enc_list(items: Sequence[T], encode_item: Callable[[T], bytes]) -> bytes:
    return _U32.pack(len(items)) + b"".join(encode_item(item) for item in items)


def enc_concat(parts: Iterable[bytes]) -> bytes:
    return b"".join(parts)


def encode_leg(shard_id: int, account: int, amount: int) -> bytes:
    return _U64.pack(shard_id) + _U64.pack(account) + _U64.pack(amount)


def encode_account_record(account: int, balance: int, nonce: int) -> bytes:
    return _U64.pack(account) + _U64.pack(balance) + _U64.pack(nonce)


def account_key(account: int) -> Digest:
    """State-tree key for an account id."""
    return hash_digest(DomainTag.ACCOUNT_KEY, enc_u64(account))


def account_value(account: int, balance: int, nonce: int) -> Digest:
    """State-tree value committing to an account record."""
    return hash_digest(DomainTag.ACCOUNT_RECORD, encode_account_record(account, balance, nonce))
