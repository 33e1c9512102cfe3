"""
Domain models for the ledger feature.
"""

from collections.abc import Mapping
from functools import cached_property
from typing import Dict, Iterator, List, NamedTuple, Optional, Set, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

from src.features.ledger.domain.encoding import (
    Digest,
    enc_list,
    enc_u64,
    encode_leg,
    hash_digest,
)
from src.features.ledger.domain.enums import DomainTag, TxKind


class Leg(BaseModel):
    """One input or output of a transfer."""
    model_config = ConfigDict(frozen=True)

    shard_id: int = Field(..., ge=0, description="Home shard when the leg was created")
    account: int = Field(..., ge=0)
    amount: int = Field(..., ge=0)

    def encode(self) -> bytes:
        return encode_leg(self.shard_id, self.account, self.amount)


class Transaction(BaseModel):
    """Value transfer between accounts; the unit of cross-shard coordination."""
    model_config = ConfigDict(frozen=True)

    inputs: Tuple[Leg, ...] = Field(..., min_length=1)
    outputs: Tuple[Leg, ...] = Field(..., min_length=1)
    nonce: int = Field(..., ge=0, description="Sequence number of the first input account")
    created_at: int = Field(default=0, ge=0, description="Submission sim-time in microseconds")

    @model_validator(mode="after")
    def validate_conservation(self) -> "Transaction":
        spent = sum(leg.amount for leg in self.inputs)
        received = sum(leg.amount for leg in self.outputs)
        if spent != received:
            raise ValueError(f"Inputs ({spent}) and outputs ({received}) must balance")
        return self

    def encode(self) -> bytes:
        """Canonical encoding of every field except tx_id."""
        return (
            enc_list(self.inputs, Leg.encode)
            + enc_list(self.outputs, Leg.encode)
            + enc_u64(self.nonce)
            + enc_u64(self.created_at)
        )

    @computed_field
    @cached_property
    def tx_id(self) -> Digest:
        return hash_digest(DomainTag.TX, self.encode())

    @property
    def sender(self) -> int:
        return self.inputs[0].account

    @property
    def value(self) -> int:
        return sum(leg.amount for leg in self.inputs)

    def accounts(self) -> Set[int]:
        return {leg.account for leg in self.inputs} | {leg.account for leg in self.outputs}


class SignedLeg(NamedTuple):
    """A balance delta for one account; negative amounts are debits."""
    account: int
    amount: int
    nonce: Optional[int] = None


class IntraShard(NamedTuple):
    """Every leg lives in one shard."""
    shard_id: int

    @property
    def kind(self) -> TxKind:
        return TxKind.INTRA


class CrossShard(NamedTuple):
    """Legs span shards; inputs and outputs are the distinct shard sets."""
    inputs: frozenset
    outputs: frozenset

    @property
    def kind(self) -> TxKind:
        return TxKind.CROSS

    @property
    def shards(self) -> frozenset:
        return self.inputs | self.outputs


Classification = Union[IntraShard, CrossShard]


class ShardState(BaseModel):
    """Account balances and replay counters held by one shard."""
    model_config = ConfigDict(frozen=True)

    balances: Dict[int, int] = Field(default_factory=dict)
    applied_nonces: Dict[int, int] = Field(default_factory=dict)
    version: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def validate_non_negative(self) -> "ShardState":
        if any(balance < 0 for balance in self.balances.values()):
            raise ValueError("Balances must be non-negative")
        return self

    @classmethod
    def funded(cls, accounts: List[int], balance: int) -> "ShardState":
        return cls(
            balances={account: balance for account in accounts},
            applied_nonces={account: 0 for account in accounts},
        )

    def balance_of(self, account: int) -> int:
        return self.balances.get(account, 0)

    def nonce_of(self, account: int) -> int:
        return self.applied_nonces.get(account, 0)

    def total(self) -> int:
        return sum(self.balances.values())


class ShardMap(Mapping):
    """Mutable account → home shard index with a reverse lookup."""

    def __init__(self, homes: Optional[Dict[int, int]] = None):
        self._homes: Dict[int, int] = {}
        self._members: Dict[int, Set[int]] = {}
        for account, shard_id in (homes or {}).items():
            self.assign(account, shard_id)

    def __getitem__(self, account: int) -> int:
        return self._homes[account]

    def __iter__(self) -> Iterator[int]:
        return iter(self._homes)

    def __len__(self) -> int:
        return len(self._homes)

    def assign(self, account: int, shard_id: int) -> None:
        previous = self._homes.get(account)
        if previous is not None:
            self._members[previous].discard(account)
            if not self._members[previous]:
                del self._members[previous]
        self._homes[account] = shard_id
        self._members.setdefault(shard_id, set()).add(account)

    def accounts_of(self, shard_id: int) -> List[int]:
        return sorted(self._members.get(shard_id, ()))

    def shards(self) -> List[int]:
        return sorted(self._members)

    def snapshot(self) -> Dict[int, int]:
        return dict(self._homes)
