"""
Deterministic state application and transaction routing.
"""

from typing import Iterable, Mapping

from src.features.ledger.domain.encoding import Digest, hash_digest
from src.features.ledger.domain.enums import DomainTag
from src.features.ledger.domain.exceptions import (
    InsufficientBalance,
    NonceGap,
    NonceReplay,
    UnknownAccount,
)
from src.features.ledger.domain.models import (
    Classification,
    CrossShard,
    IntraShard,
    ShardState,
    SignedLeg,
    Transaction,
)


def hash(domain_tag: DomainTag, payload: bytes) -> Digest:  # noqa: A001
    """Digest of a canonical payload under a domain tag."""
    return hash_digest(domain_tag, payload)


def classify(tx: Transaction, shard_map: Mapping[int, int]) -> Classification:
    """Route a transaction by the current home of every account it touches."""
    def home(account: int) -> int:
        try:
            return shard_map[account]
        except KeyError:
            raise UnknownAccount(account) from None

    inputs = frozenset(home(leg.account) for leg in tx.inputs)
    outputs = frozenset(home(leg.account) for leg in tx.outputs)
    shards = inputs | outputs
    if len(shards) == 1:
        return IntraShard(next(iter(shards)))
    return CrossShard(inputs=inputs, outputs=outputs)


def apply(state: ShardState, tx_leg: SignedLeg, nonce_check: bool = True) -> ShardState:
    """
    Apply one balance delta and return the successor state.

    Debits require enough balance and, when nonce_check is set, the next nonce
    in sequence; the nonce counter advances only on checked debits.
    The input state is never modified.
    """
    account, amount, nonce = tx_leg
    if account not in state.balances:
        raise UnknownAccount(account)

    balance = state.balances[account]
    nonces = state.applied_nonces
    if amount < 0:
        if balance < -amount:
            raise InsufficientBalance(account, balance, -amount)
        if nonce_check:
            applied = nonces.get(account, 0)
            if nonce is None or nonce <= applied:
                raise NonceReplay(account, -1 if nonce is None else nonce, applied)
            if nonce > applied + 1:
                raise NonceGap(account, nonce, applied)
            nonces = {**nonces, account: nonce}

    return state.model_copy(update={
        "balances": {**state.balances, account: balance + amount},
        "applied_nonces": nonces,
        "version": state.version + 1,
    })


def apply_all(state: ShardState, legs: Iterable[SignedLeg], nonce_check: bool = True) -> ShardState:
    """Apply legs in order; any failure leaves the caller's state untouched."""
    for leg in legs:
        state = apply(state, leg, nonce_check=nonce_check)
    return state


def total_supply(states: Iterable[ShardState]) -> int:
    return sum(state.total() for state in states)


def consume_nonce(state: ShardState, account: int, nonce: int) -> ShardState:
    """
    Mark a nonce used without moving funds.

    Applied when a transaction is refused or aborted after its sender was
    checked, so the sender's later nonces stay contiguous.
    """
    if account not in state.balances:
        raise UnknownAccount(account)
    applied = state.applied_nonces.get(account, 0)
    if nonce <= applied:
        raise NonceReplay(account, nonce, applied)
    if nonce > applied + 1:
        raise NonceGap(account, nonce, applied)
    return state.model_copy(update={
        "applied_nonces": {**state.applied_nonces, account: nonce},
        "version": state.version + 1,
    })
