"""
Synthetic transaction stream.

Senders follow a Zipf law over account ranks (account id = rank), arrivals
are Poisson or a single burst at t=0, and each transaction is built cross or
intra against the homes current at its arrival, so the realised cross-shard
share matches `cross_ratio` whenever more than one shard exists.
"""

import logging
from typing import Dict, Iterator, List, Mapping, Optional

import numpy as np

from src.features.ledger.domain import Leg, Transaction
from src.features.simulation.domain import ArrivalPattern, WorkloadSpec
from src.shared.utils import make_rng

logger = logging.getLogger(__name__)


def zipf_cdf(account_count: int, exponent: float) -> np.ndarray:
    """Cumulative Zipf weights over ranks 1..account_count; exponent 0 is uniform."""
    ranks = np.arange(1, account_count + 1, dtype=float)
    weights = ranks ** -exponent
    cdf = np.cumsum(weights)
    return cdf / cdf[-1]


class WorkloadGenerator:
    """Draws arrival times, accounts, amounts and nonces from one seeded stream."""

    def __init__(self, spec: WorkloadSpec, homes: Mapping[int, int], seed: int):
        self.spec = spec
        self._rng = make_rng(spec.seed if spec.seed is not None else seed, "workload")
        self._cdf = zipf_cdf(spec.account_count, spec.zipf_exponent)
        self._nonces: Dict[int, int] = {}
        self.generated = 0
        self.rehome(homes)

    def rehome(self, homes: Mapping[int, int]) -> None:
        """Refresh the account-by-shard index after homes change."""
        members: Dict[int, List[int]] = {}
        for account in range(self.spec.account_count):
            members.setdefault(homes[account], []).append(account)
        self._homes = {account: homes[account] for account in range(self.spec.account_count)}
        self._members = members
        self._shards = sorted(members)

    # Arrivals

    def first_arrival(self) -> Optional[int]:
        if self.spec.arrival is ArrivalPattern.BURST:
            return 0
        return self.next_arrival(0)

    def next_arrival(self, now: int) -> Optional[int]:
        """Time of the arrival after `now`, or None when the stream is exhausted."""
        spec = self.spec
        if spec.max_txs is not None and self.generated >= spec.max_txs:
            return None
        if spec.arrival is ArrivalPattern.BURST:
            return 0
        gap = self._rng.exponential(1e6 / spec.rate)
        at = now + max(1, int(round(gap)))
        return at if at < spec.duration_us else None

    # Accounts

    def _sender(self) -> int:
        return int(np.searchsorted(self._cdf, self._rng.random(), side="right"))

    def _amount(self) -> int:
        return int(self._rng.integers(self.spec.amount_min, self.spec.amount_max + 1))

    def _pick_in(self, shard_id: int, exclude: int = -1) -> Optional[int]:
        candidates = self._members.get(shard_id, [])
        if len(candidates) <= (1 if exclude in candidates else 0):
            return None
        while True:
            account = candidates[int(self._rng.integers(len(candidates)))]
            if account != exclude:
                return account

    def _pick_outside(self, shard_id: int) -> Optional[int]:
        """Uniform account homed anywhere but `shard_id`."""
        others = [other for other in self._shards if other != shard_id]
        total = sum(len(self._members[other]) for other in others)
        if total == 0:
            return None
        index = int(self._rng.integers(total))
        for other in others:
            size = len(self._members[other])
            if index < size:
                return self._members[other][index]
            index -= size
        return None

    def _next_nonce(self, account: int) -> int:
        nonce = self._nonces.get(account, 0) + 1
        self._nonces[account] = nonce
        return nonce

    def generate_tx(self, now: int) -> Transaction:
        """One transaction submitted at `now`."""
        spec = self.spec
        sender = min(self._sender(), spec.account_count - 1)
        home = self._homes[sender]
        amount = self._amount()
        cross = self._rng.random() < spec.cross_ratio

        receiver = self._pick_outside(home) if cross else self._pick_in(home, exclude=sender)
        if receiver is None:
            receiver = self._pick_in(home, exclude=sender) if cross else self._pick_outside(home)
            cross = not cross
        if receiver is None:
            receiver = (sender + 1) % spec.account_count

        inputs = [Leg(shard_id=home, account=sender, amount=amount)]
        outputs = [Leg(shard_id=self._homes[receiver], account=receiver, amount=amount)]
        if cross and self._rng.random() < spec.multi_input_ratio:
            cosigner = self._pick_outside(home)
            payee = self._pick_outside(home)
            if cosigner is not None and payee is not None and len({sender, receiver, cosigner, payee}) == 4:
                inputs.append(Leg(shard_id=self._homes[cosigner], account=cosigner, amount=amount))
                outputs.append(Leg(shard_id=self._homes[payee], account=payee, amount=amount))

        self.generated += 1
        return Transaction(
            inputs=tuple(inputs),
            outputs=tuple(outputs),
            nonce=self._next_nonce(sender),
            created_at=now,
        )


def generate(spec: WorkloadSpec, homes: Mapping[int, int], seed: int = 0) -> Iterator[Transaction]:
    """Whole stream against fixed homes, in arrival order."""
    generator = WorkloadGenerator(spec, homes, seed)
    at = generator.first_arrival()
    while at is not None:
        yield generator.generate_tx(at)
        at = generator.next_arrival(at)
