"""
Consensus groups driven by the event loop.

A shard's validators and the global committee each run one group. Two
fidelities share one interface: `start` a sequence number with a value and
the group calls `on_decide(key, seq, value, now)` once the first honest
replica decides.
"""

import logging
from typing import Callable, Collection, Dict, NamedTuple, Optional, Sequence, Set

from src.features.consensus.domain import (
    ConsensusConfig,
    ConsensusInstance,
    ConsensusMessage,
    Deliver,
    MessageKind,
    Propose,
    TimerFired,
)
from src.features.consensus.services import check_agreement, new_instance, step
from src.features.ledger.domain import Digest
from src.features.simulation.domain import Behavior, Hookpoint, SimulationError
from src.features.simulation.services.adversary import Adversary
from src.features.simulation.services.network import Network
from src.features.simulation.services.scheduler import Scheduler
from src.features.threshold.services import keygen
from src.shared.utils import derive_seed

logger = logging.getLogger(__name__)

DecisionCallback = Callable[[str, int, Digest, int], None]


class GroupDeliver(NamedTuple):
    key: str
    seq: int
    node: int
    message: ConsensusMessage


class GroupTimer(NamedTuple):
    key: str
    seq: int
    node: int
    at: int


class GroupDecided(NamedTuple):
    key: str
    seq: int
    value: Digest


class ReplicaGroup:
    """Every replica message is a network event; timers are scheduler events."""

    def __init__(
        self,
        key: str,
        members: Sequence[int],
        scheduler: Scheduler,
        network: Network,
        adversary: Adversary,
        on_decide: DecisionCallback,
        seed: int,
        view_timeout_us: int,
        crashed: Collection[int] = (),
    ):
        self.key = key
        self.members = tuple(sorted(members))
        self.scheduler = scheduler
        self.network = network
        self.adversary = adversary
        self.on_decide = on_decide
        self.crashed: Set[int] = set(crashed)
        keys = keygen(key, len(self.members), 1, derive_seed(seed, "group-keys", key), signer_ids=self.members)
        self.config = ConsensusConfig(
            group_id=key, nodes=self.members, view_timeout_us=view_timeout_us, keys=keys,
        )
        for node in self.members:
            if adversary.is_corrupt(node):
                adversary.context.grant(key, keys.view_for(node))
        self._instances: Dict[int, Dict[int, ConsensusInstance]] = {}
        self._decided: Dict[int, Digest] = {}
        self.view_changes = 0

    def honest(self, node: int) -> bool:
        return node not in self.crashed and not self.adversary.is_corrupt(node)

    def start(self, seq: int, value: Digest, now: int) -> None:
        keys = self.config.keys
        instances = {
            node: new_instance(self.config, node, seq, signer=keys.view_for(node))
            for node in self.members if node not in self.crashed
        }
        self._instances[seq] = instances
        for node in sorted(instances):
            self._feed(seq, node, Propose(value, now), now)

    def deliver(self, event: GroupDeliver, now: int) -> None:
        self._feed(event.seq, event.node, Deliver(event.message, now), now)

    def fire_timer(self, event: GroupTimer, now: int) -> None:
        instances = self._instances.get(event.seq)
        if instances is None or event.node not in instances:
            return
        if instances[event.node].timer_deadline != event.at:
            return
        self._feed(event.seq, event.node, TimerFired(now), now)

    def _feed(self, seq: int, node: int, event, now: int) -> None:
        instances = self._instances.get(seq)
        if instances is None or node not in instances:
            return
        before = instances[node]
        result = step(before, event)
        instances[node] = result.instance
        self._send(seq, node, result.outbox, now)

        deadline = result.instance.timer_deadline
        if deadline is not None and deadline != before.timer_deadline and not result.instance.decided:
            self.scheduler.schedule(max(deadline, now), self.key, GroupTimer(self.key, seq, node, deadline))
        if result.decision is not None and self.honest(node):
            self._on_honest_decision(seq, result.decision, now)

    def _send(self, seq: int, node: int, outbox, now: int) -> None:
        for message in outbox:
            if self.adversary.is_corrupt(node):
                hook = Hookpoint.ON_LEADER_TURN if message.kind is MessageKind.PRE_PREPARE else Hookpoint.ON_VOTE
                routed = self.adversary.inject(
                    hook, group_id=self.key, node_id=node, message=message, members=self.members,
                )
            else:
                targets = [message.recipient] if message.recipient is not None else [
                    member for member in self.members if member != node
                ]
                routed = [(target, message) for target in targets]
            for target, outgoing in routed:
                if target in self.crashed:
                    continue
                at = self.network.deliver_at(node, target, now)
                if at is not None:
                    self.scheduler.schedule(at, self.key, GroupDeliver(self.key, seq, target, outgoing))

    def _on_honest_decision(self, seq: int, value: Digest, now: int) -> None:
        if seq not in self._decided:
            self._decided[seq] = value
            self.on_decide(self.key, seq, value, now)
        instances = self._instances[seq]
        honest = [instance for node, instance in instances.items() if self.honest(node)]
        if all(instance.decided for instance in honest):
            if not check_agreement(honest):
                raise SimulationError(f"Group {self.key} disagreed on seq {seq}.", code="SAFETY_VIOLATION")
            if max(instance.decided_view or 0 for instance in honest) > 0:
                self.view_changes += 1
            del self._instances[seq]

    def abandon(self) -> None:
        """Drop every running instance (the group was retired)."""
        self._instances.clear()

    def decided_value(self, seq: int) -> Optional[Digest]:
        return self._decided.get(seq)


class ModeledGroup:
    """
    One decision event per instance.

    Latency is three message hops plus a view timeout for every faulty leader
    met before an honest one; with more than f silent members nothing is
    decided.
    """

    def __init__(
        self,
        key: str,
        members: Sequence[int],
        scheduler: Scheduler,
        network: Network,
        adversary: Adversary,
        on_decide: DecisionCallback,
        view_timeout_us: int,
        crashed: Collection[int] = (),
    ):
        self.key = key
        self.members = tuple(sorted(members))
        self.scheduler = scheduler
        self.network = network
        self.adversary = adversary
        self.on_decide = on_decide
        self.view_timeout_us = view_timeout_us
        self.crashed: Set[int] = set(crashed)
        self._pending: Set[int] = set()
        self._decided: Dict[int, Digest] = {}
        self.view_changes = 0

    def _faulty(self) -> Set[int]:
        silent = set(self.crashed)
        spec = self.adversary.spec
        if spec.has(Behavior.WITHHOLD) or spec.has(Behavior.EQUIVOCATE):
            silent |= {node for node in self.members if self.adversary.is_corrupt(node)}
        return silent

    def _hop(self, now: int) -> int:
        model = self.network.model
        latency = self.network.latency()
        return min(latency, model.delta_us) if now >= model.gst_us else latency

    def start(self, seq: int, value: Digest, now: int) -> None:
        faulty = self._faulty()
        n = len(self.members)
        if len(faulty) > (n - 1) // 3:
            logger.info("group %s has %s silent members, seq %s stalls", self.key, len(faulty), seq)
            return
        views = 0
        while views < n and self.members[views % n] in faulty:
            views += 1
        if views:
            self.view_changes += 1
        delay = sum(self._hop(now) for _ in range(3)) + views * self.view_timeout_us
        self._pending.add(seq)
        self.scheduler.schedule(now + delay, self.key, GroupDecided(self.key, seq, value))

    def decide(self, event: GroupDecided, now: int) -> None:
        if event.seq not in self._pending:
            return
        self._pending.discard(event.seq)
        self._decided[event.seq] = event.value
        self.on_decide(self.key, event.seq, event.value, now)

    def abandon(self) -> None:
        self._pending.clear()

    def decided_value(self, seq: int) -> Optional[Digest]:
        return self._decided.get(seq)
