"""
In-memory driver that runs one consensus instance to completion.

Used where a caller needs a decision synchronously (the global committee
outside the event loop, tests). Delivery order is drawn from a seeded
generator; timers fire only when no message is in flight.
"""

import logging
from typing import Collection, Dict, List, Optional, Tuple

from src.features.consensus.domain import (
    ConsensusConfig,
    ConsensusError,
    ConsensusInstance,
    ConsensusMessage,
    Deliver,
    Propose,
    TimerFired,
)
from src.features.consensus.services.replica import check_agreement, new_instance, step
from src.features.ledger.domain import Digest
from src.shared.utils import make_rng

logger = logging.getLogger(__name__)

DEFAULT_MAX_STEPS = 50_000


class LocalGroup:
    """A replica group whose members all live in this process."""

    def __init__(
        self,
        config: ConsensusConfig,
        seed: int = 0,
        crashed: Collection[int] = (),
        max_steps: int = DEFAULT_MAX_STEPS,
    ):
        self.config = config
        self.members: Tuple[int, ...] = config.nodes
        self.crashed = set(crashed)
        self.max_steps = max_steps
        self._rng = make_rng(seed, "local-group", config.group_id)
        self.last_instances: Dict[int, ConsensusInstance] = {}

    @property
    def live(self) -> List[int]:
        return [node for node in self.members if node not in self.crashed]

    def agree(self, seq: int, value_digest: Digest) -> Optional[Digest]:
        """Decided value, or None when live replicas do not all decide within max_steps."""
        config = self.config
        keys = config.keys
        instances = {
            node: new_instance(config, node, seq, signer=keys.view_for(node) if keys is not None else None)
            for node in self.live
        }
        queue: List[Tuple[int, ConsensusMessage]] = []
        now = 0

        def feed(node: int, event) -> None:
            result = step(instances[node], event)
            instances[node] = result.instance
            for message in result.outbox:
                targets = [message.recipient] if message.recipient is not None else [
                    member for member in self.members if member != node
                ]
                queue.extend((target, message) for target in targets if target in instances)

        for node in self.live:
            feed(node, Propose(value_digest, now))
        for _ in range(self.max_steps):
            if all(instance.decided for instance in instances.values()):
                break
            if queue:
                target, message = queue.pop(int(self._rng.integers(len(queue))))
                now += 1
                feed(target, Deliver(message, now))
                continue
            deadlines = [
                instance.timer_deadline for instance in instances.values()
                if instance.timer_deadline is not None and not instance.decided
            ]
            if not deadlines:
                break
            now = max(now, min(deadlines))
            for node in list(instances):
                feed(node, TimerFired(now))

        self.last_instances = instances
        if not check_agreement(instances.values()):
            raise ConsensusError(f"Replicas of {config.group_id} decided different values for seq {seq}.")
        decided = [instance.decided_value for instance in instances.values()]
        if not decided or any(value is None for value in decided):
            logger.info("group %s reached no decision for seq %s", config.group_id, seq)
            return None
        return decided[0]
