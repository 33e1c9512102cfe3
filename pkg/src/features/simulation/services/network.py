"""
Partial-synchrony message delivery.
"""

import logging
from typing import Callable, List, NamedTuple, Optional

from src.features.simulation.constants import DELAY_MAX_FACTOR
from src.features.simulation.domain import NetModel
from src.shared.utils import make_rng

logger = logging.getLogger(__name__)


class Delivery(NamedTuple):
    src: int
    dst: int
    sent_at: int
    deliver_at: int


class Network:
    """
    Samples a delivery time per message.

    Before GST a message may be dropped with `drop_rate`, held until a
    partition separating its endpoints heals, or stretched for nodes the
    adversary slows down. From GST on latency never exceeds delta.
    """

    def __init__(self, model: NetModel, seed: int, slowed: Optional[Callable[[int], bool]] = None):
        self.model = model
        self._rng = make_rng(seed, "network")
        self._slowed = slowed or (lambda node: False)
        self.log: List[Delivery] = []
        self.dropped = 0

    def latency(self) -> int:
        model = self.model
        if model.jitter_us == 0:
            return model.base_latency_us
        return model.base_latency_us + int(self._rng.integers(-model.jitter_us, model.jitter_us + 1))

    def deliver_at(self, src: int, dst: int, now: int) -> Optional[int]:
        """Delivery time of a message sent now, or None if it is lost."""
        model = self.model
        latency = self.latency()
        if now >= model.gst_us:
            at = now + min(latency, model.delta_us)
        else:
            if model.drop_rate and self._rng.random() < model.drop_rate:
                self.dropped += 1
                return None
            if self._slowed(src):
                latency = model.delta_us * DELAY_MAX_FACTOR
            start = now
            for partition in model.partitions:
                if partition.separates(src, dst, start):
                    start = partition.end_us
            at = start + latency
        self.log.append(Delivery(src, dst, now, at))
        return at

    def late_after_gst(self) -> List[Delivery]:
        """Deliveries sent at or after GST that took longer than delta."""
        bound = self.model.delta_us
        return [
            delivery for delivery in self.log
            if delivery.sent_at >= self.model.gst_us and delivery.deliver_at - delivery.sent_at > bound
        ]
