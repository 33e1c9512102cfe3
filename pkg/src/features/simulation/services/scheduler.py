"""
Deterministic event queue.

Events fire in (fire_at, seq_no) order; seq_no is the insertion counter, so
two events at the same instant fire in the order they were scheduled.
"""

import heapq
from typing import Any, List, Optional

from src.features.simulation.domain import SimEvent, SimulationError


class Scheduler:
    """Min-heap of SimEvents with a monotonic clock."""

    def __init__(self):
        self._heap: List[SimEvent] = []
        self._seq = 0
        self.now = 0
        self.fired = 0

    def __len__(self) -> int:
        return len(self._heap)

    def schedule(self, fire_at: int, target: str, payload: Any) -> SimEvent:
        if fire_at < self.now:
            raise SimulationError(f"Cannot schedule at {fire_at}, clock is at {self.now}.")
        event = SimEvent(int(fire_at), self._seq, target, payload)
        self._seq += 1
        heapq.heappush(self._heap, event)
        return event

    def after(self, delay_us: int, target: str, payload: Any) -> SimEvent:
        return self.schedule(self.now + max(0, int(delay_us)), target, payload)

    def peek(self) -> Optional[SimEvent]:
        return self._heap[0] if self._heap else None

    def pop_until(self, until: int) -> Optional[SimEvent]:
        """Next event strictly before `until`, advancing the clock to it."""
        if not self._heap or self._heap[0].fire_at >= until:
            return None
        event = heapq.heappop(self._heap)
        self.now = event.fire_at
        self.fired += 1
        return event
