"""
In-memory run trace.
"""

from typing import Iterator, List, Optional

from src.features.simulation.domain import TraceKind
from src.features.simulation.infrastructure import TraceRecord, trace_digest


class Trace:
    """Ordered records of one run; every record has `t` (sim-time) and `kind`."""

    def __init__(self):
        self.records: List[TraceRecord] = []

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[TraceRecord]:
        return iter(self.records)

    def append(self, kind: TraceKind, t: int, **fields) -> TraceRecord:
        record = {"t": int(t), "kind": TraceKind(kind).value, **fields}
        self.records.append(record)
        return record

    def of(self, kind: TraceKind) -> List[TraceRecord]:
        value = TraceKind(kind).value
        return [record for record in self.records if record["kind"] == value]

    def last(self, kind: TraceKind) -> Optional[TraceRecord]:
        matches = self.of(kind)
        return matches[-1] if matches else None

    def digest(self) -> str:
        return trace_digest(self.records)
