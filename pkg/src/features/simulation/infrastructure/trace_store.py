"""
NDJSON persistence of run traces.

One record per line, keys sorted, no whitespace; the SHA-256 over those
exact bytes is the trace digest.
"""

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Union

logger = logging.getLogger(__name__)

TraceRecord = Dict[str, Any]


def canonical_line(record: TraceRecord) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":")) + "\n"


def trace_digest(records: Iterable[TraceRecord]) -> str:
    """Hex SHA-256 of the canonical NDJSON rendering."""
    hasher = hashlib.sha256()
    for record in records:
        hasher.update(canonical_line(record).encode())
    return hasher.hexdigest()


class NdjsonTraceStore:
    """Writes and reads trace files."""

    def __init__(self, directory: Union[str, Path]):
        self.directory = Path(directory)

    def write(self, name: str, records: Iterable[TraceRecord]) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self.directory / name
        with path.open("w", encoding="utf-8") as handle:
            for record in records:
                handle.write(canonical_line(record))
        logger.info("wrote trace %s", path)
        return path

    def read(self, name: str) -> List[TraceRecord]:
        return read_trace(self.directory / name)


def read_trace(path: Union[str, Path]) -> List[TraceRecord]:
    with Path(path).open("r", encoding="utf-8") as handle:
        return [json.loads(line) for line in handle if line.strip()]
