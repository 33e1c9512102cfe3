"""
Infrastructure layer for the simulation feature.
"""

from src.features.simulation.infrastructure.trace_store import (
    NdjsonTraceStore,
    TraceRecord,
    canonical_line,
    read_trace,
    trace_digest,
)

__all__ = ["NdjsonTraceStore", "TraceRecord", "canonical_line", "read_trace", "trace_digest"]
