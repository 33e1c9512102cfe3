"""
Enumerations for the experiments feature.
"""

from enum import Enum


class ScenarioKind(str, Enum):
    """What a scenario sweeps and which metrics it compares."""
    LATENCY = "latency"
    UTILIZATION = "utilization"
    THROUGHPUT = "throughput"
    LOAD = "load"
    SECURITY = "security"
    ATOMICITY = "atomicity"
    SINGLE = "single"


class Topology(str, Enum):
    """Shard graph families of the approximation calculator."""
    GENERAL = "general"
    HYPERCUBE_BUTTERFLY_GRID = "hypercube_butterfly_grid"
    GENERAL_RANDOM_K = "general_random_k"
    LINE = "line"


class Method(str, Enum):
    """Scheduling method whose approximation factor is evaluated."""
    ADAPTIVE = "adaptive"
    BASELINE = "baseline"


class ProgressStep(str, Enum):
    """Steps reported while a scenario runs."""
    PLANNING = "planning"
    RUNNING = "running"
    AGGREGATING = "aggregating"
    COMPLETE = "complete"
