"""
Experiments feature domain layer.
"""

from src.features.experiments.domain.enums import Method, ProgressStep, ScenarioKind, Topology
from src.features.experiments.domain.exceptions import BadParam, BatchIncomplete, EmptyInput, ExperimentError
from src.features.experiments.domain.models import (
    Aggregate,
    Improvement,
    LatencyStats,
    MetricsRecord,
    Report,
    ScenarioRequest,
    ScenarioSpec,
    SweepSpec,
)
from src.features.simulation.domain import ConfigError

__all__ = [
    # Enums
    "Method",
    "ProgressStep",
    "ScenarioKind",
    "Topology",
    # Exceptions
    "ExperimentError",
    "EmptyInput",
    "BatchIncomplete",
    "BadParam",
    "ConfigError",
    # Models
    "LatencyStats",
    "MetricsRecord",
    "SweepSpec",
    "ScenarioSpec",
    "Aggregate",
    "Improvement",
    "Report",
    "ScenarioRequest",
]
