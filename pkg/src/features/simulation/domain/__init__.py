"""
Simulation feature domain layer.
"""

from src.features.simulation.domain.enums import (
    ArrivalPattern,
    Behavior,
    ConsensusFidelity,
    Hookpoint,
    RunMode,
    TraceKind,
)
from src.features.simulation.domain.exceptions import AdversaryAccessDenied, ConfigError, SimulationError
from src.features.simulation.domain.models import (
    AdversarySpec,
    NetModel,
    Partition,
    RunSummary,
    SimConfig,
    SimEvent,
    WorkItem,
    WorkloadSpec,
)

__all__ = [
    # Enums
    "ArrivalPattern",
    "Behavior",
    "ConsensusFidelity",
    "Hookpoint",
    "RunMode",
    "TraceKind",
    # Exceptions
    "SimulationError",
    "ConfigError",
    "AdversaryAccessDenied",
    # Models
    "SimEvent",
    "Partition",
    "NetModel",
    "AdversarySpec",
    "WorkloadSpec",
    "SimConfig",
    "RunSummary",
    "WorkItem",
]
