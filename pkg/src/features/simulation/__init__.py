"""
Simulation feature module.

Deterministic discrete-event network:
- Seeded scheduler, partially synchronous network and Poisson/Zipf workload
- Shard and committee consensus groups at replicated or modeled fidelity
- Adaptive and baseline engines with adversary hookpoints and an NDJSON trace
"""

from src.features.simulation.domain import AdversarySpec, RunMode, RunSummary, SimConfig, WorkloadSpec
from src.features.simulation.services import Engine, RunResult, run

__all__ = ["AdversarySpec", "RunMode", "RunSummary", "SimConfig", "WorkloadSpec", "Engine", "RunResult", "run"]
