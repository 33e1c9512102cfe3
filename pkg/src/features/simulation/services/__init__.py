"""
Services layer for the simulation feature.
"""

from src.features.simulation.services.adversary import Adversary, AdversaryContext, twin_value
from src.features.simulation.services.engine import Engine, RunResult, block_digest, run
from src.features.simulation.services.groups import ModeledGroup, ReplicaGroup
from src.features.simulation.services.network import Delivery, Network
from src.features.simulation.services.scheduler import Scheduler
from src.features.simulation.services.trace import Trace
from src.features.simulation.services.workload import WorkloadGenerator, generate, zipf_cdf

__all__ = [
    "Adversary",
    "AdversaryContext",
    "twin_value",
    "Engine",
    "RunResult",
    "block_digest",
    "run",
    "ModeledGroup",
    "ReplicaGroup",
    "Delivery",
    "Network",
    "Scheduler",
    "Trace",
    "WorkloadGenerator",
    "generate",
    "zipf_cdf",
]
