"""
Experiments feature services.
"""

from src.features.experiments.services.approx import approx_factor
from src.features.experiments.services.factory import create_scenario_service
from src.features.experiments.services.metrics import (
    Utilization,
    batch_latency,
    efficiency,
    epoch_loads,
    improvement,
    latency_stats,
    tps,
    util_distance,
    utilization,
)
from src.features.experiments.services.planner import Job, ScenarioPlanner, Variant, strategy_management
from src.features.experiments.services.runner import (
    aggregate,
    build_report,
    compare,
    execute,
    run_jobs,
    run_scenario,
)
from src.features.experiments.services.scenario_service import ScenarioService

__all__ = [
    "approx_factor",
    "create_scenario_service",
    "Utilization",
    "batch_latency",
    "efficiency",
    "epoch_loads",
    "improvement",
    "latency_stats",
    "tps",
    "util_distance",
    "utilization",
    "Job",
    "ScenarioPlanner",
    "Variant",
    "strategy_management",
    "aggregate",
    "build_report",
    "compare",
    "execute",
    "run_jobs",
    "run_scenario",
    "ScenarioService",
]
