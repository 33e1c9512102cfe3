"""
Experiments feature - metrics, scenarios and the command line.

Turns run traces into throughput, latency and utilization figures, sweeps
scenarios across seeds and compares the adaptive protocol with the static
baseline.
"""

from src.features.experiments.domain import MetricsRecord, Report, ScenarioKind, ScenarioSpec
from src.features.experiments.infrastructure import load_scenario
from src.features.experiments.services import approx_factor, create_scenario_service, run_scenario

__all__ = [
    "MetricsRecord",
    "Report",
    "ScenarioKind",
    "ScenarioSpec",
    "load_scenario",
    "approx_factor",
    "create_scenario_service",
    "run_scenario",
]
