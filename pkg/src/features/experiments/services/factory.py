"""
Factory for creating the scenario service with dependencies.
"""

from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, Union

from src.features.experiments.infrastructure import ReportWriter
from src.features.experiments.services.planner import ScenarioPlanner
from src.features.experiments.services.scenario_service import ScenarioService
from src.shared.config import settings


def create_scenario_service(
    workers: Optional[int] = None,
    output_dir: Optional[Union[str, Path]] = None,
) -> ScenarioService:
    """
    Create a fully configured ScenarioService.

    Args:
        workers: Process count (uses settings if not provided); one runs on a thread
        output_dir: Where records and summary are written (nothing written if not provided)

    Returns:
        Configured ScenarioService instance
    """
    workers = settings.harness.workers if workers is None else workers
    return ScenarioService(
        planner=ScenarioPlanner(),
        executor=ProcessPoolExecutor(max_workers=workers) if workers > 1 else None,
        writer=ReportWriter(output_dir) if output_dir is not None else None,
    )
