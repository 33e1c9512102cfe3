"""
Scenario service - runs a scenario and reports progress as runs finish.
"""

import asyncio
import logging
from concurrent.futures import Executor
from typing import Optional

from src.features.experiments.constants import PROGRESS_RANGE, PROGRESS_START
from src.features.experiments.domain import ProgressStep, Report, ScenarioSpec
from src.features.experiments.infrastructure import ReportWriter
from src.features.experiments.services.planner import Job, ScenarioPlanner
from src.features.experiments.services.runner import build_report, execute
from src.shared.interfaces import ProgressCallback, ProgressUpdate

logger = logging.getLogger(__name__)


class ScenarioService:
    """Orchestrates planning, execution and reporting of one scenario."""

    def __init__(
        self,
        planner: ScenarioPlanner,
        executor: Optional[Executor] = None,
        writer: Optional[ReportWriter] = None,
    ):
        self._planner = planner
        self._executor = executor
        self._writer = writer

    async def run(self, spec: ScenarioSpec, progress_callback: ProgressCallback = None) -> Report:
        """Execute every job of the scenario and build its report."""
        await self._emit(progress_callback, ProgressStep.PLANNING, f"Planning {spec.name}...", 0.0)
        jobs = self._planner.plan(spec)
        total = len(jobs)
        loop = asyncio.get_running_loop()

        async def run_job(job: Job):
            return job.index, await loop.run_in_executor(self._executor, execute, job)

        records = [None] * total
        finished = 0
        for next_done in asyncio.as_completed([run_job(job) for job in jobs]):
            index, record = await next_done
            records[index] = record
            finished += 1
            await self._emit(
                progress_callback, ProgressStep.RUNNING,
                f"Finished {record.variant} seed {record.seed} ({finished}/{total})",
                PROGRESS_START + PROGRESS_RANGE * finished / total,
                current=finished, total=total,
            )

        await self._emit(
            progress_callback, ProgressStep.AGGREGATING, "Aggregating...", PROGRESS_START + PROGRESS_RANGE,
        )
        report = build_report(spec, records)
        if self._writer is not None:
            self._writer.write(report)
        await self._emit(progress_callback, ProgressStep.COMPLETE, "Complete", 1.0)
        return report

    def close(self) -> None:
        """Release the worker processes, if any."""
        if self._executor is not None:
            self._executor.shutdown(wait=False, cancel_futures=True)

    async def _emit(
        self,
        callback: ProgressCallback,
        step: ProgressStep,
        message: str,
        progress: float,
        current: Optional[int] = None,
        total: Optional[int] = None,
    ):
        """Emit progress update."""
        if not callback:
            return
        try:
            await callback(ProgressUpdate(
                step=step.value,
                message=message,
                progress=progress,
                metadata={"current": current, "total": total} if total else None,
            ))
        except Exception:
            logger.debug("progress callback failed", exc_info=True)
