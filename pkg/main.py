"""
Adaptive Shard Simulator - FastAPI Backend

Runs simulation scenarios on request and streams their progress and final
report as server-sent events; also serves the approximation calculator.
"""

import asyncio
import json
import logging
from dataclasses import asdict
from typing import AsyncGenerator

from dotenv import load_dotenv
from fastapi import FastAPI, Query
from fastapi.responses import JSONResponse, StreamingResponse

from src.features.experiments.domain import Method, ScenarioRequest, Topology
from src.features.experiments.infrastructure import parse_scenario, render_summary
from src.features.experiments.services import approx_factor, create_scenario_service
from src.shared.config import settings
from src.shared.exceptions import AppError
from src.shared.interfaces import ProgressUpdate

# Load environment variables
load_dotenv()

logging.basicConfig(level=settings.logging.level, format=settings.logging.format)
logger = logging.getLogger(__name__)

# Create FastAPI application
app = FastAPI(
    title="Adaptive Shard Simulator",
    description="Deterministic discrete-event simulation of an adaptive sharded blockchain",
    version="1.0.0"
)


@app.get("/")
async def root():
    """Health check endpoint."""
    return {"status": "ok", "message": "Adaptive Shard Simulator API"}


@app.get("/health")
async def health_check():
    """Health check endpoint for monitoring."""
    return {"status": "healthy"}


@app.get("/api/approx")
async def approx(
    topology: Topology,
    method: Method,
    k: float,
    d: float = 1.0,
    s: float = 1.0,
    D: float = Query(1.0, description="Longest distance a transaction spans"),
    g: float = 1.0,
):
    """Evaluate an approximation factor."""
    try:
        value = approx_factor(topology, method, k=k, d=d, s=s, D=D, g=g)
    except AppError as e:
        return JSONResponse(status_code=400, content=e.to_dict())
    return {"topology": topology.value, "method": method.value, "value": value}


@app.post("/api/scenarios")
async def scenarios(request: ScenarioRequest):
    """
    Run a scenario and stream progress via SSE.
    """
    return StreamingResponse(
        scenario_stream(request),
        media_type="text/event-stream",
        headers={
            "Cache-Control": "no-cache",
            "Connection": "keep-alive",
            "X-Accel-Buffering": "no",
        }
    )


async def scenario_stream(request: ScenarioRequest) -> AsyncGenerator[str, None]:
    """Generate SSE events for one scenario run."""
    progress_queue: asyncio.Queue[ProgressUpdate] = asyncio.Queue()

    async def progress_callback(update: ProgressUpdate) -> None:
        await progress_queue.put(update)

    try:
        spec = parse_scenario(request.scenario).with_overrides(
            seed=request.seed, seeds=request.seeds, mode=request.mode,
        )
    except AppError as e:
        yield format_sse_event("error", {"message": e.message, "code": e.code})
        return

    service = create_scenario_service(output_dir=settings.output_dir / spec.name)
    scenario_task = asyncio.create_task(service.run(spec, progress_callback=progress_callback))

    try:
        while not scenario_task.done():
            try:
                update = await asyncio.wait_for(progress_queue.get(), timeout=0.5)
                yield format_sse_event("progress", asdict(update))
            except asyncio.TimeoutError:
                continue

        while not progress_queue.empty():
            update = await progress_queue.get()
            yield format_sse_event("progress", asdict(update))

        report = await scenario_task
        yield format_sse_event("complete", {
            "scenario": report.scenario,
            "kind": report.kind.value,
            "runs": len(report.records),
            "aggregates": [aggregate.model_dump() for aggregate in report.aggregates],
            "improvements": [item.model_dump() for item in report.improvements],
            "summary": render_summary(report),
        })

    except AppError as e:
        yield format_sse_event("error", {"message": e.message, "code": e.code})
    except Exception:
        logger.exception("scenario %s failed", spec.name)
        yield format_sse_event("error", {
            "message": "An unexpected error occurred. Please try again."
        })
    finally:
        service.close()


def format_sse_event(event_type: str, data: dict) -> str:
    """Format data as an SSE event string."""
    json_data = json.dumps(data)
    return f"event: {event_type}\ndata: {json_data}\n\n"
