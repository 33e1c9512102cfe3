"""
Property-based test for the scenario service and its HTTP surface.

**Feature: adaptive-shard-simulator, Property 23: Ordered Progress Streaming**
"""

import asyncio
import json

import pytest
from hypothesis import given, strategies as st, settings
from unittest.mock import MagicMock, patch

import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent.parent.parent.parent))

from fastapi.testclient import TestClient

import main
from src.features.experiments.domain import MetricsRecord, ProgressStep, ScenarioKind, ScenarioSpec, SweepSpec
from src.features.experiments.services import ScenarioPlanner, ScenarioService, build_report
from src.shared.interfaces import ProgressUpdate

EXECUTE = "src.features.experiments.services.scenario_service.execute"


def fake_execute(job):
    return MetricsRecord(
        scenario=job.scenario, variant=job.variant, mode=job.config.mode.value, seed=job.seed, tps=float(job.seed),
    )


def load_spec(seeds):
    return ScenarioSpec(
        name="load", kind=ScenarioKind.LOAD, seeds=tuple(range(seeds)), sweep=SweepSpec(rates={"low": 10.0}),
    )


def collect(service, spec):
    updates = []

    async def callback(update):
        updates.append(update)

    report = asyncio.run(service.run(spec, progress_callback=callback))
    return report, updates


@given(seeds=st.integers(min_value=1, max_value=6))
@settings(max_examples=20, deadline=None)
def test_property_progress_is_ordered_and_complete(seeds):
    """Property 23: progress never goes backwards and every run is reported once."""
    writer = MagicMock()
    service = ScenarioService(planner=ScenarioPlanner(), writer=writer)
    with patch(EXECUTE, side_effect=fake_execute):
        report, updates = collect(service, load_spec(seeds))

    steps = [update.step for update in updates]
    total = 2 * seeds
    assert steps[0] == ProgressStep.PLANNING.value
    assert steps[1:-2] == [ProgressStep.RUNNING.value] * total
    assert steps[-2:] == [ProgressStep.AGGREGATING.value, ProgressStep.COMPLETE.value]
    progress = [update.progress for update in updates]
    assert progress == sorted(progress)
    assert progress[-1] == 1.0
    assert [update.metadata["current"] for update in updates[1:-2]] == list(range(1, total + 1))

    assert len(report.records) == total
    assert [record.variant for record in report.records[:seeds]] == ["low-adaptive"] * seeds
    writer.write.assert_called_once_with(report)


def test_failing_callback_does_not_stop_the_run():
    async def broken(update):
        raise RuntimeError("listener went away")

    service = ScenarioService(planner=ScenarioPlanner())
    with patch(EXECUTE, side_effect=fake_execute):
        report = asyncio.run(service.run(load_spec(1), progress_callback=broken))
    assert len(report.records) == 2


def parse_events(body):
    events = []
    for chunk in body.strip().split("\n\n"):
        event_line, data_line = chunk.split("\n")
        events.append((event_line[len("event: "):], json.loads(data_line[len("data: "):])))
    return events


@pytest.fixture
def client():
    return TestClient(main.app)


def test_health_endpoints(client):
    assert client.get("/").json()["status"] == "ok"
    assert client.get("/health").json() == {"status": "healthy"}


def test_approx_endpoint(client):
    response = client.get("/api/approx", params={"topology": "general", "method": "adaptive", "k": 2, "d": 3, "D": 8})
    assert response.status_code == 200
    assert response.json() == {"topology": "general", "method": "adaptive", "value": 18.0}

    response = client.get("/api/approx", params={"topology": "line", "method": "baseline", "k": 0})
    assert response.status_code == 400
    assert response.json()["code"] == "BAD_PARAM"


def test_invalid_scenario_streams_an_error(client):
    response = client.post("/api/scenarios", json={"scenario": {"scenario": {"name": "x", "colour": "blue"}}})
    assert response.status_code == 200
    events = parse_events(response.text)
    assert len(events) == 1
    assert events[0][0] == "error"
    assert events[0][1]["code"] == "CONFIG_ERROR"


def test_scenario_streams_progress_then_report(client):
    received = {}

    async def run(spec, progress_callback=None):
        received["spec"] = spec
        await progress_callback(ProgressUpdate(step="planning", message="Planning load...", progress=0.0))
        records = [
            MetricsRecord(scenario=spec.name, variant="low-adaptive", mode="adaptive", seed=5, tps=12.0),
            MetricsRecord(scenario=spec.name, variant="low-baseline", mode="baseline", seed=5, tps=10.0),
        ]
        return build_report(spec, records)

    service = MagicMock()
    service.run = run
    body = {"scenario": {"scenario": {"name": "load", "kind": "load"}}, "seed": 5, "seeds": 1}
    with patch.object(main, "create_scenario_service", return_value=service):
        response = client.post("/api/scenarios", json=body)

    events = parse_events(response.text)
    assert [name for name, _ in events] == ["progress", "complete"]
    assert events[0][1]["step"] == "planning"
    complete = events[1][1]
    assert complete["scenario"] == "load" and complete["kind"] == "load"
    assert complete["runs"] == 2
    assert complete["improvements"][0]["percent"] == pytest.approx(20.0)
    assert complete["summary"].startswith("Scenario load (load)")
    assert received["spec"].seeds == (5,)
    service.close.assert_called_once()
