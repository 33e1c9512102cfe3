"""
Entry point for the Adaptive Shard Simulator.

Usage:
    python run.py run scenarios/latency.toml      # Run a scenario
    python run.py metrics results/traces/x.ndjson # Recompute metrics from a trace
    python run.py approx --topology general --method adaptive -k 2 -d 3 -D 8
    python run.py --api                           # Runs the FastAPI server
"""

import sys
import subprocess

from src.features.experiments.presentation import main as run_cli
from src.shared.config import settings


def run_fastapi():
    """Run the FastAPI server."""
    command = [
        sys.executable, "-m", "uvicorn",
        "main:app",
        f"--host={settings.server.host}",
        f"--port={settings.server.port}",
    ]
    if settings.server.debug:
        command.append("--reload")
    subprocess.run(command)


def main():
    """Main entry point."""
    if "--api" in sys.argv:
        print(f"Starting FastAPI server on http://{settings.server.host}:{settings.server.port}")
        run_fastapi()
    else:
        run_cli()


if __name__ == "__main__":
    main()
