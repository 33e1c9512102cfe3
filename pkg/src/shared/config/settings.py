"""
Application settings and configuration.

Centralizes process-level configuration values with environment variable support.
Protocol parameters live in scenario files and per-feature constants.
"""

import os
from dataclasses import dataclass, field
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


@dataclass(frozen=True)
class SimulationSettings:
    """Settings for the discrete-event engine."""
    default_seed: int = 7
    max_events: int = field(
        default_factory=lambda: int(os.getenv("SHARDSIM_MAX_EVENTS", "20000000"))
    )


@dataclass(frozen=True)
class HarnessSettings:
    """Settings for experiment runs."""
    output_dir: Path = field(
        default_factory=lambda: Path(os.getenv("SHARDSIM_OUTPUT_DIR", "results"))
    )
    workers: int = field(
        default_factory=lambda: int(os.getenv("SHARDSIM_WORKERS", "4"))
    )
    records_filename: str = "records.csv"
    summary_filename: str = "summary.txt"


@dataclass(frozen=True)
class ServerSettings:
    """Settings for server configuration."""
    host: str = "0.0.0.0"
    port: int = 8000
    debug: bool = field(default_factory=lambda: os.getenv("DEBUG", "false").lower() == "true")


@dataclass(frozen=True)
class LoggingSettings:
    """Settings for log output."""
    level: str = field(default_factory=lambda: os.getenv("SHARDSIM_LOG_LEVEL", "INFO").upper())
    format: str = "%(asctime)s %(levelname)s %(name)s: %(message)s"


@dataclass
class Settings:
    """
    Application settings container.

    Provides typed access to all configuration values.
    """
    simulation: SimulationSettings = field(default_factory=SimulationSettings)
    harness: HarnessSettings = field(default_factory=HarnessSettings)
    server: ServerSettings = field(default_factory=ServerSettings)
    logging: LoggingSettings = field(default_factory=LoggingSettings)

    @property
    def output_dir(self) -> Path:
        """Convenience accessor for the results directory."""
        return self.harness.output_dir


# Global settings instance
settings = Settings()
