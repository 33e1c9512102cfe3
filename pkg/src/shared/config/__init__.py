"""
Configuration management module.

Process-level settings read from the environment: output directory,
worker count, event budget, logging and the API server.
"""

from src.shared.config.settings import Settings, settings

__all__ = ["Settings", "settings"]
