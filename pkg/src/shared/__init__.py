"""
Shared module containing cross-cutting concerns.

This module provides configuration, the exception hierarchy, progress
interfaces and seeding helpers shared across all features.
"""

from src.shared.config import settings
from src.shared.exceptions import AppError
from src.shared.utils import make_rng

__all__ = ["settings", "AppError", "make_rng"]
