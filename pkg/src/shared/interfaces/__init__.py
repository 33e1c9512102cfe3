"""
Common interfaces used across features.

Provides the progress-reporting contract shared by long-running services.
"""

from src.shared.interfaces.base import ProgressUpdate, ProgressCallback

__all__ = ["ProgressUpdate", "ProgressCallback"]
