"""
Adaptive Shard Simulator - Source Package.

This package contains all application code organized by features.
"""

__version__ = "1.0.0"
