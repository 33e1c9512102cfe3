"""
Shared utilities module.

Provides common utility functions used across features.
"""

from src.shared.utils.seeding import derive_seed, make_rng

__all__ = ["derive_seed", "make_rng"]
