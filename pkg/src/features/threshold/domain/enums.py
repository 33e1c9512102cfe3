"""
Enumerations for the threshold feature.
"""

from enum import Enum


class ThresholdPolicy(str, Enum):
    """How many input shards must sign a cross-shard transaction."""
    ALL_INPUTS = "all_inputs"
    TWO_THIRDS = "two_thirds"
