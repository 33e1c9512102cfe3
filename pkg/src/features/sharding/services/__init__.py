"""
Services layer for the sharding feature.
"""

from src.features.sharding.services.gauges import snapshot
from src.features.sharding.services.lifecycle import merge, redistribute, split
from src.features.sharding.services.policy import cosine_similarity, decide
from src.features.sharding.services.rebalance import bin_loads, rebalance, rebalance_onto

__all__ = [
    "snapshot",
    "decide",
    "cosine_similarity",
    "split",
    "merge",
    "redistribute",
    "rebalance",
    "rebalance_onto",
    "bin_loads",
]
