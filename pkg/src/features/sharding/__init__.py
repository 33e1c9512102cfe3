"""
Sharding feature module.

Adaptive shard management:
- v/u load gauges normalized to shard capacity
- Threshold split and similarity-grouped merge with cooldowns
- Greedy (LPT) account redistribution
"""

from src.features.sharding.domain import MgmtAction, Shard, ShardMgrConfig
from src.features.sharding.services import decide, merge, rebalance, snapshot, split

__all__ = ["MgmtAction", "Shard", "ShardMgrConfig", "decide", "merge", "rebalance", "snapshot", "split"]
