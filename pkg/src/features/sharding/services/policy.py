"""
Split/merge decisions from load gauges.
"""

import math
from typing import Dict, List, Mapping, Sequence

from src.features.sharding.constants import MIN_VALIDATORS
from src.features.sharding.domain import (
    ActionKind,
    LoadGauge,
    MgmtAction,
    Shard,
    ShardMgrConfig,
)


def cosine_similarity(left: Sequence[float], right: Sequence[float]) -> float:
    dot = sum(a * b for a, b in zip(left, right))
    norm = math.sqrt(sum(a * a for a in left)) * math.sqrt(sum(b * b for b in right))
    if norm == 0:
        return 1.0 if not any(left) and not any(right) else 0.0
    return dot / norm


def _eligible(shard: Shard, epoch: int) -> bool:
    return shard.active and shard.cooldown_until <= epoch


def _underloaded_streak(history: Sequence[LoadGauge], config: ShardMgrConfig) -> bool:
    recent = list(history)[-config.merge_epochs:]
    return len(recent) >= config.merge_epochs and all(
        gauge.v < config.merge_threshold and gauge.u < config.merge_threshold for gauge in recent
    )


def decide(
    gauges: Mapping[int, LoadGauge],
    history: Mapping[int, Sequence[LoadGauge]],
    shards: Mapping[int, Shard],
    config: ShardMgrConfig,
    epoch: int,
) -> List[MgmtAction]:
    """
    Split shards above the split threshold and merge groups of shards that
    stayed below the merge threshold for `merge_epochs` evaluations.

    At most one action per shard. When `max_adjusted` binds, the most loaded
    shards are served first. Output is ordered by lowest shard id.
    """
    if not config.enabled:
        return []

    budget = config.max_adjusted if config.max_adjusted is not None else len(gauges)
    active_count = sum(1 for shard in shards.values() if shard.active)
    room = None if config.max_shards is None else config.max_shards - active_count
    actions: List[MgmtAction] = []
    claimed = set()

    overloaded = [
        gauge for shard_id, gauge in gauges.items()
        if shard_id in shards and _eligible(shards[shard_id], epoch)
        and (gauge.v > config.split_threshold or gauge.u > config.split_threshold)
    ]
    overloaded.sort(key=lambda gauge: (-gauge.load, -gauge.backlog, gauge.shard_id))
    for gauge in overloaded:
        if budget <= 0:
            break
        k = min(config.split_fanout, len(shards[gauge.shard_id].validator_ids) // MIN_VALIDATORS)
        if room is not None:
            k = min(k, room + 1)
        if k < 2:
            continue
        actions.append(MgmtAction(kind=ActionKind.SPLIT, shards=(gauge.shard_id,), k=k, epoch=epoch))
        claimed.add(gauge.shard_id)
        budget -= 1
        if room is not None:
            room -= k - 1

    candidates = sorted(
        shard_id for shard_id, gauge in gauges.items()
        if shard_id in shards and shard_id not in claimed
        and _eligible(shards[shard_id], epoch)
        and _underloaded_streak(history.get(shard_id, [gauge]), config)
    )
    for seed in candidates:
        if seed in claimed or budget < 2:
            continue
        group = [seed]
        load_v, load_u = gauges[seed].v, gauges[seed].u
        for partner in candidates:
            if len(group) >= config.merge_fanout or budget - len(group) <= 0:
                break
            if partner in claimed or partner in group:
                continue
            gauge = gauges[partner]
            if cosine_similarity(gauges[seed].access, gauge.access) < config.similarity_threshold:
                continue
            if load_v + gauge.v >= config.split_threshold or load_u + gauge.u >= config.split_threshold:
                continue
            group.append(partner)
            load_v += gauge.v
            load_u += gauge.u
        if len(group) >= 2:
            actions.append(MgmtAction(kind=ActionKind.MERGE, shards=tuple(group), epoch=epoch))
            claimed.update(group)
            budget -= len(group)

    actions.sort(key=lambda action: min(action.shards))
    return actions
