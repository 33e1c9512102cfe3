"""
Global committee sampling.

The committee is drawn once per epoch from every active shard's validators:
at least one member per shard, the rest uniformly from the remaining pool,
with corrupt members capped at f so the committee stays 3f+1-safe.
"""

import math
from typing import Collection, List, Mapping, Sequence, Tuple

import numpy as np


def committee_size(total_validators: int, fraction: float, minimum: int, shard_count: int = 0) -> int:
    """max(minimum, ceil(fraction * total)), at least one per shard, never more than the pool."""
    size = max(minimum, math.ceil(fraction * total_validators - 1e-9), shard_count)
    return min(size, total_validators)


def sample_committee(
    groups: Mapping[int, Sequence[int]],
    rng: np.random.Generator,
    fraction: float,
    minimum: int,
    corrupt: Collection[int] = (),
) -> Tuple[int, ...]:
    """
    Stratified seeded sample of validator ids.

    Args:
        groups: Active shard id -> validator ids
        rng: Seeded generator for this epoch's draw
        fraction: Share of all validators to draw
        minimum: Smallest committee
        corrupt: Validator ids controlled by the adversary

    Returns:
        Sorted committee member ids
    """
    pool = sorted(validator for members in groups.values() for validator in members)
    if not pool:
        return ()
    size = committee_size(len(pool), fraction, minimum, len(groups))
    corrupt = set(corrupt)
    cap = (size - 1) // 3

    chosen: List[int] = []
    for shard_id in sorted(groups):
        members = sorted(groups[shard_id])
        honest = [validator for validator in members if validator not in corrupt]
        candidates = honest or members
        chosen.append(int(candidates[rng.integers(len(candidates))]))

    def corrupt_count() -> int:
        return sum(1 for validator in chosen if validator in corrupt)

    remaining = [validator for validator in pool if validator not in chosen]
    order = rng.permutation(len(remaining))
    for index in order:
        if len(chosen) >= size:
            break
        candidate = remaining[int(index)]
        if candidate in corrupt and corrupt_count() >= cap:
            continue
        chosen.append(candidate)
    return tuple(sorted(chosen))
