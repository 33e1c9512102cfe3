"""
Longest-processing-time greedy partitioning of accounts into shards.
"""

from typing import Dict, List, Mapping, Sequence


def rebalance(weights: Mapping[int, float], bin_count: int) -> Dict[int, int]:
    """
    Assign each account to a bin index in 0..bin_count-1.

    Heaviest account first, each to the currently lightest bin; ties between
    accounts go to the lower id and ties between bins to the lower index.
    """
    if bin_count < 1:
        raise ValueError("bin_count must be at least 1")
    loads = [0.0] * bin_count
    assignment = {}
    for account in sorted(weights, key=lambda acct: (-weights[acct], acct)):
        target = min(range(bin_count), key=lambda index: (loads[index], index))
        assignment[account] = target
        loads[target] += weights[account]
    return assignment


def bin_loads(weights: Mapping[int, float], assignment: Mapping[int, int], bin_count: int) -> List[float]:
    loads = [0.0] * bin_count
    for account, target in assignment.items():
        loads[target] += weights[account]
    return loads


def rebalance_onto(weights: Mapping[int, float], shard_ids: Sequence[int]) -> Dict[int, int]:
    """Same rule, with bins labelled by shard id in ascending order."""
    ordered = sorted(shard_ids)
    return {account: ordered[index] for account, index in rebalance(weights, len(ordered)).items()}
