"""
Shard split, merge and account redistribution.
"""

import logging
from typing import Callable, Dict, List, Mapping, Sequence

from src.features.ledger.domain import ShardState
from src.features.merkle.services import tree_for_state
from src.features.sharding.constants import MIN_VALIDATORS
from src.features.sharding.domain import (
    OverlappingAccounts,
    Shard,
    ShardingError,
    ShardStatus,
    TooFewValidators,
)
from src.features.sharding.services.rebalance import rebalance, rebalance_onto

logger = logging.getLogger(__name__)

Rebalancer = Callable[[Mapping[int, float], int], Dict[int, int]]


def _substate(state: ShardState, accounts: Sequence[int]) -> ShardState:
    return ShardState(
        balances={account: state.balances[account] for account in accounts},
        applied_nonces={account: state.nonce_of(account) for account in accounts},
        version=state.version + 1,
    )


def split(
    shard: Shard,
    k: int,
    rebalancer: Rebalancer = rebalance,
    *,
    weights: Mapping[int, float],
    child_ids: Sequence[int],
    epoch: int = 0,
    cooldown_epochs: int = 0,
) -> List[Shard]:
    """
    Divide an active shard into k children and retire it.

    Accounts are partitioned by `rebalancer` over their weights; validators
    are dealt round-robin; each child carries its share of the parent's load.
    """
    if not shard.active:
        raise ShardingError(f"Shard {shard.shard_id} is {shard.status.value}, cannot split.")
    if len(shard.validator_ids) < MIN_VALIDATORS * k:
        raise TooFewValidators(shard.shard_id, len(shard.validator_ids), k)
    if len(child_ids) != k:
        raise ShardingError(f"Split into {k} needs {k} child ids.")

    accounts = shard.accounts
    account_weights = {account: float(weights.get(account, 0.0)) for account in accounts}
    assignment = rebalancer(account_weights, k)
    total = sum(account_weights.values())

    children = []
    for index, child_id in enumerate(child_ids):
        members = [account for account in accounts if assignment[account] == index]
        share = (
            sum(account_weights[account] for account in members) / total if total > 0 else 1.0 / k
        )
        state = _substate(shard.state, members)
        children.append(Shard(
            shard_id=child_id,
            validator_ids=tuple(shard.validator_ids[index::k]),
            state=state,
            tree=tree_for_state(state),
            v=shard.v * share,
            u=shard.u * share,
            cooldown_until=epoch + cooldown_epochs + 1,
            lineage=(shard.shard_id,),
            stake=shard.stake / k,
            reputation=shard.reputation,
        ))
    shard.status = ShardStatus.RETIRED
    logger.info("split shard %s into %s at epoch %s", shard.shard_id, list(child_ids), epoch)
    return children


def merge(group: Sequence[Shard], new_id: int, epoch: int = 0, cooldown_epochs: int = 0) -> Shard:
    """Combine shards into one, retiring the group."""
    ids = [shard.shard_id for shard in group]
    if len(set(ids)) != len(ids) or len(ids) < 2:
        raise ShardingError(f"Merge needs at least two distinct shards, got {ids}.")
    inactive = [shard.shard_id for shard in group if not shard.active]
    if inactive:
        raise ShardingError(f"Shards {inactive} are not active.")

    balances: Dict[int, int] = {}
    nonces: Dict[int, int] = {}
    overlap = set()
    for shard in group:
        overlap.update(set(shard.state.balances) & set(balances))
        balances.update(shard.state.balances)
        nonces.update(shard.state.applied_nonces)
    if overlap:
        raise OverlappingAccounts(overlap)

    stake = sum(shard.stake for shard in group)
    if stake > 0:
        reputation = sum(shard.stake * shard.reputation for shard in group) / stake
    else:
        reputation = sum(shard.reputation for shard in group) / len(group)

    state = ShardState(
        balances=balances,
        applied_nonces=nonces,
        version=max(shard.state.version for shard in group) + 1,
    )
    merged = Shard(
        shard_id=new_id,
        validator_ids=tuple(sorted(v for shard in group for v in shard.validator_ids)),
        state=state,
        tree=tree_for_state(state),
        v=min(100.0, sum(shard.v for shard in group)),
        u=min(100.0, sum(shard.u for shard in group)),
        cooldown_until=epoch + cooldown_epochs + 1,
        lineage=tuple(ids),
        stake=stake,
        reputation=min(1.0, reputation),
    )
    for shard in group:
        shard.status = ShardStatus.RETIRED
    logger.info("merged shards %s into %s at epoch %s", ids, new_id, epoch)
    return merged


def redistribute(shards: Sequence[Shard], weights: Mapping[int, float]) -> Dict[int, int]:
    """
    Re-home every account of `shards` among the same shards by LPT.

    Balances and nonces move with their accounts; returns account -> shard id
    for accounts whose home changed.
    """
    if len(shards) < 2:
        return {}
    by_id = {shard.shard_id: shard for shard in shards}
    homes = {account: shard.shard_id for shard in shards for account in shard.state.balances}
    records = {
        account: (by_id[home].state.balances[account], by_id[home].state.nonce_of(account))
        for account, home in homes.items()
    }
    assignment = rebalance_onto({account: float(weights.get(account, 0.0)) for account in homes}, list(by_id))

    for shard_id, shard in by_id.items():
        members = sorted(account for account, target in assignment.items() if target == shard_id)
        state = ShardState(
            balances={account: records[account][0] for account in members},
            applied_nonces={account: records[account][1] for account in members},
            version=shard.state.version + 1,
        )
        shard.state = state
        shard.tree = tree_for_state(state)
    return {account: target for account, target in assignment.items() if homes[account] != target}
