"""
Services layer for the merkle feature.
"""

from src.features.merkle.services.state_tree import (
    EMPTY_ROOT,
    StateTree,
    build,
    leaf_digest,
    node_digest,
    prove,
    prove_account,
    refresh_accounts,
    state_leaves,
    tree_for_state,
    update,
    update_many,
    verify,
)

__all__ = [
    "EMPTY_ROOT",
    "StateTree",
    "build",
    "prove",
    "verify",
    "update",
    "update_many",
    "leaf_digest",
    "node_digest",
    "state_leaves",
    "tree_for_state",
    "refresh_accounts",
    "prove_account",
]
