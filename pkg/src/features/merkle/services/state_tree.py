"""
Sorted-key binary Merkle tree with copy-on-write updates.

Leaves are ordered by key and padded with EMPTY_ROOT up to the next power of
two. Internal nodes live in a heap-indexed list: node i has children 2i and
2i+1, the root sits at index 1 and leaf j at index width + j.
"""

from bisect import bisect_left
from typing import Dict, Iterable, List, Optional, Tuple

from src.features.ledger.domain import (
    Digest,
    DomainTag,
    ShardState,
    account_key,
    account_value,
    hash_digest,
)
from src.features.merkle.domain import (
    DuplicateKey,
    KeyAbsent,
    MerkleProof,
    ProofStep,
    SiblingSide,
)

EMPTY_ROOT: Digest = hash_digest(DomainTag.NODE, b"")


def leaf_digest(key: Digest, value: Digest) -> Digest:
    return hash_digest(DomainTag.LEAF, key + value)


def node_digest(left: Digest, right: Digest) -> Digest:
    return hash_digest(DomainTag.NODE, left + right)


def _width_for(count: int) -> int:
    width = 1
    while width < count:
        width *= 2
    return width


class StateTree:
    """Immutable authenticated map from account keys to record digests."""

    __slots__ = ("_keys", "_values", "_nodes", "_width")

    def __init__(self, keys: Tuple[Digest, ...], values: Dict[Digest, Digest], nodes: List[Digest], width: int):
        self._keys = keys
        self._values = values
        self._nodes = nodes
        self._width = width

    @property
    def root(self) -> Digest:
        if not self._keys:
            return EMPTY_ROOT
        return self._nodes[1]

    @property
    def height(self) -> int:
        return self._width.bit_length() - 1

    def __len__(self) -> int:
        return len(self._keys)

    def __contains__(self, key: Digest) -> bool:
        return key in self._values

    def get(self, key: Digest) -> Optional[Digest]:
        return self._values.get(key)

    def items(self) -> List[Tuple[Digest, Digest]]:
        return [(key, self._values[key]) for key in self._keys]


def build(leaves: Iterable[Tuple[Digest, Digest]]) -> StateTree:
    """Build a tree whose root does not depend on the order of `leaves`."""
    values: Dict[Digest, Digest] = {}
    for key, value in leaves:
        if key in values:
            raise DuplicateKey(key)
        values[key] = value

    keys = tuple(sorted(values))
    width = _width_for(len(keys))
    nodes: List[Digest] = [EMPTY_ROOT] * (2 * width)
    for position, key in enumerate(keys):
        nodes[width + position] = leaf_digest(key, values[key])
    for index in range(width - 1, 0, -1):
        nodes[index] = node_digest(nodes[2 * index], nodes[2 * index + 1])
    return StateTree(keys, values, nodes, width)


def prove(tree: StateTree, key: Digest) -> MerkleProof:
    """Sibling path authenticating one key against the tree's root."""
    if key not in tree._values:
        raise KeyAbsent(key)

    index = tree._width + bisect_left(tree._keys, key)
    path = []
    while index > 1:
        if index % 2 == 0:
            path.append(ProofStep(sibling=tree._nodes[index + 1], side=SiblingSide.RIGHT))
        else:
            path.append(ProofStep(sibling=tree._nodes[index - 1], side=SiblingSide.LEFT))
        index //= 2
    return MerkleProof(key=key, value=tree._values[key], path=tuple(path), root_binding=tree.root)


def verify(root: Digest, proof: MerkleProof) -> bool:
    """Fold the path from the proof's leaf and compare with `root`."""
    try:
        running = leaf_digest(proof.key, proof.value)
        for step in proof.path:
            if step.side is SiblingSide.RIGHT:
                running = node_digest(running, step.sibling)
            else:
                running = node_digest(step.sibling, running)
    except (AttributeError, TypeError):
        return False
    return running == root


def update(tree: StateTree, key: Digest, new_value: Digest) -> StateTree:
    """
    Return a tree with `key` set to `new_value`.

    Existing keys recompute only the digests on their root path. A new key
    shifts the sorted leaf order and triggers a rebuild.
    """
    if key not in tree._values:
        return build([*tree.items(), (key, new_value)])
    if tree._values[key] == new_value:
        return tree

    values = dict(tree._values)
    values[key] = new_value
    nodes = list(tree._nodes)
    index = tree._width + bisect_left(tree._keys, key)
    nodes[index] = leaf_digest(key, new_value)
    index //= 2
    while index >= 1:
        nodes[index] = node_digest(nodes[2 * index], nodes[2 * index + 1])
        index //= 2
    return StateTree(tree._keys, values, nodes, tree._width)


def update_many(tree: StateTree, changes: Iterable[Tuple[Digest, Digest]]) -> StateTree:
    """Apply several updates with one copy of the node list."""
    changes = dict(changes)
    if any(key not in tree._values for key in changes):
        return build({**tree._values, **changes}.items())
    changes = {key: value for key, value in changes.items() if tree._values[key] != value}
    if not changes:
        return tree

    values = {**tree._values, **changes}
    nodes = list(tree._nodes)
    dirty = set()
    for key, value in changes.items():
        index = tree._width + bisect_left(tree._keys, key)
        nodes[index] = leaf_digest(key, value)
        if index > 1:
            dirty.add(index // 2)
    while dirty:
        parents = set()
        for index in sorted(dirty, reverse=True):
            nodes[index] = node_digest(nodes[2 * index], nodes[2 * index + 1])
            if index > 1:
                parents.add(index // 2)
        dirty = parents
    return StateTree(tree._keys, values, nodes, tree._width)


def state_leaves(state: ShardState) -> List[Tuple[Digest, Digest]]:
    """Leaf pairs committing to every account record in a shard state."""
    return [
        (account_key(account), account_value(account, balance, state.nonce_of(account)))
        for account, balance in state.balances.items()
    ]


def tree_for_state(state: ShardState) -> StateTree:
    return build(state_leaves(state))


def refresh_accounts(tree: StateTree, state: ShardState, accounts: Iterable[int]) -> StateTree:
    """Fold the current records of `accounts` into `tree`."""
    return update_many(tree, [
        (account_key(account), account_value(account, state.balance_of(account), state.nonce_of(account)))
        for account in accounts
    ])


def prove_account(tree: StateTree, account: int) -> MerkleProof:
    return prove(tree, account_key(account))
