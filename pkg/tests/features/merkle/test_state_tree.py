"""
Property-based test for Merkle state tree equivalence and proofs.

**Feature: adaptive-shard-simulator, Property 3: Incremental Root Equivalence**
"""

import hashlib
import random

import pytest
from hypothesis import HealthCheck, given, strategies as st, settings

import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent.parent.parent.parent))

from src.features.ledger.domain import DomainTag, ShardState, hash_digest
from src.features.merkle.domain import DuplicateKey, KeyAbsent, MerkleProof, ProofStep
from src.features.merkle.services import (
    EMPTY_ROOT,
    build,
    leaf_digest,
    prove,
    prove_account,
    refresh_accounts,
    tree_for_state,
    update,
    update_many,
    verify,
)


def digest(label: str) -> bytes:
    return hashlib.sha256(label.encode()).digest()


def pairs(count: int, salt: str = ""):
    return [(digest(f"k{i}{salt}"), digest(f"v{i}{salt}")) for i in range(count)]


keys = st.integers(min_value=0, max_value=40).map(lambda i: digest(f"k{i}"))
values = st.integers(min_value=0, max_value=1000).map(lambda i: digest(f"v{i}"))


class TestBuild:
    def test_empty_root(self):
        assert build([]).root == EMPTY_ROOT
        assert EMPTY_ROOT == hash_digest(DomainTag.NODE, b"")

    def test_single_leaf_root(self):
        key, value = pairs(1)[0]
        assert build([(key, value)]).root == hash_digest(DomainTag.LEAF, key + value)

    def test_order_independent(self):
        leaves = pairs(8)
        shuffled = list(leaves)
        random.Random(3).shuffle(shuffled)
        assert build(leaves).root == build(shuffled).root

    def test_duplicate_key(self):
        key, value = pairs(1)[0]
        with pytest.raises(DuplicateKey):
            build([(key, value), (key, digest("other"))])


class TestProofs:
    def test_round_trip_sixteen_leaves(self):
        tree = build(pairs(16))
        for key, _ in pairs(16):
            proof = prove(tree, key)
            assert len(proof.path) == tree.height == 4
            assert verify(tree.root, proof)

    def test_every_key_of_random_tree(self):
        rng = random.Random(11)
        leaves = [(digest(f"r{rng.random()}"), digest(f"x{i}")) for i in range(64)]
        tree = build(leaves)
        assert all(verify(tree.root, prove(tree, key)) for key, _ in leaves)

    def test_flipped_sibling_fails(self):
        tree = build(pairs(16))
        proof = prove(tree, pairs(16)[5][0])
        first = proof.path[0]
        forged = bytes([first.sibling[0] ^ 1]) + first.sibling[1:]
        tampered = proof.model_copy(update={
            "path": (ProofStep(sibling=forged, side=first.side),) + proof.path[1:],
        })
        assert not verify(tree.root, tampered)

    def test_other_root_fails(self):
        tree = build(pairs(16))
        proof = prove(tree, pairs(16)[0][0])
        assert not verify(build(pairs(16, salt="b")).root, proof)

    def test_truncated_path_fails(self):
        tree = build(pairs(16))
        proof = prove(tree, pairs(16)[2][0])
        truncated = proof.model_copy(update={"path": proof.path[:-1]})
        assert not verify(tree.root, truncated)

    def test_absent_key(self):
        with pytest.raises(KeyAbsent):
            prove(build(pairs(4)), digest("missing"))

    def test_malformed_proof_is_false(self):
        proof = MerkleProof.model_construct(key=b"k", value=b"v", path=(None,), root_binding=b"")
        assert verify(EMPTY_ROOT, proof) is False


class TestUpdate:
    def test_same_value_keeps_root(self):
        tree = build(pairs(8))
        key, value = pairs(8)[3]
        assert update(tree, key, value).root == tree.root

    def test_insert_into_empty(self):
        key, value = pairs(1)[0]
        assert update(build([]), key, value).root == leaf_digest(key, value)

    def test_hundred_mutations_match_rebuild(self):
        rng = random.Random(5)
        current = dict(pairs(10))
        tree = build(current.items())
        for step in range(100):
            key = digest(f"k{rng.randrange(20)}")
            value = digest(f"m{step}")
            current[key] = value
            tree = update(tree, key, value)
            assert tree.root == build(current.items()).root

    def test_update_does_not_touch_original(self):
        tree = build(pairs(4))
        key, _ = pairs(4)[0]
        before = tree.root
        update(tree, key, digest("new"))
        assert tree.root == before


@given(ops=st.lists(st.tuples(keys, values), min_size=1, max_size=25))
@settings(max_examples=1000, deadline=None, suppress_health_check=[HealthCheck.too_slow])
def test_property_incremental_equals_rebuild(ops):
    """Any chain of updates lands on the root of a fresh build."""
    current = {}
    tree = build([])
    for key, value in ops:
        current[key] = value
        tree = update(tree, key, value)
    assert tree.root == build(current.items()).root


@given(size=st.integers(min_value=1, max_value=8), pick=st.integers(min_value=0, max_value=7))
@settings(max_examples=100, deadline=None)
def test_property_perturbed_value_never_verifies(size, pick):
    """A proof for (k, v') never verifies against a root committing (k, v)."""
    leaves = pairs(size)
    tree = build(leaves)
    key, value = leaves[pick % size]
    proof = prove(tree, key)
    for bit in range(32):
        wrong = bytearray(value)
        wrong[bit] ^= 0x80
        assert not verify(tree.root, proof.model_copy(update={"value": bytes(wrong)}))


def test_account_tree_tracks_state():
    state = ShardState.funded([1, 2, 3], 100)
    tree = tree_for_state(state)
    moved = state.model_copy(update={"balances": {**state.balances, 1: 40, 2: 160}})
    refreshed = refresh_accounts(tree, moved, [1, 2])
    assert refreshed.root == tree_for_state(moved).root
    assert verify(refreshed.root, prove_account(refreshed, 2))


@given(
    base=st.dictionaries(keys, values, min_size=1, max_size=20),
    changes=st.dictionaries(keys, values, max_size=8),
)
@settings(max_examples=300, deadline=None, suppress_health_check=[HealthCheck.too_slow])
def test_property_batched_update_equals_rebuild(base, changes):
    tree = update_many(build(base.items()), changes.items())
    assert tree.root == build({**base, **changes}.items()).root
