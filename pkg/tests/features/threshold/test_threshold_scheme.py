"""
Property-based test for threshold combination and verification.

**Feature: adaptive-shard-simulator, Property 4: Quorum Soundness**
"""

import hashlib
import itertools

import pytest
from hypothesis import given, strategies as st, settings

import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent.parent.parent.parent))

from src.features.ledger.domain import DomainTag, hash_digest
from src.features.threshold.domain import (
    BadThreshold,
    InsufficientShares,
    MixedMessages,
    PartialSignature,
    ThresholdPolicy,
    ThresholdScheme,
    ThresholdSignatureValue,
    UnknownSigner,
)
from src.features.threshold.services import (
    combine,
    keygen,
    partial_sign,
    required_signers,
    verify_partial,
    verify_threshold,
)

MESSAGE = hashlib.sha256(b"tx-1").digest()
OTHER = hashlib.sha256(b"tx-2").digest()


def forged(signer_id, message=MESSAGE, salt=0):
    return PartialSignature(
        signer_id=signer_id,
        message_digest=message,
        sig=hashlib.sha256(f"forged-{signer_id}-{salt}".encode()).digest(),
    )


class TestKeygen:
    def test_deterministic(self):
        assert keygen("g", 5, 3, 42) == keygen("g", 5, 3, 42)
        assert keygen("g", 5, 3, 42).commitments != keygen("g", 5, 3, 43).commitments

    def test_bad_threshold(self):
        with pytest.raises(BadThreshold):
            keygen("g", 3, 4, 1)
        with pytest.raises(BadThreshold):
            keygen("g", 3, 0, 1)

    def test_commitments_hash_shares(self):
        registry = keygen("g", 5, 3, 7)
        for signer in registry.signers:
            share = registry.view_for(signer).own_share
            assert registry.commitments[signer] == hash_digest(DomainTag.SHARE, share)

    def test_explicit_signer_ids(self):
        registry = keygen("shards", 3, 2, 1, signer_ids=[4, 9, 2])
        assert registry.signers == [2, 4, 9]

    def test_satisfies_scheme_protocol(self):
        assert isinstance(keygen("g", 4, 2, 1), ThresholdScheme)


class TestPartials:
    def test_round_trip(self):
        registry = keygen("g", 5, 3, 1)
        assert verify_partial(registry, partial_sign(registry, 2, MESSAGE))

    def test_distinct_messages(self):
        registry = keygen("g", 5, 3, 1)
        assert partial_sign(registry, 2, MESSAGE).sig != partial_sign(registry, 2, OTHER).sig

    def test_forged_rejected(self):
        assert not verify_partial(keygen("g", 5, 3, 1), forged(2))

    def test_unknown_signer(self):
        registry = keygen("g", 5, 3, 1)
        with pytest.raises(UnknownSigner):
            partial_sign(registry, 17, MESSAGE)
        assert not verify_partial(registry, forged(17))

    def test_tampered_message(self):
        registry = keygen("g", 5, 3, 1)
        honest = partial_sign(registry, 1, MESSAGE)
        assert not verify_partial(registry, honest.model_copy(update={"message_digest": OTHER}))


class TestCombine:
    def test_three_of_three_needed(self):
        registry = keygen("g", 5, 3, 1)
        sigma = combine(registry, [partial_sign(registry, i, MESSAGE) for i in (0, 2, 4)])
        assert sigma.signer_set == (0, 2, 4)
        assert verify_threshold(registry, sigma)

    def test_two_valid_is_insufficient(self):
        registry = keygen("g", 5, 3, 1)
        with pytest.raises(InsufficientShares):
            combine(registry, [partial_sign(registry, i, MESSAGE) for i in (0, 1)])

    def test_forged_partial_filtered(self):
        registry = keygen("g", 5, 3, 1)
        partials = [partial_sign(registry, i, MESSAGE) for i in (0, 1)] + [forged(2)]
        with pytest.raises(InsufficientShares) as info:
            combine(registry, partials)
        assert info.value.valid == 2

    def test_duplicate_signer_counts_once(self):
        registry = keygen("g", 5, 3, 1)
        partials = [partial_sign(registry, 0, MESSAGE)] * 3 + [partial_sign(registry, 1, MESSAGE)]
        with pytest.raises(InsufficientShares):
            combine(registry, partials)

    def test_mixed_messages(self):
        registry = keygen("g", 5, 2, 1)
        with pytest.raises(MixedMessages):
            combine(registry, [partial_sign(registry, 0, MESSAGE), partial_sign(registry, 1, OTHER)])


class TestVerifyThreshold:
    def test_short_signer_set(self):
        registry = keygen("g", 5, 3, 1)
        sigma = combine(registry, [partial_sign(registry, i, MESSAGE) for i in range(3)])
        short = sigma.model_copy(update={"signer_set": sigma.signer_set[:2]})
        assert not verify_threshold(registry, short)

    def test_other_message(self):
        registry = keygen("g", 5, 3, 1)
        sigma = combine(registry, [partial_sign(registry, i, MESSAGE) for i in range(3)])
        other = combine(registry, [partial_sign(registry, i, OTHER) for i in range(3)])
        assert not verify_threshold(registry, sigma.model_copy(update={"agg": other.agg}))

    def test_unknown_member(self):
        registry = keygen("g", 5, 3, 1)
        sigma = combine(registry, [partial_sign(registry, i, MESSAGE) for i in range(3)])
        assert not verify_threshold(registry, sigma.model_copy(update={"signer_set": (0, 1, 99)}))

    def test_per_transaction_threshold(self):
        registry = keygen("shards", 4, 1, 3)
        needed = registry.with_threshold(2)
        sigma = combine(needed, [partial_sign(needed, 0, MESSAGE), partial_sign(needed, 3, MESSAGE)])
        assert verify_threshold(needed, sigma)
        assert not verify_threshold(registry.with_threshold(3), sigma)


def test_exhaustive_grid_up_to_seven_signers():
    """combine succeeds iff at least t honest distinct partials survive filtering."""
    for n in range(1, 8):
        for t in range(1, n + 1):
            registry = keygen(f"grid-{n}", n, t, n * 10 + t)
            for roles in itertools.product((0, 1, 2), repeat=n):
                partials = []
                for signer, role in enumerate(roles):
                    if role == 1:
                        partials.append(partial_sign(registry, signer, MESSAGE))
                    elif role == 2:
                        partials.append(forged(signer))
                honest = roles.count(1)
                if honest >= t:
                    sigma = combine(registry, partials)
                    assert set(sigma.signer_set) == {s for s, r in enumerate(roles) if r == 1}
                    assert verify_threshold(registry, sigma)
                else:
                    with pytest.raises(InsufficientShares):
                        combine(registry, partials)


@st.composite
def corrupt_coalitions(draw):
    n = draw(st.integers(min_value=2, max_value=7))
    t = draw(st.integers(min_value=2, max_value=n))
    corrupt = draw(st.lists(st.integers(0, n - 1), unique=True, max_size=t - 1))
    extra = draw(st.lists(st.integers(0, n - 1), unique=True, max_size=n))
    salt = draw(st.integers(0, 10**6))
    return n, t, corrupt, extra, salt


@given(coalition=corrupt_coalitions())
@settings(max_examples=300)
def test_property_fewer_than_t_corrupt_never_forge(coalition):
    """Corrupt signers below the threshold cannot produce a verifying aggregate."""
    n, t, corrupt, extra, salt = coalition
    registry = keygen("fuzz", n, t, 5)
    views = {signer: registry.view_for(signer) for signer in corrupt}
    claimed = sorted(set(corrupt) | set(extra))
    sigs = [
        views[signer].sign(MESSAGE).sig if signer in views else forged(signer, salt=salt).sig
        for signer in claimed
    ]
    attempt = ThresholdSignatureValue(
        message_digest=MESSAGE,
        signer_set=tuple(claimed),
        agg=hash_digest(DomainTag.SHARE, b"".join(sigs)),
    )
    assert not verify_threshold(registry, attempt)

    partials = [views[signer].sign(MESSAGE) for signer in corrupt]
    partials += [forged(signer, salt=salt) for signer in extra if signer not in views]
    with pytest.raises(InsufficientShares):
        combine(registry, partials)


@given(order=st.permutations(list(range(5))))
@settings(max_examples=100)
def test_property_combine_ignores_input_order(order):
    registry = keygen("g", 5, 3, 9)
    partials = [partial_sign(registry, i, MESSAGE) for i in range(5)]
    assert combine(registry, [partials[i] for i in order]) == combine(registry, partials)


def test_required_signers_policies():
    assert required_signers(3) == 3
    assert required_signers(3, ThresholdPolicy.TWO_THIRDS) == 2
    assert required_signers(1, ThresholdPolicy.TWO_THIRDS) == 1
    assert required_signers(4, ThresholdPolicy.TWO_THIRDS) == 3
