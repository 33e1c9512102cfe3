"""
Simulated t-of-n threshold signatures.

A partial signature is a keyed hash of (share, message). The registry keeps
every share and acts as the verification oracle; code outside this module
reaches shares only through a SignerView, which exposes a signer's own share
and nothing else.
"""

import math
from typing import Dict, Iterable, List, Mapping, Optional, Sequence

from src.features.ledger.domain import Digest, DomainTag, enc_bytes, enc_u64, hash_digest
from src.features.threshold.constants import TWO_THIRDS
from src.features.threshold.domain import (
    BadThreshold,
    InsufficientShares,
    MixedMessages,
    PartialSignature,
    ThresholdPolicy,
    ThresholdSignatureValue,
    UnknownSigner,
)


def _sign_with(share: bytes, message_digest: Digest) -> Digest:
    return hash_digest(DomainTag.SHARE, share + message_digest)


def _aggregate(sigs: Sequence[Digest]) -> Digest:
    return hash_digest(DomainTag.SHARE, b"".join(sigs))


class ShareRegistry:
    """Signer group with secret shares and their public commitments."""

    __slots__ = ("group_id", "n", "t", "commitments", "_shares")

    def __init__(self, group_id: str, t: int, shares: Mapping[int, bytes]):
        n = len(shares)
        if not 1 <= t <= n:
            raise BadThreshold(n, t)
        self.group_id = group_id
        self.n = n
        self.t = t
        self._shares: Dict[int, bytes] = dict(shares)
        self.commitments: Dict[int, Digest] = {
            signer: hash_digest(DomainTag.SHARE, share) for signer, share in sorted(self._shares.items())
        }

    @property
    def signers(self) -> List[int]:
        return sorted(self._shares)

    def __contains__(self, signer_id: int) -> bool:
        return signer_id in self._shares

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ShareRegistry):
            return NotImplemented
        return (self.group_id, self.t, self._shares) == (other.group_id, other.t, other._shares)

    def __repr__(self) -> str:
        return f"ShareRegistry(group_id={self.group_id!r}, n={self.n}, t={self.t})"

    def with_threshold(self, t: int) -> "ShareRegistry":
        """Same shares, different threshold."""
        return ShareRegistry(self.group_id, t, self._shares)

    def partial_sign(self, signer_id: int, message_digest: Digest) -> PartialSignature:
        share = self._shares.get(signer_id)
        if share is None:
            raise UnknownSigner(signer_id, self.group_id)
        return PartialSignature(
            signer_id=signer_id,
            message_digest=message_digest,
            sig=_sign_with(share, message_digest),
        )

    def verify_partial(self, partial: PartialSignature) -> bool:
        share = self._shares.get(partial.signer_id)
        if share is None:
            return False
        return partial.sig == _sign_with(share, partial.message_digest)

    def combine(self, partials: Iterable[PartialSignature]) -> ThresholdSignatureValue:
        """Filter invalid partials, dedupe signers and aggregate in signer order."""
        partials = list(partials)
        messages = {partial.message_digest for partial in partials}
        if len(messages) > 1:
            raise MixedMessages()

        valid: Dict[int, Digest] = {}
        for partial in partials:
            if self.verify_partial(partial):
                valid[partial.signer_id] = partial.sig
        if len(valid) < self.t or not messages:
            raise InsufficientShares(len(valid), self.t)

        signer_set = tuple(sorted(valid))
        return ThresholdSignatureValue(
            message_digest=messages.pop(),
            signer_set=signer_set,
            agg=_aggregate([valid[signer] for signer in signer_set]),
        )

    def verify_threshold(self, sigma: ThresholdSignatureValue) -> bool:
        signers = sigma.signer_set
        if len(signers) < self.t or len(set(signers)) != len(signers):
            return False
        if list(signers) != sorted(signers):
            return False
        if any(signer not in self._shares for signer in signers):
            return False
        expected = _aggregate([_sign_with(self._shares[signer], sigma.message_digest) for signer in signers])
        return sigma.agg == expected

    def view_for(self, signer_id: int) -> "SignerView":
        if signer_id not in self._shares:
            raise UnknownSigner(signer_id, self.group_id)
        return SignerView(self, signer_id)


class SignerView:
    """What one signer (honest or corrupt) may do with a registry."""

    __slots__ = ("_registry", "signer_id")

    def __init__(self, registry: ShareRegistry, signer_id: int):
        self._registry = registry
        self.signer_id = signer_id

    @property
    def commitments(self) -> Mapping[int, Digest]:
        return dict(self._registry.commitments)

    @property
    def own_share(self) -> bytes:
        return self._registry._shares[self.signer_id]

    def sign(self, message_digest: Digest) -> PartialSignature:
        return self._registry.partial_sign(self.signer_id, message_digest)

    def verify(self, partial: PartialSignature) -> bool:
        return self._registry.verify_partial(partial)


def keygen(
    group_id: str,
    n: int,
    t: int,
    seed: int,
    signer_ids: Optional[Sequence[int]] = None,
) -> ShareRegistry:
    """Deal n deterministic shares; signer ids default to 0..n-1."""
    if not 1 <= t <= n:
        raise BadThreshold(n, t)
    signers = list(signer_ids) if signer_ids is not None else list(range(n))
    if len(signers) != n or len(set(signers)) != n:
        raise BadThreshold(n, t)

    prefix = enc_u64(seed) + enc_bytes(group_id.encode())
    shares = {
        signer: hash_digest(DomainTag.SHARE, prefix + enc_u64(signer))
        for signer in signers
    }
    return ShareRegistry(group_id, t, shares)


def partial_sign(registry: ShareRegistry, signer_id: int, message_digest: Digest) -> PartialSignature:
    return registry.partial_sign(signer_id, message_digest)


def verify_partial(registry: ShareRegistry, partial: PartialSignature) -> bool:
    return registry.verify_partial(partial)


def combine(registry: ShareRegistry, partials: Iterable[PartialSignature]) -> ThresholdSignatureValue:
    return registry.combine(partials)


def verify_threshold(registry: ShareRegistry, sigma: ThresholdSignatureValue) -> bool:
    return registry.verify_threshold(sigma)


def required_signers(input_shards: int, policy: ThresholdPolicy = ThresholdPolicy.ALL_INPUTS) -> int:
    """Threshold t for a transaction touching `input_shards` input shards."""
    if policy is ThresholdPolicy.TWO_THIRDS:
        return max(1, math.ceil(TWO_THIRDS * input_shards - 1e-9))
    return input_shards
