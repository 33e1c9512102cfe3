"""
Interfaces (protocols) for the threshold feature.

The simulated scheme satisfies these; a real scheme can be substituted.
"""

from typing import Iterable, Protocol, runtime_checkable

from src.features.ledger.domain import Digest
from src.features.threshold.domain.models import PartialSignature, ThresholdSignatureValue


@runtime_checkable
class ThresholdScheme(Protocol):
    """Sign/combine/verify algebra over one signer group."""

    group_id: str
    n: int
    t: int

    def partial_sign(self, signer_id: int, message_digest: Digest) -> PartialSignature:
        ...

    def verify_partial(self, partial: PartialSignature) -> bool:
        ...

    def combine(self, partials: Iterable[PartialSignature]) -> ThresholdSignatureValue:
        ...

    def verify_threshold(self, sigma: ThresholdSignatureValue) -> bool:
        ...
