"""
Services layer for the consensus feature.
"""

from src.features.consensus.services.local_group import LocalGroup
from src.features.consensus.services.replica import (
    authenticate,
    check_agreement,
    highest_prepared,
    leader,
    new_instance,
    quorum,
    step,
    valid_certificate,
)

__all__ = [
    "LocalGroup",
    "leader",
    "quorum",
    "new_instance",
    "step",
    "check_agreement",
    "authenticate",
    "valid_certificate",
    "highest_prepared",
]
