"""
Services layer for the cross-shard feature.
"""

from src.features.crossshard.services.committee import committee_size, sample_committee
from src.features.crossshard.services.coordinator import CrossShardLedger
from src.features.crossshard.services.two_phase import TwoPhaseCoordinator

__all__ = [
    "CrossShardLedger",
    "TwoPhaseCoordinator",
    "committee_size",
    "sample_committee",
]
