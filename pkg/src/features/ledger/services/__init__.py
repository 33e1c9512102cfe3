"""
Services layer for the ledger feature.
"""

from src.features.ledger.services.state_machine import (
    apply,
    apply_all,
    consume_nonce,
    classify,
    hash,
    total_supply,
)

__all__ = ["hash", "classify", "apply", "apply_all", "consume_nonce", "total_supply"]
