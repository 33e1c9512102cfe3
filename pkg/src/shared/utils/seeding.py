"""
Seed derivation utilities.

Every stochastic component draws from its own numpy Generator derived from the
run seed plus a stable label, so adding a consumer never perturbs the others.
"""

import hashlib
from typing import Union

import numpy as np

Label = Union[str, int]


def derive_seed(base_seed: int, *labels: Label) -> int:
    """
    Derive a child seed from a base seed and a label path.

    Args:
        base_seed: Run-level seed
        labels: Stable labels naming the consumer (e.g. "network", 3)

    Returns:
        A 64-bit seed that depends only on the inputs
    """
    material = "/".join([str(base_seed), *map(str, labels)]).encode()
    return int.from_bytes(hashlib.blake2b(material, digest_size=8).digest(), "big")


def make_rng(base_seed: int, *labels: Label) -> np.random.Generator:
    """Create an independent Generator for one consumer."""
    return np.random.default_rng(np.random.SeedSequence(derive_seed(base_seed, *labels)))
