"""
Enumerations for the merkle feature.
"""

from enum import Enum


class SiblingSide(str, Enum):
    """Which side of the running digest a proof sibling sits on."""
    LEFT = "left"
    RIGHT = "right"
