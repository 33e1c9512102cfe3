"""
Enumerations for the state-sync feature.
"""

from enum import Enum


class Verdict(str, Enum):
    """A shard's judgment of a disputed transaction."""
    VALID = "valid"
    INVALID = "invalid"


class ChallengeStatus(str, Enum):
    OPEN = "open"
    RESOLVED = "resolved"


class Outcome(str, Enum):
    """Result of a resolved challenge."""
    UPHELD = "upheld"
    ROLLED_BACK = "rolled_back"
