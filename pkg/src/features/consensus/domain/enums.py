"""
Enumerations for the consensus feature.
"""

from enum import Enum


class MessageKind(str, Enum):
    """Consensus wire message types."""
    PRE_PREPARE = "pre_prepare"
    PREPARE = "prepare"
    COMMIT = "commit"
    VIEW_CHANGE = "view_change"
    NEW_VIEW = "new_view"


class Phase(str, Enum):
    """Progress of one replica within a sequence number."""
    IDLE = "idle"
    PRE_PREPARED = "pre_prepared"
    PREPARED = "prepared"
    COMMITTED = "committed"
    DECIDED = "decided"


class FaultKind(str, Enum):
    """Misbehaviour recorded by a replica instead of being raised."""
    AUTH_FAILURE = "auth_failure"
    EQUIVOCATION = "equivocation"


# Stable numeric codes used in the signed encoding
KIND_CODES = {kind: code for code, kind in enumerate(MessageKind)}
