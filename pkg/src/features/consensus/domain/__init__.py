"""
Consensus feature domain layer.
"""

from src.features.consensus.domain.enums import FaultKind, MessageKind, Phase
from src.features.consensus.domain.exceptions import AuthFailure, ConsensusError, Equivocation
from src.features.consensus.domain.models import (
    ConsensusConfig,
    ConsensusInstance,
    ConsensusMessage,
    Deliver,
    Fault,
    PreparedCertificate,
    Propose,
    StepInput,
    StepResult,
    TimerFired,
    signing_digest,
)

__all__ = [
    # Enums
    "FaultKind",
    "MessageKind",
    "Phase",
    # Exceptions
    "ConsensusError",
    "AuthFailure",
    "Equivocation",
    # Models
    "ConsensusConfig",
    "ConsensusInstance",
    "ConsensusMessage",
    "PreparedCertificate",
    "Propose",
    "Deliver",
    "TimerFired",
    "StepInput",
    "StepResult",
    "Fault",
    "signing_digest",
]
