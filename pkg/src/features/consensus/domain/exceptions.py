"""
Exceptions specific to the consensus feature.

Replicas record these as faults; they never escape `step`.
"""

from src.shared.exceptions import AppError


class ConsensusError(AppError):
    """Base exception for consensus errors."""

    def __init__(self, message: str, code: str = "CONSENSUS_ERROR"):
        super().__init__(message, code=code)


class AuthFailure(ConsensusError):
    """A message whose signature, sender or role does not check out."""

    def __init__(self, sender: int, reason: str):
        self.sender = sender
        self.reason = reason
        super().__init__(f"Message from {sender} rejected: {reason}.", code="AUTH_FAILURE")


class Equivocation(ConsensusError):
    """Two conflicting proposals for the same view and sequence."""

    def __init__(self, sender: int, view: int, seq: int):
        self.sender = sender
        self.view = view
        self.seq = seq
        super().__init__(
            f"Node {sender} proposed conflicting values in view {view}, seq {seq}.",
            code="EQUIVOCATION",
        )
