"""
Domain models for the consensus feature.
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, NamedTuple, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.features.consensus.constants import DEFAULT_VIEW_TIMEOUT_US, MAX_VIEW_TIMEOUT_US
from src.features.consensus.domain.enums import KIND_CODES, FaultKind, MessageKind, Phase
from src.features.ledger.domain import Digest, DomainTag, enc_bytes, enc_u64, hash_digest
from src.features.threshold.domain import PartialSignature
from src.features.threshold.services import ShareRegistry, SignerView


class ConsensusConfig(BaseModel):
    """Membership and timing of one replica group."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    group_id: str = "group"
    nodes: Tuple[int, ...] = Field(..., min_length=1)
    view_timeout_us: int = Field(default=DEFAULT_VIEW_TIMEOUT_US, gt=0)
    max_view_timeout_us: int = Field(default=MAX_VIEW_TIMEOUT_US, gt=0)
    keys: Optional[ShareRegistry] = Field(default=None, exclude=True, repr=False)

    @model_validator(mode="after")
    def validate_nodes(self) -> "ConsensusConfig":
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError("Node ids must be distinct")
        return self

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def f(self) -> int:
        return (self.n - 1) // 3


def signing_digest(group_id: str, kind: MessageKind, view: int, seq: int, value_digest: Digest, sender: int) -> Digest:
    """Digest a replica signs for one message."""
    payload = (
        enc_bytes(group_id.encode())
        + enc_u64(KIND_CODES[kind])
        + enc_u64(view)
        + enc_u64(seq)
        + value_digest
        + enc_u64(sender)
    )
    return hash_digest(DomainTag.MSG, payload)


class ConsensusMessage(BaseModel):
    """
    One consensus message.

    ViewChange carries the sender's prepared certificate; NewView carries the
    ViewChange messages that justify it; a Commit with a non-empty proof is a
    decision certificate sent to a lagging replica. `recipient` is None for
    broadcasts and is not covered by the signature.
    """
    model_config = ConfigDict(frozen=True)

    kind: MessageKind
    view: int = Field(..., ge=0)
    seq: int = Field(..., ge=0)
    value_digest: Digest
    sender: int
    auth: Optional[PartialSignature] = None
    certificate: Optional["PreparedCertificate"] = None
    proof: Tuple["ConsensusMessage", ...] = Field(default_factory=tuple)
    recipient: Optional[int] = None

    def digest_for(self, group_id: str) -> Digest:
        return signing_digest(group_id, self.kind, self.view, self.seq, self.value_digest, self.sender)


class PreparedCertificate(BaseModel):
    """2f+1 signed Prepare messages for one (view, value)."""
    model_config = ConfigDict(frozen=True)

    view: int = Field(..., ge=0)
    value_digest: Digest
    prepares: Tuple[ConsensusMessage, ...]


ConsensusMessage.model_rebuild()
PreparedCertificate.model_rebuild()


class Propose(NamedTuple):
    value_digest: Digest
    now: int


class Deliver(NamedTuple):
    message: ConsensusMessage
    now: int


class TimerFired(NamedTuple):
    now: int


StepInput = Union[Propose, Deliver, TimerFired]


class Fault(NamedTuple):
    """Evidence of misbehaviour kept by the replica that observed it."""
    kind: FaultKind
    sender: int
    view: int
    detail: str


@dataclass
class ConsensusInstance:
    """
    One replica's state for one sequence number.

    Treated as a value: `step` works on a copy and returns the successor.
    Tallies map (view, value) to the set of senders; logs keep the signed
    messages behind each vote so certificates can be assembled.
    """
    config: ConsensusConfig
    node_id: int
    seq: int
    view: int = 0
    phase: Phase = Phase.IDLE
    proposal: Optional[Digest] = None
    own_value: Optional[Digest] = None
    decided_value: Optional[Digest] = None
    decided_view: Optional[int] = None
    timer_deadline: Optional[int] = None
    timeout_us: int = 0
    vc_target: int = 0
    new_view_sent: int = -1
    prepared_cert: Optional[PreparedCertificate] = None
    pre_prepared: Dict[int, Digest] = field(default_factory=dict)
    prepare_tally: Dict[Tuple[int, Digest], FrozenSet[int]] = field(default_factory=dict)
    prepare_log: Dict[Tuple[int, Digest, int], ConsensusMessage] = field(default_factory=dict)
    commit_tally: Dict[Tuple[int, Digest], FrozenSet[int]] = field(default_factory=dict)
    commit_log: Dict[Tuple[int, Digest, int], ConsensusMessage] = field(default_factory=dict)
    vc_requests: Dict[int, int] = field(default_factory=dict)
    vc_log: Dict[Tuple[int, int], ConsensusMessage] = field(default_factory=dict)
    buffered: Tuple[ConsensusMessage, ...] = ()
    faults: Tuple[Fault, ...] = ()
    signer: Optional[SignerView] = field(default=None, compare=False, repr=False)

    def copy(self) -> "ConsensusInstance":
        clone = ConsensusInstance(**{name: getattr(self, name) for name in self.__dataclass_fields__})
        for name in ("pre_prepared", "prepare_tally", "prepare_log", "commit_tally", "commit_log", "vc_requests", "vc_log"):
            setattr(clone, name, dict(getattr(self, name)))
        return clone

    @property
    def decided(self) -> bool:
        return self.decided_value is not None

    @property
    def in_view_change(self) -> bool:
        return self.vc_target > self.view


class StepResult(NamedTuple):
    instance: ConsensusInstance
    outbox: Tuple[ConsensusMessage, ...]
    decision: Optional[Digest]
