"""
PBFT-style replica state machine.

`step` is a pure transition: it never mutates the instance it is given and
returns the successor, the messages to send and a decision when one is
reached. The caller (the simulator) owns delivery and timers.
"""

import logging
from collections import defaultdict
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from src.features.consensus.constants import NO_VALUE
from src.features.consensus.domain import (
    AuthFailure,
    ConsensusConfig,
    ConsensusInstance,
    ConsensusMessage,
    Deliver,
    Equivocation,
    Fault,
    FaultKind,
    MessageKind,
    Phase,
    PreparedCertificate,
    Propose,
    StepInput,
    StepResult,
    TimerFired,
    signing_digest,
)
from src.features.ledger.domain import Digest
from src.features.threshold.services import SignerView

logger = logging.getLogger(__name__)

Validator = Callable[[Digest], bool]


def leader(view: int, config: ConsensusConfig) -> int:
    """Round-robin leader for a view."""
    return config.nodes[view % config.n]


def quorum(config: ConsensusConfig) -> int:
    return 2 * config.f + 1


def new_instance(
    config: ConsensusConfig,
    node_id: int,
    seq: int,
    view: int = 0,
    signer: Optional[SignerView] = None,
) -> ConsensusInstance:
    """Fresh replica state for `seq`, starting in `view`."""
    return ConsensusInstance(
        config=config,
        node_id=node_id,
        seq=seq,
        view=view,
        vc_target=view,
        new_view_sent=view - 1,
        timeout_us=config.view_timeout_us,
        signer=signer,
    )


def step(instance: ConsensusInstance, event: StepInput, validate: Optional[Validator] = None) -> StepResult:
    """Advance one replica by one input."""
    transition = _Transition(instance.copy(), validate)
    if isinstance(event, Propose):
        transition.on_propose(event.value_digest, event.now)
    elif isinstance(event, Deliver):
        transition.on_deliver(event.message, event.now)
    elif isinstance(event, TimerFired):
        transition.on_timer(event.now)
    return StepResult(transition.state, tuple(transition.outbox), transition.decision)


def check_agreement(instances: Iterable[ConsensusInstance]) -> bool:
    """True iff every decided value for each sequence number is the same."""
    decided: Dict[int, set] = defaultdict(set)
    for instance in instances:
        if instance.decided_value is not None:
            decided[instance.seq].add(instance.decided_value)
    return all(len(values) == 1 for values in decided.values())


def authenticate(config: ConsensusConfig, message: ConsensusMessage) -> None:
    """Raise AuthFailure unless the message is signed by a member for its own content."""
    if message.sender not in config.nodes:
        raise AuthFailure(message.sender, "not a member")
    if config.keys is None:
        return
    auth = message.auth
    if auth is None or auth.signer_id != message.sender:
        raise AuthFailure(message.sender, "missing signature")
    if auth.message_digest != message.digest_for(config.group_id):
        raise AuthFailure(message.sender, "signature over other content")
    if not config.keys.verify_partial(auth):
        raise AuthFailure(message.sender, "bad signature")


def valid_certificate(config: ConsensusConfig, seq: int, certificate: PreparedCertificate, before_view: int) -> bool:
    """2f+1 distinct authentic Prepares for the certificate's (view, value)."""
    if certificate.view >= before_view:
        return False
    senders = set()
    for prepare in certificate.prepares:
        if (
            prepare.kind is not MessageKind.PREPARE
            or prepare.seq != seq
            or prepare.view != certificate.view
            or prepare.value_digest != certificate.value_digest
        ):
            return False
        try:
            authenticate(config, prepare)
        except AuthFailure:
            return False
        senders.add(prepare.sender)
    return len(senders) >= quorum(config)


def highest_prepared(view_changes: Sequence[ConsensusMessage]) -> Optional[Digest]:
    """Value of the highest-view certificate among ViewChange messages."""
    certificates = [message.certificate for message in view_changes if message.certificate is not None]
    if not certificates:
        return None
    best = max(certificates, key=lambda cert: (cert.view, cert.value_digest))
    return best.value_digest


class _Transition:
    """Mutable scratch space for one step over a copied instance."""

    def __init__(self, state: ConsensusInstance, validate: Optional[Validator]):
        self.state = state
        self.validate = validate
        self.outbox: List[ConsensusMessage] = []
        self.decision: Optional[Digest] = None

    @property
    def config(self) -> ConsensusConfig:
        return self.state.config

    # Inputs

    def on_propose(self, value: Digest, now: int) -> None:
        state = self.state
        if state.decided:
            return
        if state.own_value is None:
            state.own_value = value
        if state.timer_deadline is None:
            state.timer_deadline = now + state.timeout_us
        if (
            leader(state.view, self.config) == state.node_id
            and state.view not in state.pre_prepared
            and not state.in_view_change
        ):
            if self.validate is not None and not self.validate(value):
                return
            self._send(MessageKind.PRE_PREPARE, state.view, value)
            self._accept(state.view, value)

    def on_deliver(self, message: ConsensusMessage, now: int) -> None:
        try:
            authenticate(self.config, message)
        except AuthFailure as exc:
            self._record(FaultKind.AUTH_FAILURE, message.sender, message.view, exc.reason)
            return
        if message.seq != self.state.seq:
            return
        self._dispatch(message, now)

    def on_timer(self, now: int) -> None:
        state = self.state
        if state.decided or state.timer_deadline is None or now < state.timer_deadline:
            return
        target = max(state.view, state.vc_target) + 1
        logger.debug("node %s seq %s timed out in view %s", state.node_id, state.seq, state.view)
        self._send_view_change(target, now)

    # Dispatch

    def _dispatch(self, message: ConsensusMessage, now: int) -> None:
        state = self.state
        if message.kind is MessageKind.COMMIT and message.proof:
            self._on_decision_certificate(message)
            return
        if state.decided:
            if message.kind is MessageKind.VIEW_CHANGE and message.sender != state.node_id:
                self._reply_decision(message.sender)
            return

        kind = message.kind
        if kind in (MessageKind.PRE_PREPARE, MessageKind.PREPARE, MessageKind.COMMIT) and message.view > state.view:
            state.buffered = state.buffered + (message,)
        elif kind is MessageKind.PRE_PREPARE:
            if message.view == state.view:
                self._on_pre_prepare(message)
        elif kind is MessageKind.PREPARE:
            if message.view == state.view and not state.in_view_change:
                self._record_vote(state.prepare_tally, state.prepare_log, message)
                self._check_prepared()
        elif kind is MessageKind.COMMIT:
            self._record_vote(state.commit_tally, state.commit_log, message)
            self._check_committed(message.view, message.value_digest)
        elif kind is MessageKind.VIEW_CHANGE:
            self._on_view_change(message, now)
        elif kind is MessageKind.NEW_VIEW:
            self._on_new_view(message, now)

    def _on_pre_prepare(self, message: ConsensusMessage) -> None:
        state = self.state
        if message.sender != leader(message.view, self.config):
            self._record(FaultKind.AUTH_FAILURE, message.sender, message.view, "pre-prepare from non-leader")
            return
        try:
            self._ensure_consistent(message.view, message.value_digest, message.sender)
        except Equivocation:
            return
        if message.view in state.pre_prepared or state.in_view_change:
            return
        if self.validate is not None and not self.validate(message.value_digest):
            return
        self._accept(message.view, message.value_digest)

    def _on_view_change(self, message: ConsensusMessage, now: int) -> None:
        state = self.state
        target = message.view
        if target <= state.view:
            return
        certificate = message.certificate
        if certificate is not None and (
            certificate.value_digest != message.value_digest
            or not valid_certificate(self.config, state.seq, certificate, target)
        ):
            self._record(FaultKind.AUTH_FAILURE, message.sender, target, "bad prepared certificate")
            return

        state.vc_log[(target, message.sender)] = message
        state.vc_requests[message.sender] = max(state.vc_requests.get(message.sender, 0), target)

        floor = max(state.view, state.vc_target)
        requested = sorted(
            (view for sender, view in state.vc_requests.items() if view > floor and sender != state.node_id),
            reverse=True,
        )
        if len(requested) >= self.config.f + 1:
            self._send_view_change(requested[self.config.f], now)
        self._maybe_new_view(target, now)

    def _on_new_view(self, message: ConsensusMessage, now: int) -> None:
        state = self.state
        target = message.view
        if target < max(state.view, state.vc_target):
            return
        if message.sender != leader(target, self.config):
            self._record(FaultKind.AUTH_FAILURE, message.sender, target, "new-view from non-leader")
            return
        try:
            self._ensure_consistent(target, message.value_digest, message.sender)
        except Equivocation:
            return
        if target in state.pre_prepared:
            return

        proof = self._valid_view_change_proof(message.proof, target)
        if proof is None:
            self._record(FaultKind.AUTH_FAILURE, message.sender, target, "new-view without view-change quorum")
            return
        expected = highest_prepared(proof)
        if expected is not None and expected != message.value_digest:
            self._record(FaultKind.EQUIVOCATION, message.sender, target, "new-view ignores prepared value")
            return
        if expected is None and self.validate is not None and not self.validate(message.value_digest):
            return
        self._install_view(target, message.value_digest, now)

    def _on_decision_certificate(self, message: ConsensusMessage) -> None:
        state = self.state
        if state.decided:
            return
        senders = set()
        for commit in message.proof:
            if (
                commit.kind is not MessageKind.COMMIT
                or commit.seq != state.seq
                or commit.view != message.view
                or commit.value_digest != message.value_digest
            ):
                return
            try:
                authenticate(self.config, commit)
            except AuthFailure:
                return
            senders.add(commit.sender)
        if len(senders) < quorum(self.config):
            return
        for commit in message.proof:
            self._record_vote(state.commit_tally, state.commit_log, commit)
        self._decide(message.view, message.value_digest)

    # Protocol steps

    def _accept(self, view: int, value: Digest) -> None:
        state = self.state
        state.pre_prepared[view] = value
        state.proposal = value
        state.phase = Phase.PRE_PREPARED
        prepare = self._send(MessageKind.PREPARE, view, value)
        self._record_vote(state.prepare_tally, state.prepare_log, prepare)
        self._check_prepared()

    def _check_prepared(self) -> None:
        state = self.state
        if state.phase is not Phase.PRE_PREPARED or state.proposal is None or state.in_view_change:
            return
        key = (state.view, state.proposal)
        voters = state.prepare_tally.get(key, frozenset())
        if len(voters) < quorum(self.config):
            return
        state.phase = Phase.PREPARED
        state.prepared_cert = PreparedCertificate(
            view=state.view,
            value_digest=state.proposal,
            prepares=tuple(state.prepare_log[(state.view, state.proposal, sender)] for sender in sorted(voters)),
        )
        commit = self._send(MessageKind.COMMIT, state.view, state.proposal)
        self._record_vote(state.commit_tally, state.commit_log, commit)
        self._check_committed(state.view, state.proposal)

    def _check_committed(self, view: int, value: Digest) -> None:
        if self.state.decided:
            return
        if len(self.state.commit_tally.get((view, value), frozenset())) >= quorum(self.config):
            self._decide(view, value)

    def _decide(self, view: int, value: Digest) -> None:
        state = self.state
        state.phase = Phase.DECIDED
        state.decided_value = value
        state.decided_view = view
        state.timer_deadline = None
        state.buffered = ()
        self.decision = value

    def _send_view_change(self, target: int, now: int) -> None:
        state = self.state
        certificate = state.prepared_cert
        value = certificate.value_digest if certificate is not None else NO_VALUE
        message = self._send(MessageKind.VIEW_CHANGE, target, value, certificate=certificate)
        state.vc_target = target
        state.vc_log[(target, state.node_id)] = message
        state.vc_requests[state.node_id] = target
        state.timeout_us = min(state.timeout_us * 2, self.config.max_view_timeout_us)
        state.timer_deadline = now + state.timeout_us
        self._maybe_new_view(target, now)

    def _maybe_new_view(self, target: int, now: int) -> None:
        state = self.state
        if leader(target, self.config) != state.node_id or state.new_view_sent >= target:
            return
        if target <= state.view or target < state.vc_target:
            return
        proof = [message for (view, _), message in sorted(state.vc_log.items()) if view == target]
        if len(proof) < quorum(self.config):
            return
        value = highest_prepared(proof)
        if value is None:
            value = state.own_value
            if value is None or (self.validate is not None and not self.validate(value)):
                return
        self._send(MessageKind.NEW_VIEW, target, value, proof=tuple(proof))
        state.new_view_sent = target
        logger.debug("node %s installs view %s for seq %s", state.node_id, target, state.seq)
        self._install_view(target, value, now)

    def _install_view(self, target: int, value: Digest, now: int) -> None:
        state = self.state
        state.view = target
        state.vc_target = max(state.vc_target, target)
        state.timer_deadline = now + state.timeout_us
        self._accept(target, value)

        pending, state.buffered = state.buffered, ()
        for message in pending:
            if message.view > target:
                state.buffered = state.buffered + (message,)
            elif message.view == target and not state.decided:
                self._dispatch(message, now)

    def _reply_decision(self, recipient: int) -> None:
        state = self.state
        commits = tuple(
            message for (view, value, _), message in sorted(state.commit_log.items())
            if view == state.decided_view and value == state.decided_value
        )
        self._send(
            MessageKind.COMMIT, state.decided_view, state.decided_value,
            proof=commits, recipient=recipient,
        )

    # Helpers

    def _ensure_consistent(self, view: int, value: Digest, sender: int) -> None:
        accepted = self.state.pre_prepared.get(view)
        if accepted is not None and accepted != value:
            self._record(FaultKind.EQUIVOCATION, sender, view, "conflicting proposals")
            raise Equivocation(sender, view, self.state.seq)

    def _valid_view_change_proof(
        self, proof: Tuple[ConsensusMessage, ...], target: int
    ) -> Optional[List[ConsensusMessage]]:
        seen = {}
        for message in proof:
            if message.kind is not MessageKind.VIEW_CHANGE or message.view != target or message.seq != self.state.seq:
                return None
            try:
                authenticate(self.config, message)
            except AuthFailure:
                return None
            if message.certificate is not None and not valid_certificate(
                self.config, self.state.seq, message.certificate, target
            ):
                return None
            seen[message.sender] = message
        if len(seen) < quorum(self.config):
            return None
        return [seen[sender] for sender in sorted(seen)]

    def _record_vote(self, tally, log, message: ConsensusMessage) -> None:
        key = (message.view, message.value_digest)
        voters = tally.get(key, frozenset())
        if message.sender in voters:
            return
        tally[key] = voters | {message.sender}
        log[(message.view, message.value_digest, message.sender)] = message

    def _record(self, kind: FaultKind, sender: int, view: int, detail: str) -> None:
        self.state.faults = self.state.faults + (Fault(kind, sender, view, detail),)

    def _send(
        self,
        kind: MessageKind,
        view: int,
        value: Digest,
        certificate: Optional[PreparedCertificate] = None,
        proof: Tuple[ConsensusMessage, ...] = (),
        recipient: Optional[int] = None,
    ) -> ConsensusMessage:
        state = self.state
        auth = None
        if state.signer is not None:
            auth = state.signer.sign(
                signing_digest(self.config.group_id, kind, view, state.seq, value, state.node_id)
            )
        message = ConsensusMessage(
            kind=kind,
            view=view,
            seq=state.seq,
            value_digest=value,
            sender=state.node_id,
            auth=auth,
            certificate=certificate,
            proof=proof,
            recipient=recipient,
        )
        self.outbox.append(message)
        return message
