"""
Byzantine behaviour injected at fixed hookpoints.

Adversary code never reaches honest state: the only handles it holds are
the signer views the engine grants for corrupt nodes, kept in an
AdversaryContext that refuses every other node id.
"""

import logging
import math
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Set, Tuple

from src.features.consensus.domain import ConsensusMessage, MessageKind, signing_digest
from src.features.ledger.domain import DIGEST_SIZE, Digest, DomainTag, Leg, Transaction, hash_digest
from src.features.simulation.domain import (
    AdversaryAccessDenied,
    AdversarySpec,
    Behavior,
    ConfigError,
    Hookpoint,
)
from src.features.statesync.domain import Verdict
from src.features.threshold.domain import PartialSignature
from src.features.threshold.services import SignerView
from src.shared.utils import make_rng

logger = logging.getLogger(__name__)

Routed = List[Tuple[int, ConsensusMessage]]
Signer = Callable[[Digest], Optional[PartialSignature]]


class AdversaryContext:
    """Signer views of corrupt nodes, per consensus group."""

    def __init__(self, corrupt: Set[int]):
        self._corrupt = corrupt
        self._views: Dict[Tuple[str, int], SignerView] = {}

    def grant(self, group_id: str, view: SignerView) -> None:
        if view.signer_id not in self._corrupt:
            raise AdversaryAccessDenied(view.signer_id)
        self._views[(group_id, view.signer_id)] = view

    def signer(self, group_id: str, node_id: int) -> SignerView:
        if node_id not in self._corrupt:
            raise AdversaryAccessDenied(node_id)
        try:
            return self._views[(group_id, node_id)]
        except KeyError:
            raise AdversaryAccessDenied(node_id) from None


def twin_value(value: Digest) -> Digest:
    """Conflicting value an equivocating node pairs with `value`."""
    return hash_digest(DomainTag.MSG, b"twin" + value)


class Adversary:
    """Applies an AdversarySpec to the run."""

    def __init__(self, spec: Optional[AdversarySpec] = None, seed: int = 0):
        self.spec = spec or AdversarySpec()
        self._rng = make_rng(self.spec.seed if self.spec.seed is not None else seed, "adversary")
        self.corrupt: Set[int] = set()
        self.context = AdversaryContext(self.corrupt)
        self.injected: List[Transaction] = []
        self._handlers = {
            Hookpoint.ON_LEADER_TURN: self._on_leader_turn,
            Hookpoint.ON_PARTIAL_SIGN: self._on_partial_sign,
            Hookpoint.ON_VOTE: self._on_vote,
            Hookpoint.ON_TX_SUBMIT: self._on_tx_submit,
        }

    # Corruption

    def corrupt_groups(self, groups: Mapping[int, Sequence[int]]) -> Set[int]:
        """
        Choose corrupt validators, at most f per group.

        Explicit `corrupt_nodes` beyond f in any group is a configuration
        error; a fraction is rounded down and capped at f.
        """
        spec = self.spec
        explicit = set(spec.corrupt_nodes)
        chosen: Set[int] = set()
        for shard_id in sorted(groups):
            members = sorted(groups[shard_id])
            f = (len(members) - 1) // 3
            if explicit:
                inside = explicit & set(members)
                if len(inside) > f:
                    raise ConfigError(
                        f"Shard {shard_id} would have {len(inside)} corrupt of {len(members)}, tolerance is {f}."
                    )
                chosen |= inside
            elif spec.corrupt_fraction > 0:
                count = min(f, math.floor(spec.corrupt_fraction * len(members)))
                if count:
                    picks = self._rng.choice(len(members), size=count, replace=False)
                    chosen |= {members[int(index)] for index in sorted(picks)}
        self.corrupt.clear()
        self.corrupt |= chosen
        if chosen:
            logger.info("adversary controls %s validators", len(chosen))
        return set(chosen)

    def cap(self, groups: Mapping[int, Sequence[int]]) -> None:
        """Release corrupt nodes beyond f after groups were redrawn, highest ids first."""
        for members in groups.values():
            f = (len(members) - 1) // 3
            inside = sorted(node for node in members if node in self.corrupt)
            for node in inside[f:]:
                self.corrupt.discard(node)

    def is_corrupt(self, node_id: int) -> bool:
        return node_id in self.corrupt

    def slowed(self, node_id: int) -> bool:
        return node_id in self.corrupt and self.spec.has(Behavior.DELAY_MAX)

    def crashed_leaders(self, members: Sequence[int]) -> Set[int]:
        """The view-0 leader of a group when leader crashes are on."""
        if self.spec.has(Behavior.LEADER_CRASH) and members:
            return {members[0]}
        return set()

    def colluding(self, shard_id: int) -> bool:
        return shard_id in self.spec.colluding_shards and self.spec.has(Behavior.COLLUSION_APPROVE)

    def commit_crash_point(self) -> Optional[int]:
        """Output legs to apply before an injected crash, or None."""
        if self.spec.has(Behavior.COMMIT_CRASH) and self._rng.random() < self.spec.fault_rate:
            return 1
        return None

    # Hookpoints

    def inject(self, hook: Hookpoint, **context):
        return self._handlers[Hookpoint(hook)](**context)

    def _on_leader_turn(self, group_id: str, node_id: int, message: ConsensusMessage, members: Sequence[int]) -> Routed:
        return self._route(group_id, node_id, message, members)

    def _on_vote(self, **context):
        if "challenge_id" in context:
            return Verdict.VALID if self.colluding(context["shard_id"]) else None
        return self._route(**context)

    def _route(self, group_id: str, node_id: int, message: ConsensusMessage, members: Sequence[int]) -> Routed:
        others = [node for node in members if node != node_id]
        if message.recipient is not None:
            others = [message.recipient]
        if self.spec.has(Behavior.WITHHOLD):
            return []
        if not self.spec.has(Behavior.EQUIVOCATE) or message.recipient is not None or message.kind not in (
            MessageKind.PRE_PREPARE, MessageKind.PREPARE, MessageKind.COMMIT,
        ):
            return [(node, message) for node in others]

        twin = self._forge(group_id, node_id, message)
        routed: Routed = []
        for index, node in enumerate(others):
            routed.append((node, message if index % 2 == 0 else twin))
            if message.kind is not MessageKind.PRE_PREPARE:
                routed.append((node, twin if index % 2 == 0 else message))
        return routed

    def _forge(self, group_id: str, node_id: int, message: ConsensusMessage) -> ConsensusMessage:
        value = twin_value(message.value_digest)
        signer = self.context.signer(group_id, node_id)
        auth = signer.sign(signing_digest(group_id, message.kind, message.view, message.seq, value, node_id))
        return message.model_copy(update={"value_digest": value, "auth": auth})

    def _on_partial_sign(self, shard_id: int) -> Optional[Signer]:
        spec = self.spec
        if shard_id not in spec.faulty_shards or self._rng.random() >= spec.fault_rate:
            return None
        if spec.has(Behavior.WITHHOLD):
            return lambda digest: None
        if spec.has(Behavior.FORGE_PARTIAL):
            forged = bytes(self._rng.bytes(DIGEST_SIZE))
            return lambda digest: PartialSignature(signer_id=shard_id, message_digest=digest, sig=forged)
        return None

    def _on_tx_submit(self, tx: Transaction, cross: bool) -> List[Transaction]:
        """A conflicting twin spending the same sender nonce."""
        spec = self.spec
        if not (spec.has(Behavior.DOUBLE_SPEND_INJECT) and cross and len(tx.inputs) == 1):
            return []
        if self._rng.random() >= spec.double_spend_rate:
            return []
        sender, receiver = tx.inputs[0], tx.outputs[0]
        amount = sender.amount - 1 if sender.amount > 1 else sender.amount + 1
        twin = Transaction(
            inputs=(Leg(shard_id=sender.shard_id, account=sender.account, amount=amount),),
            outputs=(Leg(shard_id=receiver.shard_id, account=receiver.account, amount=amount),),
            nonce=tx.nonce,
            created_at=tx.created_at,
        )
        self.injected.append(twin)
        return [twin]
