"""
Push gossip of signed shard roots.

Each round every shard pushes all messages it holds to a seeded random set
of peers. A receiver adopts a message only when its version is newer than the
one it holds, the origin's partial signature verifies under the key epoch it
names, and every attached proof folds to the announced root.
"""

import logging
import math
from typing import Callable, Dict, Iterable, Mapping, Optional

from src.features.crossshard.domain import GlobalStateView
from src.features.ledger.domain import Digest
from src.features.merkle.services import prove_account, verify
from src.features.sharding.domain import Shard
from src.features.statesync.domain import (
    BadProof,
    GossipMsg,
    GossipNode,
    GossipReport,
    StaleVersion,
    SyncConfig,
)
from src.features.threshold.domain import PartialSignature
from src.features.threshold.services import ShareRegistry
from src.shared.utils import make_rng

logger = logging.getLogger(__name__)

Signer = Callable[[Digest], Optional[PartialSignature]]


def default_fanout(shard_count: int) -> int:
    """ceil(log2 n) + 1 peers, never more than the other shards."""
    if shard_count < 2:
        return 0
    return min(shard_count - 1, math.ceil(math.log2(shard_count)) + 1)


def make_message(
    shard: Shard,
    registry: ShareRegistry,
    key_epoch: int,
    changed: Iterable[int] = (),
    sign: Optional[Signer] = None,
) -> GossipMsg:
    """Announce the shard's current root with proofs for the changed accounts."""
    accounts = sorted(account for account in set(changed) if account in shard.state.balances)
    unsigned = GossipMsg(
        origin_shard=shard.shard_id,
        root=shard.root,
        version=shard.state.version,
        key_epoch=key_epoch,
        proofs=tuple(prove_account(shard.tree, account) for account in accounts),
    )
    if sign is None:
        sign = registry.view_for(shard.shard_id).sign
    return unsigned.model_copy(update={"signature": sign(unsigned.digest)})


def check_message(keyring: Mapping[int, ShareRegistry], message: GossipMsg) -> None:
    """Raise BadProof unless the signature and every proof verify."""
    origin = message.origin_shard
    signature = message.signature
    if signature is None:
        raise BadProof(origin, "unsigned")
    if signature.signer_id != origin or signature.message_digest != message.digest:
        raise BadProof(origin, "signature does not cover this message")
    registry = keyring.get(message.key_epoch)
    if registry is None or not registry.verify_partial(signature):
        raise BadProof(origin, "signature does not verify")
    for proof in message.proofs:
        if not verify(message.root, proof):
            raise BadProof(origin, "proof does not fold to the announced root")


def receive(node: GossipNode, message: GossipMsg, keyring: Mapping[int, ShareRegistry]) -> None:
    """Adopt a newer, verified message; raises StaleVersion or BadProof otherwise."""
    held = node.known_version(message.origin_shard)
    if message.version <= held:
        raise StaleVersion(message.origin_shard, message.version, held)
    try:
        check_message(keyring, message)
    except BadProof:
        node.rejected.append(message)
        raise
    node.latest[message.origin_shard] = message
    node.view.observe(message.origin_shard, message.root, message.version)


def gossip_round(
    nodes: Mapping[int, GossipNode],
    keyring: Mapping[int, ShareRegistry],
    rng,
    round_no: int = 0,
    fanout: Optional[int] = None,
) -> GossipReport:
    """
    One push round over all nodes.

    Messages sent in a round are the ones each node held when the round
    started, so news travels at most one hop per round.
    """
    ids = sorted(nodes)
    fanout = default_fanout(len(ids)) if fanout is None else min(fanout, max(0, len(ids) - 1))
    outgoing = {
        shard_id: [nodes[shard_id].latest[origin] for origin in sorted(nodes[shard_id].latest)]
        for shard_id in ids
    }
    report = GossipReport(round_no=round_no)
    for shard_id in ids:
        peers = [peer for peer in ids if peer != shard_id]
        if not peers or not fanout or not outgoing[shard_id]:
            continue
        chosen = rng.choice(len(peers), size=fanout, replace=False)
        for index in sorted(int(i) for i in chosen):
            target = nodes[peers[index]]
            for message in outgoing[shard_id]:
                try:
                    receive(target, message, keyring)
                    report.adopted += 1
                except StaleVersion:
                    report.stale += 1
                except BadProof as error:
                    report.rejected += 1
                    logger.debug("shard %s rejected gossip: %s", target.shard_id, error.message)
    return report


class GossipMesh:
    """Gossip nodes for the active shards plus the round counter that dates disputes."""

    def __init__(self, keyring: Mapping[int, ShareRegistry], config: Optional[SyncConfig] = None, seed: int = 0):
        self.keyring = keyring
        self.config = config or SyncConfig()
        self.nodes: Dict[int, GossipNode] = {}
        self.round_no = 0
        self._rng = make_rng(seed, "gossip")

    def sync_members(self, active: Iterable[int]) -> None:
        """Add nodes for new shards and forget retired ones."""
        active = set(active)
        for shard_id in sorted(active - set(self.nodes)):
            self.nodes[shard_id] = GossipNode(shard_id=shard_id)
        for shard_id in sorted(set(self.nodes) - active):
            del self.nodes[shard_id]
        for node in self.nodes.values():
            for origin in [origin for origin in node.latest if origin not in active]:
                del node.latest[origin]
            node.view.retain(active)

    def publish(
        self,
        shard: Shard,
        key_epoch: int,
        changed: Iterable[int] = (),
        sign: Optional[Signer] = None,
    ) -> GossipMsg:
        """Record the shard's own announcement at its node; peers learn it by gossip."""
        message = make_message(shard, self.keyring[key_epoch], key_epoch, changed, sign)
        node = self.nodes.setdefault(shard.shard_id, GossipNode(shard_id=shard.shard_id))
        if message.version > node.known_version(shard.shard_id):
            node.latest[shard.shard_id] = message
            node.view.observe(shard.shard_id, message.root, message.version)
        return message

    def round(self) -> GossipReport:
        self.round_no += 1
        return gossip_round(self.nodes, self.keyring, self._rng, self.round_no, self.config.gossip_fanout)

    def views(self) -> Dict[int, GlobalStateView]:
        return {shard_id: node.view for shard_id, node in self.nodes.items()}

    def converged(self, roots: Mapping[int, Digest], among: Optional[Iterable[int]] = None) -> bool:
        """Whether every node in `among` (default all) holds exactly `roots`."""
        members = self.nodes if among is None else {shard_id: self.nodes[shard_id] for shard_id in among}
        return all(node.view.roots == dict(roots) for node in members.values())
