"""
Reversal of a committed cross-shard transaction.
"""

import logging

from src.features.crossshard.domain import CrossPhase
from src.features.crossshard.services import CrossShardLedger
from src.features.ledger.domain import Digest, SignedLeg
from src.features.ledger.services import apply
from src.features.statesync.domain import RollbackReport, UnknownTx

logger = logging.getLogger(__name__)


def rollback(ledger: CrossShardLedger, tx_id: Digest) -> RollbackReport:
    """
    Debit every output leg and credit the inputs with what was recovered.

    Output accounts are resolved at their current homes. A debit is clamped
    to the account's balance; the unrecoverable remainder is reported as the
    shortfall and inputs are refunded in leg order up to the recovered total.
    Nonces stay consumed. A tombstone makes a second rollback raise UnknownTx.
    """
    record = ledger.records.get(tx_id)
    if record is None or record.phase is not CrossPhase.COMMITTED or tx_id in ledger.rolled_back:
        raise UnknownTx(tx_id)

    touched = set()
    recovered = 0
    for leg in record.tx.outputs:
        shard = ledger.home_shard(leg.account)
        take = min(leg.amount, shard.state.balance_of(leg.account))
        if take:
            ledger.write(shard, apply(shard.state, SignedLeg(leg.account, -take), nonce_check=False), [leg.account])
            touched.add(shard.shard_id)
        recovered += take

    remaining = recovered
    for leg in record.tx.inputs:
        give = min(leg.amount, remaining)
        if give:
            ledger.credit(leg.account, give)
            touched.add(ledger.homes[leg.account])
            remaining -= give

    ledger.rolled_back.add(tx_id)
    shortfall = record.tx.value - recovered
    if shortfall:
        logger.info("rollback of %s short by %s", tx_id.hex()[:12], shortfall)
    return RollbackReport(tx_id=tx_id, recovered=recovered, shortfall=shortfall, shards=tuple(sorted(touched)))
