"""
Discrete-event engine for one run.

Shards cut blocks of queued work items on a fixed cadence and agree on them
through their consensus group; a block executes when the group decides.
In adaptive mode cross-shard transactions are escrowed and signed by their
input shards, ordered in batches by the global committee and committed;
load gauges drive splits and merges behind a reconfiguration barrier; state
roots are gossiped and committed replays are disputed. Baseline mode runs
static shards with lock-based two-phase commit.

Everything stochastic draws from generators derived from the run seed, so a
(config, workload, adversary, until) tuple always yields the same trace.
"""

import logging
from collections import Counter, defaultdict, deque
from dataclasses import dataclass, field
from typing import Deque, Dict, List, NamedTuple, Optional, Set, Tuple, Union

from src.features.crossshard.domain import (
    CommitCrash,
    CrossPhase,
    CrossShardError,
    CrossTxRecord,
    OrderedBatch,
)
from src.features.crossshard.services import CrossShardLedger, TwoPhaseCoordinator, sample_committee
from src.features.ledger.domain import (
    CrossShard,
    Digest,
    DomainTag,
    InsufficientBalance,
    IntraShard,
    NonceGap,
    NonceReplay,
    ShardMap,
    ShardState,
    Transaction,
    enc_list,
    enc_u64,
    hash_digest,
)
from src.features.ledger.services import classify
from src.features.sharding.constants import ACCESS_KINDS
from src.features.sharding.domain import (
    ActionKind,
    EpochCounters,
    EvaluationMode,
    LoadGauge,
    MgmtAction,
    RedistributionScope,
    Shard,
    ShardStatus,
)
from src.features.sharding.services import decide, merge, redistribute, snapshot, split
from src.features.simulation.constants import COMMITTEE_GROUP, RECOVERY_DELAY_US
from src.features.simulation.domain import (
    AdversarySpec,
    ConfigError,
    ConsensusFidelity,
    Hookpoint,
    RunSummary,
    SimConfig,
    SimulationError,
    TraceKind,
    WorkItem,
    WorkloadSpec,
)
from src.features.simulation.services.adversary import Adversary
from src.features.simulation.services.groups import (
    GroupDecided,
    GroupDeliver,
    GroupTimer,
    ModeledGroup,
    ReplicaGroup,
)
from src.features.simulation.services.network import Network
from src.features.simulation.services.scheduler import Scheduler
from src.features.simulation.services.trace import Trace
from src.features.simulation.services.workload import WorkloadGenerator
from src.features.statesync.domain import Outcome
from src.features.statesync.services import DisputeManager, GossipMesh, NonceIndex, audit_commit
from src.shared.config import settings
from src.shared.utils import derive_seed, make_rng

logger = logging.getLogger(__name__)

Group = Union[ReplicaGroup, ModeledGroup]

DONE = "done"
DEFER = "defer"

# Access histogram slots
INTRA_DEBIT, INTRA_CREDIT, CROSS_DEBIT, CROSS_CREDIT = range(ACCESS_KINDS)


class Tick(NamedTuple):
    """Engine-internal event payload."""
    kind: str
    shard_id: int = -1
    tx_id: bytes = b""


class Block(NamedTuple):
    shard_id: int
    height: int
    items: Tuple[WorkItem, ...]
    digest: Digest


@dataclass
class WindowCounters:
    processed: int = 0
    busy_us: int = 0
    arrivals: int = 0
    access: List[int] = field(default_factory=lambda: [0] * ACCESS_KINDS)


@dataclass
class PendingReconfig:
    action: MgmtAction
    started: int


def block_digest(shard_id: int, height: int, items) -> Digest:
    return hash_digest(
        DomainTag.BATCH,
        enc_u64(shard_id) + enc_u64(height) + enc_list(items, lambda item: item.kind.encode() + item.tx.tx_id),
    )


def short_id(tx_id: Digest) -> str:
    return tx_id.hex()[:16]


class Engine:
    """One simulated network, from genesis to `until`."""

    def __init__(
        self,
        config: SimConfig,
        workload: WorkloadSpec,
        adversary: Optional[AdversarySpec] = None,
        max_events: Optional[int] = None,
    ):
        if workload.account_count < config.shard_count:
            raise ConfigError(
                f"{workload.account_count} accounts cannot populate {config.shard_count} shards."
            )
        self.config = config
        self.workload = workload
        self.seed = config.seed
        self.max_events = max_events if max_events is not None else settings.simulation.max_events
        self.management = (
            config.management if config.adaptive
            else config.management.model_copy(update={"enabled": False})
        )

        self.scheduler = Scheduler()
        self.trace = Trace()
        self.adversary = Adversary(adversary, derive_seed(self.seed, "adversary"))
        self.network = Network(config.network, derive_seed(self.seed, "network"), slowed=self.adversary.slowed)

        shards, homes = self._genesis()
        self.adversary.corrupt_groups({shard_id: shard.validator_ids for shard_id, shard in shards.items()})
        self.ledger = CrossShardLedger(shards, homes, config.crossshard, seed=derive_seed(self.seed, "ledger"))
        self.two_phase = None if config.adaptive else TwoPhaseCoordinator(self.ledger)
        self.generator = WorkloadGenerator(workload, homes, derive_seed(self.seed, "workload"))
        self.genesis_supply = self.supply()

        self.queues: Dict[int, Deque[WorkItem]] = {shard_id: deque() for shard_id in shards}
        self.inflight: Dict[int, Block] = {}
        self.heights: Dict[int, int] = defaultdict(int)
        self.groups: Dict[int, Group] = {}
        self._by_key: Dict[str, Group] = {}
        self._made: List[Group] = []
        self._key_shard: Dict[str, int] = {}
        for shard in shards.values():
            self._make_shard_group(shard)

        self.committee: Optional[Group] = None
        self._committee_draws = 0
        self._batch: Optional[OrderedBatch] = None
        self._batch_seq = 0
        self._resample_pending = False

        self.window: Dict[int, WindowCounters] = {shard_id: WindowCounters() for shard_id in shards}
        self.epoch_window: Dict[int, WindowCounters] = {shard_id: WindowCounters() for shard_id in shards}
        self.window_start = 0
        self.epoch_start = 0
        self.arrivals: Counter = Counter()
        self.last_arrivals: Counter = Counter()
        self.history: Dict[int, List[LoadGauge]] = defaultdict(list)
        self.evaluations = 0
        self.epoch_no = 0
        self.commits_since_eval = 0
        self.reconfigs: List[PendingReconfig] = []
        self._draining: Set[int] = set()
        self._reconfig_check_at: Optional[int] = None
        self._next_shard_id = config.shard_count

        self.index = NonceIndex()
        self.disputes = DisputeManager(self.ledger, config.sync, self.index)
        self.mesh = GossipMesh(self.ledger.keyring, config.sync, derive_seed(self.seed, "gossip"))
        self.mesh.sync_members(self.ledger.active_ids())
        self._published: Dict[int, int] = {}

        self._queued: Set[Tuple[Digest, int]] = set()
        self._deferrals: Dict[Tuple[str, Digest, int], int] = defaultdict(int)
        self._decide_queued: Set[Digest] = set()
        self._deadlines: Set[Digest] = set()
        self._settled: Set[Digest] = set()
        self._position = 0
        self._exhausted = False

        self.submitted = 0
        self.committed = 0
        self.cross_committed = 0
        self.aborted = 0
        self.rejected = 0
        self.splits = 0
        self.merges = 0
        self.rollbacks = 0
        self.collusion_approvals = 0

    # Setup

    def _genesis(self) -> Tuple[Dict[int, Shard], ShardMap]:
        count = self.config.shard_count
        per_shard = self.config.validators_per_shard
        homes = ShardMap({account: account % count for account in range(self.workload.account_count)})
        shards = {}
        for shard_id in range(count):
            state = ShardState.funded(homes.accounts_of(shard_id), self.workload.initial_balance)
            validators = tuple(range(shard_id * per_shard, (shard_id + 1) * per_shard))
            shards[shard_id] = Shard.create(shard_id, validators, state)
        return shards, homes

    def _new_group(self, key: str, members, crashed=()) -> Group:
        config = self.config
        if config.consensus is ConsensusFidelity.REPLICATED:
            group = ReplicaGroup(
                key, members, self.scheduler, self.network, self.adversary, self._on_decide,
                self.seed, config.view_timeout_us, crashed,
            )
        else:
            group = ModeledGroup(
                key, members, self.scheduler, self.network, self.adversary, self._on_decide,
                config.view_timeout_us, crashed,
            )
        self._by_key[key] = group
        self._made.append(group)
        return group

    def _make_shard_group(self, shard: Shard) -> None:
        key = f"shard-{shard.shard_id}"
        self.groups[shard.shard_id] = self._new_group(key, shard.validator_ids)
        self._key_shard[key] = shard.shard_id

    def _resample_committee(self, now: int) -> None:
        if not self.config.adaptive:
            return
        if self._batch is not None:
            self._resample_pending = True
            return
        groups = {
            shard_id: shard.validator_ids for shard_id, shard in self.ledger.shards.items() if shard.active
        }
        cross = self.config.crossshard
        members = sample_committee(
            groups,
            make_rng(self.seed, "committee", self._committee_draws),
            cross.committee_fraction,
            cross.min_committee,
            corrupt=self.adversary.corrupt,
        )
        if self.committee is not None:
            self._by_key.pop(self.committee.key, None)
        key = f"{COMMITTEE_GROUP}-{self._committee_draws}"
        self._committee_draws += 1
        self.committee = self._new_group(key, members, self.adversary.crashed_leaders(members))

    # Accounting

    def supply(self) -> int:
        """Balances of every live shard plus funds held in escrow."""
        live = sum(shard.state.total() for shard in self.ledger.shards.values() if shard.status is not ShardStatus.RETIRED)
        return live + self.ledger.escrowed_total()

    def _capacity(self, window_us: int) -> int:
        return max(1, self.config.block_capacity * window_us // self.config.block_interval_us)

    def _count_access(self, shard_id: int, slot: int) -> None:
        for window in (self.window, self.epoch_window):
            counters = window.get(shard_id)
            if counters is not None:
                counters.access[slot] += 1

    # Run loop

    def run(self, until: int, stop_when_settled: bool = False) -> RunSummary:
        """
        Process every event that fires strictly before `until`.

        With `stop_when_settled` the loop also ends once the workload is
        exhausted and every submitted transaction reached a final outcome.
        """
        self._bootstrap()
        scheduler = self.scheduler
        while True:
            if stop_when_settled and self._exhausted and len(self._settled) >= self.submitted:
                break
            event = scheduler.pop_until(until)
            if event is None:
                break
            if scheduler.fired > self.max_events:
                raise SimulationError(f"Event budget of {self.max_events} exhausted.", code="EVENT_BUDGET")
            self._dispatch(event.payload, event.fire_at)
        end = scheduler.now if stop_when_settled else until
        summary = self.summary(end)
        self.trace.append(TraceKind.END, end, **summary.model_dump(mode="json", exclude={"trace_digest"}))
        return summary.model_copy(update={"trace_digest": self.trace.digest()})

    def _bootstrap(self) -> None:
        scheduler = self.scheduler
        at = self.generator.first_arrival()
        if at is None:
            self._exhausted = True
        else:
            scheduler.schedule(at, "workload", Tick("arrival"))
        for shard_id in self.ledger.active_ids():
            scheduler.schedule(self.config.block_interval_us, f"shard-{shard_id}", Tick("block", shard_id))
        scheduler.schedule(self.config.epoch_length_us, "controller", Tick("epoch"))
        if self.config.adaptive:
            self._resample_committee(0)
            scheduler.schedule(self.config.crossshard.batch_interval_us, "committee", Tick("batch"))
            scheduler.schedule(self.config.gossip_interval_us, "sync", Tick("gossip"))

    def _dispatch(self, payload, now: int) -> None:
        if isinstance(payload, Tick):
            handler = self._ticks[payload.kind]
            handler(self, payload, now)
            return
        group = self._by_key.get(payload.key)
        if group is None:
            return
        if isinstance(payload, GroupDeliver):
            group.deliver(payload, now)
        elif isinstance(payload, GroupTimer):
            group.fire_timer(payload, now)
        elif isinstance(payload, GroupDecided):
            group.decide(payload, now)

    # Workload

    def _on_arrival(self, tick: Tick, now: int) -> None:
        generator = self.generator
        while True:
            tx = generator.generate_tx(now)
            cross = self._submit(tx, now)
            for extra in self.adversary.inject(Hookpoint.ON_TX_SUBMIT, tx=tx, cross=cross):
                self._submit(extra, now)
            at = generator.next_arrival(now)
            if at is None:
                self._exhausted = True
                return
            if at > now:
                self.scheduler.schedule(at, "workload", Tick("arrival"))
                return

    def _submit(self, tx: Transaction, now: int) -> bool:
        self.submitted += 1
        home = self.ledger.homes[tx.sender]
        self.arrivals[tx.sender] += 1
        for window in (self.window, self.epoch_window):
            if home in window:
                window[home].arrivals += 1
        kind = classify(tx, self.ledger.homes)
        cross = isinstance(kind, CrossShard)
        self.trace.append(TraceKind.SUBMIT, now, tx=short_id(tx.tx_id), cross=cross, shard=home)
        self._route(tx, now, kind)
        return cross

    def _route(self, tx: Transaction, now: int, kind=None) -> None:
        kind = kind or classify(tx, self.ledger.homes)
        if isinstance(kind, IntraShard):
            self.queues[kind.shard_id].append(WorkItem("intra", tx, kind.shard_id))
            return
        if self.config.adaptive:
            self._enqueue_validations(self.ledger.open(tx, now))
            return
        record = self.two_phase.open(tx, now)
        for shard_id in record.participants:
            self.queues[shard_id].append(WorkItem("prepare", tx, shard_id))
        self.scheduler.schedule(record.deadline, "controller", Tick("deadline", tx_id=tx.tx_id))

    def _enqueue_validations(self, record: CrossTxRecord) -> None:
        homes = self.ledger.homes
        targets = sorted({homes[record.tx.inputs[index].account] for index in record.pending_inputs})
        for shard_id in targets:
            key = (record.tx_id, shard_id)
            if key not in self._queued:
                self._queued.add(key)
                self.queues[shard_id].append(WorkItem("validate", record.tx, shard_id))

    # Blocks

    def _on_block_tick(self, tick: Tick, now: int) -> None:
        shard_id = tick.shard_id
        shard = self.ledger.shards.get(shard_id)
        if shard is None or shard.status is ShardStatus.RETIRED:
            return
        self.scheduler.after(self.config.block_interval_us, f"shard-{shard_id}", tick)
        if not shard.active or shard_id in self.inflight:
            return
        queue = self.queues[shard_id]
        if shard_id in self._draining:
            items = self._drain_pick(queue)
        else:
            items = tuple(queue.popleft() for _ in range(min(self.config.block_capacity, len(queue))))
        if not items:
            return
        self.heights[shard_id] += 1
        height = self.heights[shard_id]
        block = Block(shard_id, height, items, block_digest(shard_id, height, items))
        self.inflight[shard_id] = block
        self.groups[shard_id].start(height, block.digest, now)

    def _drain_pick(self, queue: Deque[WorkItem]) -> Tuple[WorkItem, ...]:
        """
        While a shard drains it keeps applying intra-shard work and finishes
        validations of records already holding escrow; validations that would
        take new locks wait for the reconfiguration.
        """
        records = self.ledger.records
        picked, kept = [], deque()
        # senders with a held item; their later nonces would only defer
        held: Set[int] = set()
        for item in queue:
            sender = item.tx.sender
            if len(picked) >= self.config.block_capacity or sender in held:
                kept.append(item)
                continue
            if item.kind == "intra":
                picked.append(item)
                continue
            record = records.get(item.tx.tx_id) if item.kind == "validate" else None
            if record is not None and (record.escrows or record.partials):
                picked.append(item)
            else:
                held.add(sender)
                kept.append(item)
        queue.clear()
        queue.extend(kept)
        return tuple(picked)

    def _on_decide(self, key: str, seq: int, value: Digest, now: int) -> None:
        if self.committee is not None and key == self.committee.key:
            self._on_batch_decided(seq, value, now)
            return
        shard_id = self._key_shard.get(key)
        block = self.inflight.get(shard_id)
        if block is None or block.height != seq:
            return
        # An equivocated twin carries the same items, so either decision executes the block.
        del self.inflight[shard_id]
        self._execute(block, now)
        self.trace.append(TraceKind.BLOCK, now, shard=shard_id, height=seq, items=len(block.items))
        self._after_progress(now)

    def _execute(self, block: Block, now: int) -> None:
        config = self.config
        shard = self.ledger.shards[block.shard_id]
        busy = (config.block_overhead_us + config.tx_cost_us * len(block.items)) * len(shard.validator_ids)
        for window in (self.window, self.epoch_window):
            counters = window.get(block.shard_id)
            if counters is not None:
                counters.processed += len(block.items)
                counters.busy_us += busy

        deferred = []
        for item in block.items:
            if self._process(item, now) == DEFER:
                key = (item.kind, item.tx.tx_id, item.shard_id)
                self._deferrals[key] += 1
                if self._deferrals[key] > config.max_deferrals:
                    self._drop(item, now)
                else:
                    deferred.append(item)
        # Deferred work rejoins at the back so the items it waits on get block slots.
        self.queues[block.shard_id].extend(deferred)

    def _process(self, item: WorkItem, now: int) -> str:
        return self._processors[item.kind](self, item, now)

    def _drop(self, item: WorkItem, now: int) -> None:
        logger.warning("dropping %s item for %s after repeated deferral", item.kind, short_id(item.tx.tx_id))
        record = self.ledger.records.get(item.tx.tx_id)
        if record is not None and record.phase is CrossPhase.VALIDATING and self.config.adaptive:
            self.ledger.refuse(record, "stalled", now)
        self._reject(item.tx, now, "STALLED")

    def _process_intra(self, item: WorkItem, now: int) -> str:
        tx = item.tx
        kind = classify(tx, self.ledger.homes)
        if kind != IntraShard(item.shard_id):
            self._route(tx, now, kind)
            return DONE
        if self.two_phase is not None and self.two_phase.blocked(tx.accounts()):
            return DEFER
        try:
            self.ledger.process_intra(item.shard_id, tx)
        except NonceGap:
            return DEFER
        except (NonceReplay, InsufficientBalance) as error:
            self._reject(tx, now, error.code)
            return DONE
        self._count_access(item.shard_id, INTRA_DEBIT)
        self._committed(tx, now)
        return DONE

    def _process_validate(self, item: WorkItem, now: int) -> str:
        ledger = self.ledger
        tx, shard_id = item.tx, item.shard_id
        self._queued.discard((tx.tx_id, shard_id))
        record = ledger.records.get(tx.tx_id)
        if record is None:
            return DONE
        if not ledger.pending_legs(shard_id, record):
            if record.phase is CrossPhase.VALIDATING:
                self._enqueue_validations(record)
            return DONE

        sign = self.adversary.inject(Hookpoint.ON_PARTIAL_SIGN, shard_id=shard_id)
        try:
            try:
                ledger.validate_input(shard_id, record, now, sign=sign)
            except NonceReplay:
                if not self.adversary.colluding(shard_id):
                    raise
                ledger.validate_input(shard_id, record, now, sign=sign, nonce_check=False)
                self.collusion_approvals += 1
        except NonceGap:
            return DEFER
        except (NonceReplay, InsufficientBalance) as error:
            ledger.refuse(record, error.code, now)
            self._reject(tx, now, error.code)
            return DONE
        except CrossShardError as error:
            if record.phase is CrossPhase.VALIDATING:
                ledger.refuse(record, error.code, now)
                self._reject(tx, now, error.code)
            return DONE

        self._count_access(shard_id, CROSS_DEBIT)
        if record.deadline is not None and record.tx_id not in self._deadlines:
            self._deadlines.add(record.tx_id)
            self.scheduler.schedule(max(record.deadline, now), "controller", Tick("deadline", tx_id=record.tx_id))
        ledger.collect_and_combine(record, now)
        return DONE

    def _process_prepare(self, item: WorkItem, now: int) -> str:
        record = self.ledger.records[item.tx.tx_id]
        try:
            self.two_phase.prepare(item.shard_id, record)
        except NonceGap:
            return DEFER
        self._count_access(item.shard_id, CROSS_DEBIT)
        if self.two_phase.ready(record, now):
            self._queue_decision(record)
        return DONE

    def _queue_decision(self, record: CrossTxRecord) -> None:
        if record.tx_id in self._decide_queued:
            return
        self._decide_queued.add(record.tx_id)
        coordinator = self.two_phase.coordinator(record)
        self.queues[coordinator].append(WorkItem("decide", record.tx, coordinator))

    def _process_decide(self, item: WorkItem, now: int) -> str:
        record = self.ledger.records[item.tx.tx_id]
        commit = self.two_phase.decide(record, now)
        for shard_id in record.participants:
            self.queues[shard_id].append(WorkItem("commit", record.tx, shard_id))
        if not commit:
            self._aborted(record, now)
        return DONE

    def _process_commit(self, item: WorkItem, now: int) -> str:
        record = self.ledger.records[item.tx.tx_id]
        self.two_phase.commit(item.shard_id, record, now)
        if record.phase is CrossPhase.COMMITTED:
            self._committed(record.tx, now, record)
        return DONE

    def _on_deadline(self, tick: Tick, now: int) -> None:
        record = self.ledger.records.get(tick.tx_id)
        if record is None or record.phase is not CrossPhase.VALIDATING:
            return
        if self.two_phase is not None:
            self._queue_decision(record)
            return
        self.ledger.collect_and_combine(record, now)
        if record.phase is CrossPhase.ABORTED:
            self._aborted(record, now)

    # Outcomes

    def _committed(self, tx: Transaction, now: int, record: Optional[CrossTxRecord] = None) -> None:
        if tx.tx_id in self._settled:
            return
        self._settled.add(tx.tx_id)
        self.committed += 1
        self.commits_since_eval += 1
        cross = record is not None
        if cross:
            self.cross_committed += 1
        homes = self.ledger.homes
        for leg in tx.outputs:
            self._count_access(homes[leg.account], CROSS_CREDIT if cross else INTRA_CREDIT)
        self.trace.append(
            TraceKind.COMMIT, now,
            tx=short_id(tx.tx_id), cross=cross, submitted=tx.created_at, latency=now - tx.created_at,
        )
        if cross and self.config.adaptive:
            self._audit(record, now)

    def _aborted(self, record: CrossTxRecord, now: int) -> None:
        if record.tx_id in self._settled:
            return
        self._settled.add(record.tx_id)
        self.aborted += 1
        reason = record.abort_reason.value if record.abort_reason is not None else "aborted"
        self.trace.append(TraceKind.ABORT, now, tx=short_id(record.tx_id), reason=reason)

    def _reject(self, tx: Transaction, now: int, reason: str) -> None:
        if tx.tx_id in self._settled:
            return
        self._settled.add(tx.tx_id)
        self.rejected += 1
        self.trace.append(TraceKind.REJECT, now, tx=short_id(tx.tx_id), reason=reason)

    # Committee

    def _on_batch_tick(self, tick: Tick, now: int) -> None:
        self.scheduler.after(self.config.crossshard.batch_interval_us, "committee", tick)
        self._start_batch(now)

    def _start_batch(self, now: int) -> None:
        if self._batch is not None or self.committee is None:
            return
        pool = self.ledger.collected()
        if not pool:
            return
        batch = self.ledger.build_batch(self._batch_seq, pool, now)
        for record in pool:
            if record.phase is CrossPhase.ABORTED:
                self._reject(record.tx, now, "BAD_AGGREGATE")
        if not batch.entries:
            return
        self._batch = batch
        self._batch_seq += 1
        self.trace.append(TraceKind.BATCH, now, seq=batch.seq, size=len(batch.entries))
        self.committee.start(batch.seq, batch.digest, now)

    def _on_batch_decided(self, seq: int, value: Digest, now: int) -> None:
        batch = self._batch
        if batch is None or batch.seq != seq:
            return
        self._batch = None
        if value != batch.digest:
            logger.info("committee decided a value other than batch %s, records stay collected", seq)
        else:
            self.ledger.mark_ordered(batch, now)
            for tx_id in batch.tx_ids():
                record = self.ledger.records[tx_id]
                try:
                    self.ledger.commit_outputs(record, batch, now, crash_after=self.adversary.commit_crash_point())
                except CommitCrash as crash:
                    self.trace.append(TraceKind.CRASH, now, tx=short_id(tx_id), applied=crash.applied)
                    self.scheduler.after(RECOVERY_DELAY_US, "committee", Tick("recover"))
                    continue
                self._committed(record.tx, now, record)
        if self._resample_pending:
            self._resample_pending = False
            self._resample_committee(now)
        self._after_progress(now)

    def _on_recover(self, tick: Tick, now: int) -> None:
        for record in self.ledger.recover(now):
            self._committed(record.tx, now, record)
        self._after_progress(now)

    # Audit and disputes

    def _audit(self, record: CrossTxRecord, now: int) -> None:
        position = self._position
        self._position += 1
        evidence = audit_commit(self.index, self.ledger, record, position)
        if not evidence:
            return
        honest = [shard_id for shard_id in self.ledger.active_ids() if not self.adversary.colluding(shard_id)]
        if not honest:
            return
        challenge = self.disputes.open_challenge(honest[0], record.tx_id, evidence, self.mesh.round_no)
        self.trace.append(
            TraceKind.CHALLENGE, now,
            challenge=challenge.challenge_id, tx=short_id(record.tx_id), challenger=honest[0],
        )

    def _on_gossip(self, tick: Tick, now: int) -> None:
        self.scheduler.after(self.config.gossip_interval_us, "sync", tick)
        ledger = self.ledger
        for shard_id in ledger.active_ids():
            shard = ledger.shards[shard_id]
            if self._published.get(shard_id) != shard.state.version:
                changed = ledger.take_changed(shard_id, self.config.sync.max_proofs)
                self.mesh.publish(shard, ledger.key_epoch, changed=changed)
                self._published[shard_id] = shard.state.version
        self.mesh.round()
        self._run_disputes(now)

    def _run_disputes(self, now: int) -> None:
        round_no = self.mesh.round_no
        active = set(self.ledger.active_ids())
        for challenge in list(self.disputes.open_challenges()):
            if round_no < challenge.closes_at:
                for shard_id in challenge.eligible:
                    if shard_id in active and shard_id not in challenge.votes:
                        verdict = self.adversary.inject(
                            Hookpoint.ON_VOTE, shard_id=shard_id, challenge_id=challenge.challenge_id,
                        )
                        self.disputes.cast_vote(shard_id, challenge, round_no, verdict)
            if round_no < challenge.closes_at and any(
                shard_id not in challenge.votes for shard_id in challenge.eligible
            ):
                continue
            resolution = self.disputes.resolve(challenge, round_no)
            if resolution.outcome is Outcome.ROLLED_BACK:
                self.rollbacks += 1
            self.trace.append(
                TraceKind.RESOLUTION, now,
                challenge=challenge.challenge_id,
                outcome=resolution.outcome.value,
                invalid=round(resolution.invalid_weight, 6),
                cast=round(resolution.cast_weight, 6),
                slashed=list(resolution.slashed),
            )

    # Management

    def _on_epoch(self, tick: Tick, now: int) -> None:
        self.scheduler.after(self.config.epoch_length_us, "controller", tick)
        self.epoch_no += 1
        window = max(1, now - self.epoch_start)
        capacity = self._capacity(window)
        samples = []
        for shard_id, shard in sorted(self.ledger.shards.items()):
            if shard.status is ShardStatus.RETIRED:
                continue
            counters = self.epoch_window.setdefault(shard_id, WindowCounters())
            validators = len(shard.validator_ids)
            samples.append({
                "id": shard_id,
                "load": round(100.0 * counters.arrivals / capacity, 4),
                "v": round(min(100.0, 100.0 * counters.processed / capacity), 4),
                "u": round(min(100.0, 100.0 * counters.busy_us / (window * validators)), 4),
                "queue": len(self.queues.get(shard_id, ())),
            })
        self.trace.append(TraceKind.EPOCH, now, epoch=self.epoch_no, shards=samples)
        self.epoch_window = {shard_id: WindowCounters() for shard_id in self.queues}
        self.epoch_start = now

        if self.management.enabled and self.management.evaluation is EvaluationMode.EPOCH:
            self._evaluate(now)
        self._resample_committee(now)

    def _after_progress(self, now: int) -> None:
        # a decided block or batch may be what a pending barrier waits on
        if self.reconfigs:
            self._schedule_reconfig_check(now)
        management = self.management
        if (
            management.enabled
            and management.evaluation is EvaluationMode.STRATEGY
            and self.commits_since_eval >= management.commits_between
            # a gauge window shorter than one block reads busy shards as idle
            and now - self.window_start >= self.config.block_interval_us
        ):
            self._evaluate(now)

    def _evaluate(self, now: int) -> None:
        """Gauge every available shard, decide, and start the barrier for each action."""
        management = self.management
        window = max(1, now - self.window_start)
        capacity = self._capacity(window)
        available = {
            shard_id: shard for shard_id, shard in self.ledger.shards.items()
            if shard.active and shard_id not in self._draining
        }
        counters = []
        for shard_id, shard in sorted(available.items()):
            raw = self.window.setdefault(shard_id, WindowCounters())
            counters.append(EpochCounters(
                shard_id=shard_id,
                processed=raw.processed,
                busy_us=raw.busy_us,
                window_us=window,
                capacity=capacity,
                validators=len(shard.validator_ids),
                backlog=len(self.queues[shard_id]),
                access=tuple(raw.access),
            ))
        gauges = snapshot(counters)
        for shard_id, gauge in gauges.items():
            shard = available[shard_id]
            shard.v, shard.u = gauge.v, gauge.u
            history = self.history[shard_id]
            history.append(gauge)
            del history[:-management.merge_epochs]

        actions = decide(gauges, self.history, available, management, self.evaluations)
        self.evaluations += 1
        self.window = {shard_id: WindowCounters() for shard_id in self.queues}
        self.window_start = now
        self.commits_since_eval = 0
        self.last_arrivals = self.arrivals
        self.arrivals = Counter()

        for action in actions:
            self._draining.update(action.shards)
            self.reconfigs.append(PendingReconfig(action, now))
            self.trace.append(
                TraceKind.MGMT, now, action=action.kind.value, shards=list(action.shards), k=action.k,
                evaluation=action.epoch,
            )
        if actions:
            self._schedule_reconfig_check(now + management.reconfig_delay_us)

    def _schedule_reconfig_check(self, at: int) -> None:
        if self._reconfig_check_at is not None and self._reconfig_check_at <= at:
            return
        self._reconfig_check_at = at
        self.scheduler.schedule(at, "controller", Tick("reconfig"))

    def _on_reconfig_check(self, tick: Tick, now: int) -> None:
        if self._reconfig_check_at != now:
            return
        self._reconfig_check_at = None
        waiting = []
        for pending in self.reconfigs:
            action = pending.action
            ready = (
                now >= pending.started + self.management.reconfig_delay_us
                and not any(shard_id in self.inflight for shard_id in action.shards)
                and not self.ledger.touching(action.shards)
            )
            if ready:
                self._apply(action, now)
            else:
                waiting.append(pending)
        self.reconfigs = waiting
        if waiting:
            self._schedule_reconfig_check(now + self.config.block_interval_us)

    def _weights(self) -> Dict[int, float]:
        backlog = Counter(item.tx.sender for queue in self.queues.values() for item in queue)
        return {
            account: float(self.last_arrivals[account] + self.arrivals[account] + backlog[account] + 1)
            for account in range(self.workload.account_count)
        }

    def _take_id(self) -> int:
        shard_id = self._next_shard_id
        self._next_shard_id += 1
        return shard_id

    def _apply(self, action: MgmtAction, now: int) -> None:
        """Carry out one split or merge whose barrier has cleared."""
        ledger = self.ledger
        management = self.management
        weights = self._weights()
        retiring = [ledger.shards[shard_id] for shard_id in action.shards]

        if action.kind is ActionKind.SPLIT:
            child_ids = [self._take_id() for _ in range(action.k)]
            created = split(
                retiring[0], action.k, weights=weights, child_ids=child_ids,
                epoch=self.evaluations, cooldown_epochs=management.cooldown_epochs,
            )
            self.splits += 1
        else:
            created = [merge(retiring, self._take_id(), epoch=self.evaluations, cooldown_epochs=management.cooldown_epochs)]
            self.merges += 1

        for shard in created:
            ledger.shards[shard.shard_id] = shard
            self.queues[shard.shard_id] = deque()
            self.window[shard.shard_id] = WindowCounters()
            self.epoch_window[shard.shard_id] = WindowCounters()
            for account in shard.accounts:
                ledger.homes.assign(account, shard.shard_id)
        self.adversary.cap({shard_id: ledger.shards[shard_id].validator_ids for shard_id in ledger.active_ids()})
        for shard in created:
            self._make_shard_group(shard)
            self.scheduler.after(
                self.config.block_interval_us, f"shard-{shard.shard_id}", Tick("block", shard.shard_id),
            )
        for shard in retiring:
            group = self.groups.pop(shard.shard_id)
            group.abandon()
            self._by_key.pop(group.key, None)
            self.history.pop(shard.shard_id, None)
            self._draining.discard(shard.shard_id)

        if management.redistribute is RedistributionScope.GLOBAL:
            targets = [ledger.shards[shard_id] for shard_id in ledger.active_ids() if shard_id not in self._draining]
        else:
            targets = created
        moved = redistribute(targets, weights)
        for account, shard_id in moved.items():
            ledger.homes.assign(account, shard_id)
            ledger.changed[shard_id].add(account)
        for shard in retiring:
            ledger.changed.pop(shard.shard_id, None)

        sources = sorted({shard.shard_id for shard in retiring} | {shard.shard_id for shard in targets})
        drained: List[WorkItem] = []
        for shard_id in sources:
            drained.extend(self.queues[shard_id])
            self.queues[shard_id].clear()
        for shard in retiring:
            del self.queues[shard.shard_id]
            self.window.pop(shard.shard_id, None)
            self.epoch_window.pop(shard.shard_id, None)
        for item in drained:
            self._reroute(item, now)

        ledger.rekey(ledger.key_epoch + 1)
        ledger.refresh_view()
        self.mesh.sync_members(ledger.active_ids())
        self.generator.rehome(ledger.homes)
        self.trace.append(
            TraceKind.RECONFIG, now,
            action=action.kind.value,
            retired=[shard.shard_id for shard in retiring],
            created=[shard.shard_id for shard in created],
            moved=len(moved),
            migrated=len(drained),
        )
        logger.info(
            "%s %s -> %s at %sus, %s accounts moved",
            action.kind.value, [shard.shard_id for shard in retiring], [shard.shard_id for shard in created], now, len(moved),
        )
        self._resample_committee(now)

    def _reroute(self, item: WorkItem, now: int) -> None:
        """Queue a migrated work item at the shard that now owns it."""
        if item.kind == "intra":
            self._route(item.tx, now)
            return
        self._queued.discard((item.tx.tx_id, item.shard_id))
        record = self.ledger.records.get(item.tx.tx_id)
        if record is not None:
            self._enqueue_validations(record)

    # Results

    def view_changes(self) -> int:
        return sum(group.view_changes for group in self._made)

    def standing_double_spends(self) -> int:
        """Committed replays that were never rolled back."""
        return sum(
            1 for record in self.ledger.committed()
            if self.index.is_replay(record.tx_id) and record.tx_id not in self.ledger.rolled_back
        )

    def summary(self, until: int) -> RunSummary:
        return RunSummary(
            mode=self.config.mode,
            until_us=until,
            events=self.scheduler.fired,
            submitted=self.submitted,
            committed=self.committed,
            aborted=self.aborted,
            rejected=self.rejected,
            cross_committed=self.cross_committed,
            final_shards=len(self.ledger.active_ids()),
            splits=self.splits,
            merges=self.merges,
            challenges=len(self.disputes.challenges),
            rollbacks=self.rollbacks,
            double_spends_committed=self.standing_double_spends(),
            view_changes=self.view_changes(),
        )

    _ticks = {
        "arrival": _on_arrival,
        "block": _on_block_tick,
        "deadline": _on_deadline,
        "batch": _on_batch_tick,
        "recover": _on_recover,
        "gossip": _on_gossip,
        "epoch": _on_epoch,
        "reconfig": _on_reconfig_check,
    }

    _processors = {
        "intra": _process_intra,
        "validate": _process_validate,
        "prepare": _process_prepare,
        "decide": _process_decide,
        "commit": _process_commit,
    }


class RunResult(NamedTuple):
    summary: RunSummary
    trace: Trace
    engine: Engine


def run(
    config: SimConfig,
    workload: WorkloadSpec,
    adversary: Optional[AdversarySpec] = None,
    until: Optional[int] = None,
    stop_when_settled: bool = False,
) -> RunResult:
    """
    Simulate one configuration.

    Args:
        config: Protocol and network parameters
        workload: Transaction stream
        adversary: Byzantine behaviour, honest when omitted
        until: End of sim-time; defaults to the workload duration plus one lock timeout
        stop_when_settled: End early once every submitted transaction is final

    Returns:
        Summary counters, the trace and the engine for inspection
    """
    if until is None:
        until = workload.duration_us + config.crossshard.lock_timeout_us
    engine = Engine(config, workload, adversary)
    summary = engine.run(until, stop_when_settled=stop_when_settled)
    logger.info(
        "%s run: %s submitted, %s committed, %s aborted, %s rejected, %s shards",
        config.mode.value, summary.submitted, summary.committed, summary.aborted, summary.rejected,
        summary.final_shards,
    )
    return RunResult(summary, engine.trace, engine)
