"""
Constants for the experiments feature.

Sweeps are sized for a laptop: 8 to 16 shards, 4 to 8 validators per shard
and batches of 10k to 20k transactions.
"""

from src.features.sharding.domain import ManagementStrategy
from src.features.simulation.domain import Behavior

# Strategy sweep of the latency scenario, lightest management first
STRATEGY_SWEEP = (
    ManagementStrategy.NONE,
    ManagementStrategy.LIGHT,
    ManagementStrategy.MODERATE,
    ManagementStrategy.AGGRESSIVE,
    ManagementStrategy.VERY,
    ManagementStrategy.ULTRA,
)

# Cross-shard ratios of the throughput scenario
CROSS_RATIO_SWEEP = (0.0, 0.4, 0.8)

# Offered load of the load scenario, transactions per sim-second
LOAD_RATES = {"low": 500.0, "medium": 1_500.0, "high": 3_000.0}

# Faults of the atomicity matrix
FAULT_MATRIX = (
    Behavior.WITHHOLD,
    Behavior.FORGE_PARTIAL,
    Behavior.LEADER_CRASH,
    Behavior.COMMIT_CRASH,
)

# Share of corrupt validators in the security scenario
SECURITY_CORRUPT_FRACTION = 0.1

# Epochs a managed run gets before its utilization counts as settled
SETTLE_EPOCHS = 3

# Batch runs stop once settled; this only bounds a run that never settles
BATCH_HORIZON_US = 3_600_000_000

DEFAULT_SEED_COUNT = 3

US_PER_SECOND = 1_000_000

# Metrics aggregated per variant, in summary column order
AGGREGATED_METRICS = (
    "tps",
    "latency_mean_s",
    "latency_p95_s",
    "batch_latency_s",
    "util_before",
    "util_distance",
    "efficiency",
    "double_spend_success",
    "collusion_detection",
    "penalty_effectiveness",
    "unsettled",
)

# Column order of the records file
RECORD_FIELDS = (
    "scenario",
    "variant",
    "mode",
    "seed",
    "window_start_us",
    "window_end_us",
    "submitted",
    "committed",
    "aborted",
    "rejected",
    "cross_committed",
    "tps",
    "latency_mean_s",
    "latency_p50_s",
    "latency_p95_s",
    "batch_latency_s",
    "util_before",
    "util_distance",
    "efficiency",
    "final_shards",
    "splits",
    "merges",
    "view_changes",
    "double_spend_attempts",
    "double_spend_success",
    "challenges",
    "rollbacks",
    "collusion_detection",
    "penalty_effectiveness",
    "unsettled",
    "conserved",
    "shard_v",
    "shard_u",
    "trace_digest",
)

# Share of a run's progress reported per finished job
PROGRESS_START = 0.05
PROGRESS_RANGE = 0.9
