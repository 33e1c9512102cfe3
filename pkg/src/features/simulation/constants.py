"""
Constants for the simulation feature.

All times are integer microseconds of sim-time.
"""

# Network model
DEFAULT_BASE_LATENCY_US = 10_000
DEFAULT_JITTER_US = 5_000
DEFAULT_DELTA_US = 50_000

# Pre-GST delay multiplier applied to messages of DelayMax nodes
DELAY_MAX_FACTOR = 4

# Block production and cost model
DEFAULT_BLOCK_INTERVAL_US = 100_000
DEFAULT_BLOCK_CAPACITY = 50
DEFAULT_TX_COST_US = 1_500
DEFAULT_BLOCK_OVERHEAD_US = 10_000

# Shard layout
DEFAULT_SHARD_COUNT = 8
DEFAULT_VALIDATORS_PER_SHARD = 8
DEFAULT_INITIAL_BALANCE = 1_000_000_000

# Workload
DEFAULT_RATE = 1_000.0
DEFAULT_ACCOUNT_COUNT = 2_000
DEFAULT_ZIPF_EXPONENT = 1.0
DEFAULT_DURATION_US = 10_000_000
DEFAULT_AMOUNT_MIN = 1
DEFAULT_AMOUNT_MAX = 100

# Times a work item may be pushed back for an out-of-order nonce before it is dropped
DEFAULT_MAX_DEFERRALS = 1_000

# Delay before a crashed commit is replayed from its decision
RECOVERY_DELAY_US = 20_000

# Committee group id used in consensus signatures
COMMITTEE_GROUP = "committee"
