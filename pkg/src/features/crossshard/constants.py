"""
Constants for the cross-shard feature.
"""

# Cross-shard records ordered per committee consensus instance
DEFAULT_BATCH_SIZE = 64

# How long escrowed inputs may stay locked before the record aborts (sim-time)
DEFAULT_LOCK_TIMEOUT_US = 2_000_000

# Period at which the committee cuts a batch of collected records
DEFAULT_BATCH_INTERVAL_US = 50_000

# Committee size: max(MIN_COMMITTEE, ceil(fraction * total validators))
DEFAULT_COMMITTEE_FRACTION = 0.1
MIN_COMMITTEE = 4

# Group id prefix of the per-epoch shard signing keys
SHARD_KEY_GROUP = "shards"
