"""
Constants for the sharding feature.

Defaults sit inside the ranges the management rule is designed for:
split between 60 and 90 percent, merge between 20 and 40 percent.
"""

DEFAULT_SPLIT_THRESHOLD = 80.0
DEFAULT_MERGE_THRESHOLD = 30.0
DEFAULT_MERGE_EPOCHS = 3
DEFAULT_COOLDOWN_EPOCHS = 2
DEFAULT_SPLIT_FANOUT = 2
DEFAULT_MERGE_FANOUT = 2

# Minimum cosine similarity of access histograms for shards to merge
DEFAULT_SIMILARITY = 0.5

# Smallest replica group that tolerates one Byzantine validator
MIN_VALIDATORS = 4

# Epoch length in microseconds of sim-time
DEFAULT_EPOCH_US = 1_000_000

# Work items a shard can finish per epoch
DEFAULT_SHARD_CAPACITY = 1000

# Access-kind histogram layout: intra debit, intra credit, cross debit, cross credit
ACCESS_KINDS = 4

# (commits between evaluations, max shards adjusted per evaluation)
STRATEGY_PARAMETERS = {
    "none": None,
    "light": (1500, 30),
    "moderate": (1000, 20),
    "aggressive": (500, 10),
    "very": (250, 5),
    "ultra": (100, 2),
}
