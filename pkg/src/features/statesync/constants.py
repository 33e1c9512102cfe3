"""
Constants for the state-sync and dispute feature.
"""

# Gossip rounds a challenge stays open for votes; must exceed gossip convergence
DEFAULT_DISPUTE_WINDOW_ROUNDS = 10

# Share of stake removed from a shard that approved an invalid transaction
DEFAULT_SLASH_FRACTION = 0.95

# Reputation multiplier applied on every upheld offense
DEFAULT_REPUTATION_DECAY = 0.5

# Gossip interval in microseconds of sim-time
DEFAULT_GOSSIP_INTERVAL_US = 100_000

# Merkle proofs attached to one root announcement; further changes ride on later ones
DEFAULT_MAX_PROOFS = 16
