"""
Constants for the threshold feature.
"""

# Bytes in a simulated secret share
SHARE_SIZE = 32

# Fraction of input shards that must sign under the two-thirds policy
TWO_THIRDS = 2 / 3
