"""
Constants for the consensus feature.
"""

# Four times the mean one-way latency of the default network model (10 ms)
DEFAULT_VIEW_TIMEOUT_US = 40_000

# Upper bound for the exponentially backed-off view timer
MAX_VIEW_TIMEOUT_US = 10_000_000

# value_digest carried by a ViewChange with no prepared certificate
NO_VALUE = bytes(32)
