"""
Enumerations for the simulation feature.
"""

from enum import Enum


class RunMode(str, Enum):
    """Protocol stack under test."""
    ADAPTIVE = "adaptive"
    BASELINE = "baseline"


class ConsensusFidelity(str, Enum):
    """
    How block and batch agreement is simulated.

    REPLICATED: every replica message is a network event.
    MODELED: one decision event per instance after sampled latency.
    """
    REPLICATED = "replicated"
    MODELED = "modeled"


class ArrivalPattern(str, Enum):
    POISSON = "poisson"
    BURST = "burst"


class Behavior(str, Enum):
    """Adversarial behaviours a corrupt node or shard may execute."""
    EQUIVOCATE = "equivocate"
    WITHHOLD = "withhold"
    DELAY_MAX = "delay_max"
    FORGE_PARTIAL = "forge_partial"
    DOUBLE_SPEND_INJECT = "double_spend_inject"
    COLLUSION_APPROVE = "collusion_approve"
    LEADER_CRASH = "leader_crash"
    COMMIT_CRASH = "commit_crash"


class Hookpoint(str, Enum):
    """Points where the engine hands control to the adversary."""
    ON_LEADER_TURN = "on_leader_turn"
    ON_PARTIAL_SIGN = "on_partial_sign"
    ON_VOTE = "on_vote"
    ON_TX_SUBMIT = "on_tx_submit"


class TraceKind(str, Enum):
    """Record types written to the trace."""
    SUBMIT = "submit"
    COMMIT = "commit"
    ABORT = "abort"
    REJECT = "reject"
    BLOCK = "block"
    BATCH = "batch"
    VIEW_CHANGE = "view_change"
    EPOCH = "epoch"
    MGMT = "mgmt"
    RECONFIG = "reconfig"
    CHALLENGE = "challenge"
    RESOLUTION = "resolution"
    CRASH = "crash"
    END = "end"
