"""
Approximation factors of transaction scheduling per shard graph topology.

Each expression is evaluated with constant 1 and base-2 logarithms.
Parameters: k accounts per transaction, d shard graph diameter, s number of
shards, D longest distance a transaction spans, g grid dimension.
"""

import math
from typing import Callable, Dict, Tuple

from src.features.experiments.domain import BadParam, Method, Topology

Factor = Callable[[float, float, float, float], float]

_FACTORS: Dict[Tuple[Topology, Method], Factor] = {
    (Topology.GENERAL, Method.ADAPTIVE): lambda k, d, s, D: k * d * math.log2(D),
    (Topology.GENERAL, Method.BASELINE): lambda k, d, s, D: k * d,
    (Topology.HYPERCUBE_BUTTERFLY_GRID, Method.ADAPTIVE): lambda k, d, s, D: k * math.log2(s) ** 2,
    (Topology.HYPERCUBE_BUTTERFLY_GRID, Method.BASELINE): lambda k, d, s, D: k * math.log2(s),
    (Topology.GENERAL_RANDOM_K, Method.ADAPTIVE): (
        lambda k, d, s, D: k * math.log2(D) * (k + math.log2(s)) * math.log2(s)
    ),
    (Topology.GENERAL_RANDOM_K, Method.BASELINE): lambda k, d, s, D: k * math.log2(D) * (k + math.log2(s)),
    (Topology.LINE, Method.ADAPTIVE): lambda k, d, s, D: k * math.sqrt(d) * math.log2(D) * math.log2(s) ** 2,
    (Topology.LINE, Method.BASELINE): lambda k, d, s, D: k * math.sqrt(d) * math.log2(D),
}


def approx_factor(
    topology: Topology,
    method: Method,
    k: float,
    d: float = 1,
    s: float = 1,
    D: float = 1,
    g: float = 1,
) -> float:
    """
    Evaluate the approximation factor of `method` on `topology`.

    `g` names the grid dimension of the hypercube family; the factor itself
    does not depend on it, but it is still range-checked.

    Raises:
        BadParam: Any parameter below 1
    """
    for name, value in (("k", k), ("d", d), ("s", s), ("D", D), ("g", g)):
        if value < 1:
            raise BadParam(name, value)
    factor = _FACTORS[(Topology(topology), Method(method))]
    return float(factor(k, d, s, D))
