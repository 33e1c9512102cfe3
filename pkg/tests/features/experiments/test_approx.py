"""
Property-based test for the approximation factor calculator.

**Feature: adaptive-shard-simulator, Property 20: Approximation Factors**
"""

import math

import pytest
from hypothesis import given, strategies as st, settings

import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent.parent.parent.parent))

from src.features.experiments.domain import BadParam, Method, Topology
from src.features.experiments.services import approx_factor


@pytest.mark.parametrize(
    "topology, method, params, expected",
    [
        (Topology.GENERAL, Method.ADAPTIVE, dict(k=2, d=3, D=8), 18),
        (Topology.GENERAL, Method.BASELINE, dict(k=2, d=3), 6),
        (Topology.GENERAL, Method.ADAPTIVE, dict(k=2, d=3, D=1), 0),
        (Topology.HYPERCUBE_BUTTERFLY_GRID, Method.ADAPTIVE, dict(k=3, s=16, g=2), 48),
        (Topology.HYPERCUBE_BUTTERFLY_GRID, Method.BASELINE, dict(k=3, s=16), 12),
        (Topology.GENERAL_RANDOM_K, Method.ADAPTIVE, dict(k=2, s=4, D=4), 32),
        (Topology.GENERAL_RANDOM_K, Method.BASELINE, dict(k=2, s=4, D=4), 16),
        (Topology.LINE, Method.ADAPTIVE, dict(k=1, d=4, s=4, D=4), 16),
        (Topology.LINE, Method.BASELINE, dict(k=1, d=4, D=4), 4),
    ],
)
def test_hand_evaluated_factors(topology, method, params, expected):
    assert approx_factor(topology, method, **params) == pytest.approx(expected)


def test_string_names_are_accepted():
    assert approx_factor("general", "adaptive", k=2, d=3, D=8) == pytest.approx(18)


@pytest.mark.parametrize("name", ["k", "d", "s", "D", "g"])
def test_parameters_below_one_are_rejected(name):
    params = dict(k=2, d=2, s=2, D=2, g=1)
    params[name] = 0.5
    with pytest.raises(BadParam) as raised:
        approx_factor(Topology.GENERAL, Method.ADAPTIVE, **params)
    assert raised.value.code == "BAD_PARAM"
    assert name in raised.value.message


@given(
    topology=st.sampled_from(list(Topology)),
    k=st.integers(min_value=1, max_value=64),
    d=st.integers(min_value=1, max_value=64),
    s=st.integers(min_value=2, max_value=1024),
    D=st.integers(min_value=2, max_value=64),
)
@settings(max_examples=200, deadline=None)
def test_property_adaptive_factor_never_below_baseline(topology, k, d, s, D):
    """Property 20: with s, D >= 2 the adaptive factor only adds log terms >= 1."""
    adaptive = approx_factor(topology, Method.ADAPTIVE, k=k, d=d, s=s, D=D)
    baseline = approx_factor(topology, Method.BASELINE, k=k, d=d, s=s, D=D)
    assert adaptive >= baseline * (1 - 1e-12)
    assert baseline > 0


@given(k=st.integers(min_value=1, max_value=64), d=st.integers(min_value=1, max_value=64),
       exponent=st.integers(min_value=0, max_value=20))
@settings(max_examples=100, deadline=None)
def test_property_general_factor_is_linear_in_log_span(k, d, exponent):
    """Property 20: doubling D adds exactly k*d to the general-graph factor."""
    value = approx_factor(Topology.GENERAL, Method.ADAPTIVE, k=k, d=d, D=2 ** exponent)
    assert value == pytest.approx(k * d * exponent)
    assert math.isclose(
        approx_factor(Topology.GENERAL, Method.ADAPTIVE, k=k, d=d, D=2 ** (exponent + 1)) - value, k * d,
    )
