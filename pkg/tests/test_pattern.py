from __future__ import annotations

import math
import random

import numpy as np
import pytest

from graphsecret.errors import PatternError
from graphsecret.graph import Graph, path
from graphsecret.mbqc.gflow import find_gflow
from graphsecret.mbqc.pattern import (
    Pattern,
    masks,
    pattern_from_gflow,
    remove_measurement,
    signal_sources,
    trace_out_rewrite,
)
from graphsecret.mbqc.pointless import is_pointless_semantic
from graphsecret.oracle import channel_of, channels_equal, is_unitary_channel, trace_out
from helpers import random_pattern


def line() -> Pattern:
    return Pattern(path(2), {0}, {1}, {0: 0.0}, x_corrections={0: [1]})


def test_validation():
    g = path(3)
    with pytest.raises(PatternError, match="never measured"):
        Pattern(g, {0}, {2}, {0: 0.0})
    with pytest.raises(PatternError, match="carry a measurement"):
        Pattern(g, {0}, {2}, {0: 0.0, 1: 0.0, 2: 0.0})
    with pytest.raises(PatternError, match="unmeasured"):
        Pattern(g, {0}, {2}, {0: 0.0, 1: 0.0}, x_corrections={2: [1]})
    with pytest.raises(PatternError, match="measured later"):
        Pattern(g, {0}, {2}, {0: 0.0, 1: 0.0}, x_corrections={1: [0]}, order=(0, 1))
    with pytest.raises(PatternError, match="cyclic"):
        Pattern(g, {0}, {2}, {0: 0.0, 1: 0.0}, x_corrections={1: [0], 0: [1]})
    with pytest.raises(PatternError, match="both an angle"):
        Pattern(g, {0}, {2}, {0: 0.0, 1: 0.0}, z_measured={1})
    with pytest.raises(PatternError, match="own source"):
        Pattern(g, {0}, {2}, {0: 0.0, 1: 0.0}, z_corrections={1: [1]})


def test_default_order_follows_dependencies():
    pat = Pattern(path(3), {0}, {2}, {0: 0.0, 1: 0.0}, x_corrections={1: [0]})
    assert pat.order == (1, 0)
    assert signal_sources(pat) == {1}
    assert masks(pat) == (0b001, 0b100)


def test_remove_measurement_examples():
    pat = line()
    with pytest.raises(PatternError):
        remove_measurement(pat, 0)  # an input
    three = Pattern(path(3), {0}, {2}, {0: 0.0, 1: 0.4}, x_corrections={0: [1], 1: [2]}, z_corrections={0: [2]})
    r = remove_measurement(three, 1)
    assert r.outputs == {1, 2}
    assert 1 not in r.angles
    assert r.x_corrections == {0: frozenset({1})}
    assert r.z_corrections == {0: frozenset({2})}
    plain = Pattern(path(3), set(), {2}, {0: 0.1, 1: 0.2})
    r = remove_measurement(plain, 0)
    assert r.outputs == {0, 2} and r.angles == {1: 0.2} and not r.x_corrections


def test_remove_measurement_from_line():
    pat = Pattern(path(2), set(), {1}, {0: 0.0}, x_corrections={0: [1]})
    r = remove_measurement(pat, 0)
    assert r.outputs == {0, 1}
    assert not r.x_corrections
    with pytest.raises(PatternError):
        remove_measurement(r, 1)


def test_remove_measurement_stays_trace_preserving():
    rng = random.Random(11)
    for _ in range(60):
        pat = random_pattern(rng, rng.randint(3, 5))
        for u in sorted(pat.measured - pat.inputs):
            assert channel_of(remove_measurement(pat, u)).is_trace_preserving()


def test_trace_out_rewrite_examples():
    iso = Pattern(Graph.from_edges(2, []), {0}, {0, 1}, {})
    r = trace_out_rewrite(iso, 1)
    assert r.z_measured == {1} and not r.z_corrections
    mid = Pattern(path(3), set(), {0, 1, 2}, {})
    r = trace_out_rewrite(mid, 1)
    assert r.z_corrections == {1: frozenset({0, 2})}
    assert r.outputs == {0, 2}
    with pytest.raises(PatternError):
        trace_out_rewrite(line(), 0)


def test_trace_out_rewrite_matches_partial_trace_on_line():
    mid = Pattern(path(3), {0}, {0, 1, 2}, {})
    assert channels_equal(channel_of(trace_out_rewrite(mid, 1)), trace_out(channel_of(mid), 1))


def test_keeping_the_entangling_gates_double_counts():
    # rewrite that keeps CZ(u, v) and also adds Z_v^{s_u}: the phase lands twice
    mid = Pattern(path(3), {0}, {0, 1, 2}, {})
    literal = Pattern(path(3), {0}, {0, 2}, {}, z_corrections={1: [0, 2]}, z_measured={1}, order=(1,))
    assert not channels_equal(channel_of(literal), trace_out(channel_of(mid), 1))
    assert channels_equal(channel_of(trace_out_rewrite(mid, 1)), trace_out(channel_of(mid), 1))


def test_pattern_from_gflow_on_a_line_is_a_unitary():
    g = path(4)
    flow = find_gflow(g, 0b0001, 0b1000)
    pat = pattern_from_gflow(g, [0], [3], flow, {0: 0.3, 1: 1.1, 2: -0.7})
    assert pat.order == (0, 1, 2)
    assert is_unitary_channel(channel_of(pat))


def test_removed_then_rewritten_reproduces_pointless_channels():
    rng = random.Random(21)
    checked = 0
    for _ in range(80):
        pat = random_pattern(rng, rng.randint(3, 5))
        for u in sorted(pat.measured - pat.inputs):
            unwound = trace_out_rewrite(remove_measurement(pat, u), u)
            same = channels_equal(channel_of(unwound), channel_of(pat))
            assert same == is_pointless_semantic(pat, u)
            checked += same
    assert checked > 0


def test_angles_are_coerced_to_float():
    pat = Pattern(path(2), {0}, {1}, {0: 1}, x_corrections={0: [1]})
    assert isinstance(pat.angles[0], float)
    assert math.isclose(pat.angles[0], 1.0)
    assert np.isclose(channel_of(pat).choi().trace(), 2)
