from __future__ import annotations

import random

import pytest

from graphsecret.access import AccessVerdict
from graphsecret.errors import ConsistencyViolation
from graphsecret.graph import Protocol, cycle, full_set
from graphsecret.verify import (
    ATLAS_MAX_N,
    _atlas,
    check_protocol,
    mutate_full_set_witness,
    random_graph,
    run_suite,
    sweep_protocols,
)

# isomorphism classes of graphs on n vertices (OEIS A000088)
GRAPH_COUNTS = {1: 1, 2: 2, 3: 4, 4: 11, 5: 34, 6: 156}


def test_atlas_counts():
    for n, count in GRAPH_COUNTS.items():
        assert len(_atlas(n)) == count
    assert ATLAS_MAX_N == 6


def test_sweep_is_deterministic():
    a = [(p.graph, p.encoding) for p in sweep_protocols(5, seed=1)]
    b = [(p.graph, p.encoding) for p in sweep_protocols(5, seed=1)]
    assert a == b


def test_check_protocol_counts():
    table, checks = check_protocol(Protocol(cycle(5), full_set(5)))
    assert checks == 32
    assert sum(table) == 16


def test_suite_up_to_five():
    summary = run_suite(5).to_json_dict()
    assert summary["passed"]
    assert summary["two_of_three_thresholds"] == 0
    assert summary["odd_n_minus_one_thresholds"] == 0
    assert summary["protocols"] > 300
    assert summary["oracle_checks"] == summary["subsets"]


def test_injected_fault_is_caught():
    with pytest.raises(ConsistencyViolation, match="invalid Accessible witness"):
        run_suite(2, hook=mutate_full_set_witness)


def test_flipped_verdict_is_caught():
    def lie(p, s, verdict):
        if s == p.graph.vertices:
            return AccessVerdict(False, 0)
        return verdict

    with pytest.raises(ConsistencyViolation, match="invalid Blocked witness"):
        check_protocol(Protocol(cycle(3), 0b111), hook=lie)


def test_random_graph_density():
    rng = random.Random(0)
    g = random_graph(8, rng, density=1.0)
    assert g.edge_count() == 28
    assert random_graph(8, rng, density=0.0).edge_count() == 0
