"""Acceptance gate: one test (or a pair) per criterion, summarised by ``conftest.py``."""

from __future__ import annotations

import math
import random
import time
from itertools import combinations, product

import numpy as np
import pytest

from brute import gflow_exists_definitional, gflow_exists_greedy, odd_nbhd
from graphsecret.access import (
    analyze,
    decide,
    enumerate_access_structure,
    is_access_witness,
    is_block_witness,
    qq_access,
    theorem1_witness,
    theorem2_witness,
    threshold_report,
)
from graphsecret.graph import (
    Graph,
    Protocol,
    bipartite_minus_matching,
    complete_bipartite,
    conjugate_graph,
    conjugate_torus_mapping,
    cycle,
    full_set,
    is_isomorphism,
    members,
    path,
    torus3x3,
    torus_diagonals,
    vertex_set,
)
from graphsecret.mbqc.gflow import find_gflow, verify_gflow
from graphsecret.mbqc.pattern import trace_out_rewrite
from graphsecret.mbqc.pointless import (
    dealer_graph,
    pointless_extensions,
    search_pauli_pattern,
    theorem3_check,
    theorem4_check,
)
from graphsecret.oracle import ACCESSIBLE, NEITHER, PRIVATE, ProtocolOracle, channel_of, trace_out
from graphsecret.verify import _atlas, random_graph
from helpers import random_pattern

CHOI_TOL = 1e-9


def atlas_up_to(max_n: int, connected_only: bool = False) -> list[Graph]:
    graphs = [g for n in range(1, max_n + 1) for g in _atlas(n)]
    return [g for g in graphs if g.is_connected()] if connected_only else graphs


def check_every_subset(p: Protocol) -> int:
    oracle = ProtocolOracle(p)
    for s in range(1 << p.n):
        d, k = theorem1_witness(p, s), theorem2_witness(p, s)
        assert (d is None) != (k is None), (p.graph.edges(), members(p.encoding), members(s))
        if d is not None:
            assert is_access_witness(p, s, d)
        else:
            assert is_block_witness(p, s, k)
        verdict = oracle.check(s)
        assert verdict != NEITHER
        assert verdict == (ACCESSIBLE if decide(p, s).accessible else PRIVATE), (p.graph.edges(), members(s))
    return 1 << p.n


@pytest.mark.criterion(1, "dichotomy and classical decisions agree with the state-vector oracle")
def test_criterion_1_dichotomy_matches_oracle():
    checked = 0
    for g in atlas_up_to(6, connected_only=True):
        checked += check_every_subset(Protocol(g, g.vertices))
    rng = random.Random(2024)
    for _ in range(200):
        n = rng.randint(1, 8)
        g = random_graph(n, rng)
        a = rng.randint(1, full_set(n))
        checked += check_every_subset(Protocol(g, a))
    assert checked > 0


@pytest.mark.criterion(2, "complete bipartite minimal accessing sets")
def test_criterion_2_complete_bipartite():
    for n in range(2, 6):
        left, right = full_set(n), full_set(n) << n
        expected = {1 << u | right for u in range(n)} | {1 << v | left for v in range(n, 2 * n)}
        structure = enumerate_access_structure(Protocol(complete_bipartite(n), full_set(2 * n)))
        assert set(structure.acc_minimal) == expected, n


def one_endpoint_per_pair(n: int) -> set[int]:
    return {vertex_set(i + n * b for i, b in enumerate(choice)) for choice in product((0, 1), repeat=n)}


@pytest.mark.criterion(3, "complete bipartite minus a perfect matching: one endpoint per matched pair")
def test_criterion_3_bipartite_minus_matching():
    mismatched = {}
    for n in range(2, 6):
        structure = enumerate_access_structure(Protocol(bipartite_minus_matching(n), full_set(2 * n)))
        got, expected = set(structure.acc_minimal), one_endpoint_per_pair(n)
        # every minimal accessing set has size n, well short of 2n + 1
        assert {m.bit_count() for m in got} == {n}
        if got != expected:
            mismatched[n] = (len(got), len(expected), sorted(members(m) for m in expected - got)[:4])
    assert not mismatched, f"(found, expected, first missing) per n: {mismatched}"


@pytest.mark.criterion(4, "3x3 torus structure, conjugate isomorphism and quantum access")
def test_criterion_4_torus():
    t = torus3x3()
    p = Protocol(t, full_set(9))
    neighbourhoods = {t.closed_neighbourhood(v) for v in range(9)}
    expected = set(torus_diagonals()) | neighbourhoods
    assert len(expected) == 15
    assert set(enumerate_access_structure(p).acc_minimal) == expected
    assert is_isomorphism(t, conjugate_graph(t, full_set(9)), conjugate_torus_mapping())
    for nb in neighbourhoods:
        assert qq_access(p, nb) == "yes"


@pytest.mark.criterion(5, "threshold bound lemmas hold across small protocols")
def test_criterion_5_bound_lemmas():
    for g in atlas_up_to(6):
        report = analyze(Protocol(g, g.vertices))
        for check in report.lemma_checks:
            assert check.holds, (g.edges(), check)
    for edges in product((0, 1), repeat=3):
        g = Graph.from_edges(3, [e for e, keep in zip([(0, 1), (0, 2), (1, 2)], edges) if keep])
        for a in range(1, 8):
            r = threshold_report(Protocol(g, a))
            assert not (r.is_threshold and r.k == 2), (g.edges(), members(a))
    for n in (3, 5):
        for g in _atlas(n):
            r = threshold_report(Protocol(g, g.vertices))
            assert not (r.is_threshold and r.k == n - 1), g.edges()


@pytest.mark.criterion(6, "trace-out rewrite reproduces the partial trace")
def test_criterion_6_trace_out_rewrite():
    rng = random.Random(606)
    worst = 0.0
    for _ in range(100):
        pat = random_pattern(rng, rng.randint(3, 5))
        u = rng.choice(sorted(pat.outputs - pat.inputs))
        rewritten = channel_of(trace_out_rewrite(pat, u)).choi()
        traced = trace_out(channel_of(pat), u).choi()
        worst = max(worst, float(np.max(np.abs(rewritten - traced))))
    assert worst < CHOI_TOL


@pytest.mark.criterion(7, "gflow search agrees with brute force on all small open graphs")
def test_criterion_7_gflow_search():
    small = [s for k in range(3) for s in combinations(range(6), k)]
    instances = 0
    for g in atlas_up_to(6):
        odd = [odd_nbhd(g, k) for k in range(1 << g.n)]
        sets = [vertex_set(s) for s in small if all(v < g.n for v in s)]
        for i, o in product(sets, sets):
            flow = find_gflow(g, i, o)
            expected = gflow_exists_greedy(g, i, o, odd)
            if g.n <= 4:
                assert expected == gflow_exists_definitional(g, i, o)
            assert (flow is not None) == expected, (g.edges(), members(i), members(o))
            if flow is not None:
                assert verify_gflow(g, i, o, flow).valid
            instances += 1
    assert instances > 80000


LADDER = Graph.from_edges(6, [(0, 1), (1, 2), (3, 4), (4, 5), (1, 4)])
EXTENSION_HOSTS = [
    (path(4), 0b0001, 0b1000),
    (path(5), 0b00001, 0b10000),
    (path(6), 0b000001, 0b100000),
    (LADDER, 0b001001, 0b100100),
]
PAULI_XY = (0.0, math.pi / 2, math.pi, 3 * math.pi / 2)


def extension_cases(angle_source, alphas):
    for g, i, o in EXTENSION_HOSTS:
        measured = [v for v in range(g.n) if not o >> v & 1]
        for angles in angle_source(measured):
            for alpha in alphas:
                for pat, p, s in pointless_extensions(g, i, o, angles, alpha):
                    yield g, pat, p, s


def pauli_angles(measured):
    yield {v: 0.0 for v in measured}
    rng = random.Random(88)
    for _ in range(2):
        yield {v: rng.choice(PAULI_XY) for v in measured}


def generic_angles(measured):
    rng = random.Random(89)
    for _ in range(2):
        yield {v: rng.uniform(0.2, 1.3) for v in measured}


@pytest.mark.criterion(8, "pointlessness conditions predict semantic pointlessness")
def test_criterion_8_positive_instances():
    positives = []
    for g, pat, p, s in extension_cases(pauli_angles, (0.0, 0.9)):
        r = theorem4_check(pat, p, s)
        if r.residual_flow and r.predicted:
            positives.append((g.edges(), members(s), r.semantic))
    assert len(positives) >= 20
    assert all(sem for *_, sem in positives), [c for c in positives if not c[2]]


@pytest.mark.criterion(8, "pointlessness conditions predict semantic pointlessness")
def test_criterion_8_negative_controls():
    negatives = []
    for g, pat, p, s in extension_cases(generic_angles, (0.9,)):
        r = theorem4_check(pat, p, s)
        if r.residual_flow and r.condition_a is not None and r.condition_b is False:
            negatives.append((g.edges(), members(s), r.semantic))
    assert len(negatives) >= 5
    still_pointless = [c for c in negatives if c[2]]
    assert not still_pointless, f"{len(still_pointless)} of {len(negatives)} controls are pointless anyway"


@pytest.mark.criterion(9, "quantum secret sharing on the 5-cycle with three players")
def test_criterion_9_c5_three_players():
    c5 = Protocol(cycle(5), full_set(5))
    host, dealer = dealer_graph(c5)

    def provide(s):
        excluded = members(c5.graph.vertices & ~s)
        for free in (excluded, ()):
            for o in members(s):
                pat = search_pauli_pattern(host, {dealer}, o, free=free)
                if pat is not None:
                    return pat
        return None

    start = time.monotonic()
    report = theorem3_check(c5, 3, provide)
    elapsed = time.monotonic() - start
    assert elapsed < 300
    assert len(report.results) == 10
    failures = {tuple(members(r.subset)): (r.has_pattern, r.unitary, r.failing_qubits) for r in report.results if not r.passed}
    assert report.certified, f"(pattern, unitary, failing excluded qubits) per set: {failures}"
