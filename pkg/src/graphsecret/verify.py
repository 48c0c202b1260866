"""Exhaustive consistency sweeps over small protocols.

For every protocol in the sweep, every subset ``S`` is decided with both
witness searches, the witness is re-checked against its defining equations,
and (within the simulation bound) the verdict is compared with the density
matrix oracle.  The access structure is then checked for monotonicity,
antichains and transversality, and every threshold found is run through the
bound lemmas.  Any failure raises :class:`ConsistencyViolation` carrying the
offending protocol and subset.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

import networkx as nx

from graphsecret.access import (
    AccessVerdict,
    check_bound_lemmas,
    decide,
    is_access_witness,
    is_block_witness,
    structure_from_table,
    threshold_from_table,
)
from graphsecret.errors import ConsistencyViolation
from graphsecret.graph import Graph, Protocol, full_set, members
from graphsecret.oracle import ACCESSIBLE, NEITHER, PRIVATE, SIMULATION_BOUND, ProtocolOracle

ATLAS_MAX_N = 6
RANDOM_GRAPHS_PER_SIZE = 40
EXTRA_ENCODINGS = 3
ALL_ENCODINGS_MAX_N = 4

# A hook that may alter a verdict before it is checked; used for negative controls.
VerdictHook = Callable[[Protocol, int, AccessVerdict], AccessVerdict]


def _describe(p: Protocol, s: int | None = None) -> str:
    doc = {"n": p.n, "edges": [list(e) for e in p.graph.edges()], "encoding": members(p.encoding)}
    if s is not None:
        doc["S"] = members(s)
    return json.dumps(doc, separators=(",", ":"))


@dataclass
class SweepSummary:
    max_n: int
    protocols: int = 0
    subsets: int = 0
    oracle_checks: int = 0
    thresholds: int = 0
    threshold_kinds: dict[str, int] = field(default_factory=dict)
    two_of_three: int = 0
    odd_n_minus_one: int = 0

    def to_json_dict(self) -> dict:
        return {
            "max_n": self.max_n,
            "protocols": self.protocols,
            "subsets": self.subsets,
            "oracle_checks": self.oracle_checks,
            "thresholds": self.thresholds,
            "threshold_kinds": dict(sorted(self.threshold_kinds.items(), key=lambda kv: tuple(map(int, kv[0].split(","))))),
            "two_of_three_thresholds": self.two_of_three,
            "odd_n_minus_one_thresholds": self.odd_n_minus_one,
            "passed": True,
        }


def check_protocol(p: Protocol, use_oracle: bool = True, hook: VerdictHook | None = None) -> tuple[bytearray, int]:
    """Decide every subset of ``p`` and cross-check; return the access table and oracle count."""
    n = p.n
    table = bytearray(1 << n)
    oracle = ProtocolOracle(p) if use_oracle and n <= SIMULATION_BOUND else None
    checks = 0
    for s in range(1 << n):
        verdict = decide(p, s)
        if hook is not None:
            verdict = hook(p, s, verdict)
        ok = (
            is_access_witness(p, s, verdict.witness)
            if verdict.accessible
            else is_block_witness(p, s, verdict.witness)
        )
        if not ok:
            raise ConsistencyViolation(f"invalid {verdict.status} witness {members(verdict.witness)} for {_describe(p, s)}")
        table[s] = int(verdict.accessible)
        if oracle is not None:
            got = oracle.check(s)
            checks += 1
            if got == NEITHER:
                raise ConsistencyViolation(f"oracle says neither private nor accessible for {_describe(p, s)}")
            if got != (ACCESSIBLE if verdict.accessible else PRIVATE):
                raise ConsistencyViolation(f"oracle says {got} but decide says {verdict.status} for {_describe(p, s)}")
    _check_structure(p, table)
    return table, checks


def _check_structure(p: Protocol, table: bytearray) -> None:
    n = p.n
    for s in range(1 << n):
        if table[s]:
            for v in range(n):
                if not table[s | 1 << v]:
                    raise ConsistencyViolation(f"monotonicity fails adding {v} for {_describe(p, s)}")
    structure = structure_from_table(n, table)
    for family, name in ((structure.acc_minimal, "acc_minimal"), (structure.blk_minimal, "blk_minimal")):
        for a in family:
            for b in family:
                if a != b and a & b == a:
                    raise ConsistencyViolation(f"{name} is not an antichain for {_describe(p)}")
    for a in structure.acc_minimal:
        for b in structure.blk_minimal:
            if not a & b:
                raise ConsistencyViolation(
                    f"accessing set {members(a)} misses blocking set {members(b)} for {_describe(p)}"
                )


def _atlas(n: int) -> list[Graph]:
    out = []
    for nxg in nx.graph_atlas_g():
        if nxg.number_of_nodes() == n:
            out.append(Graph.from_edges(n, nxg.edges()))
    return out


def random_graph(n: int, rng: random.Random, density: float = 0.5) -> Graph:
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < density]
    return Graph.from_edges(n, edges)


def sweep_protocols(max_n: int, seed: int = 0) -> Iterator[Protocol]:
    """Small protocols in a fixed order.

    Graphs: every isomorphism class up to :data:`ATLAS_MAX_N` vertices, then
    seeded random graphs.  Encodings: every nonempty ``A`` up to
    :data:`ALL_ENCODINGS_MAX_N` vertices, otherwise ``A = V`` plus a few
    seeded random choices.
    """
    rng = random.Random(seed)
    for n in range(1, max_n + 1):
        graphs = _atlas(n) if n <= ATLAS_MAX_N else [random_graph(n, rng) for _ in range(RANDOM_GRAPHS_PER_SIZE)]
        for g in graphs:
            if n <= ALL_ENCODINGS_MAX_N:
                encodings: Iterable[int] = range(1, 1 << n)
            else:
                full = full_set(n)
                extra = {rng.randrange(1, 1 << n) for _ in range(EXTRA_ENCODINGS)} - {full}
                encodings = [full, *sorted(extra)]
            for a in encodings:
                yield Protocol(g, a)


def run_suite(max_n: int, seed: int = 0, hook: VerdictHook | None = None) -> SweepSummary:
    summary = SweepSummary(max_n)
    for p in sweep_protocols(max_n, seed):
        table, checks = check_protocol(p, use_oracle=True, hook=hook)
        summary.protocols += 1
        summary.subsets += len(table)
        summary.oracle_checks += checks
        report = threshold_from_table(p.n, table)
        if not report.is_threshold:
            continue
        summary.thresholds += 1
        key = f"{report.k},{p.n}"
        summary.threshold_kinds[key] = summary.threshold_kinds.get(key, 0) + 1
        if (report.k, p.n) == (2, 3):
            summary.two_of_three += 1
        if p.encoding == p.graph.vertices and p.n % 2 == 1 and report.k == p.n - 1:
            summary.odd_n_minus_one += 1
        for check in check_bound_lemmas(p, report):
            if not check.holds:
                raise ConsistencyViolation(f"lemma {check.lemma} fails ({check.detail}) for {_describe(p)}")
    if summary.two_of_three:
        raise ConsistencyViolation(f"{summary.two_of_three} protocols on 3 vertices are (2,3) thresholds")
    return summary


def mutate_full_set_witness(p: Protocol, s: int, verdict: AccessVerdict) -> AccessVerdict:
    """Negative control: replace the access witness for ``S = V`` by the empty set."""
    if verdict.accessible and s == p.graph.vertices:
        return AccessVerdict(True, 0)
    return verdict
