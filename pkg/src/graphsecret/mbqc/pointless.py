"""Pointless measurements: semantic check, structural conditions, QQ certification.

A measured qubit ``u`` is pointless when the pattern's channel equals the
channel of the same pattern with ``u`` left unmeasured (its signal fixed to
0) and then discarded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Callable, Iterable, Iterator

import numpy as np

from graphsecret.errors import InvalidInput, PatternError, SizeBoundExceeded
from graphsecret.gf2 import GF2Matrix, enumerate_solutions, solve_affine
from graphsecret.graph import Graph, Protocol, VertexSet, iter_bits, members, odd_neighbourhood, vertex_set
from graphsecret.mbqc.gflow import find_flow
from graphsecret.mbqc.pattern import Pattern, pattern_from_gflow, remove_measurement
from graphsecret.oracle import (
    EQ_TOL,
    SIMULATION_BOUND,
    channel_of,
    channels_equal,
    is_unitary_channel,
    trace_out,
)


def is_pointless_semantic(pat: Pattern, u: int, tol: float = EQ_TOL) -> bool:
    """Compare the pattern's channel with the one where ``u`` is kept and traced out."""
    if pat.n > SIMULATION_BOUND:
        raise SizeBoundExceeded(f"{pat.n} qubits exceed the simulation bound")
    reduced = remove_measurement(pat, u)
    return channels_equal(channel_of(pat), trace_out(channel_of(reduced), u), tol)


def _solve_over(graph: Graph, cols: list[int], row_vertices: list[int], rhs_set: VertexSet):
    rows = []
    for v in row_vertices:
        r = 0
        for j, c in enumerate(cols):
            if graph.adj[v] >> c & 1:
                r |= 1 << j
        rows.append(r)
    rhs = vertex_set(i for i, v in enumerate(row_vertices) if rhs_set >> v & 1)
    return solve_affine(GF2Matrix(tuple(rows), len(cols)), rhs)


def theorem4_condition_a(graph: Graph, outputs: VertexSet, p: int) -> VertexSet | None:
    """A nonempty ``S`` among the measured qubits other than ``p`` with ``Odd(S)`` inside ``N(p)``.

    Homogeneous system: every vertex outside ``N(p)`` must see ``S`` an even
    number of times.  Returns the first kernel basis vector, or ``None`` when
    the kernel is trivial.
    """
    if not 0 <= p < graph.n:
        raise InvalidInput(f"vertex {p} does not exist")
    cols = members(graph.vertices & ~outputs & ~(1 << p))
    sol = _solve_over(graph, cols, members(graph.vertices & ~graph.adj[p]), 0)
    if not sol.basis:
        return None
    return vertex_set(cols[j] for j in iter_bits(sol.basis[0]))


def compensating_sets(
    graph: Graph, inputs: VertexSet, outputs: VertexSet, p: int, cap: int = 1 << 16
) -> list[VertexSet]:
    """Every ``S`` of measured non-inputs other than ``p`` with ``Odd(S) == N(p)`` exactly.

    For such ``S`` the graph-state stabilizer turns ``Z`` on ``N(p)`` into
    ``X`` on ``S``, i.e. into sign flips of the angles on ``S``.
    """
    cols = members(graph.vertices & ~outputs & ~inputs & ~(1 << p))
    sol = _solve_over(graph, cols, list(range(graph.n)), graph.adj[p])
    found = [vertex_set(cols[j] for j in iter_bits(x)) for x in enumerate_solutions(sol, cap)]
    return sorted(found, key=lambda m: (m.bit_count(), m))


def index_sets(m: int, n: int, p: int, q: int) -> list[int]:
    """The arithmetic progression ``p + k (2^n - 1)`` clipped to block ``q``.

    ``k`` runs from the smallest integer with ``p + k (2^n - 1) >= (q - 1) 2^(m-n) + 1``
    to the largest with ``p + k (2^n - 1) <= q 2^(m-n)``.  ``p`` and ``q`` are
    1-based in ``1..2^n``.
    """
    if not 1 <= n <= m:
        raise InvalidInput(f"need 1 <= n <= m, got m={m}, n={n}")
    top = 1 << n
    if not (1 <= p <= top and 1 <= q <= top):
        raise InvalidInput(f"p and q must lie in 1..{top}")
    step = top - 1
    block = 1 << (m - n)
    lo = (q - 1) * block + 1
    hi = q * block
    k_first = -((p - lo) // step)  # ceil((lo - p) / step)
    k_last = (hi - p) // step
    return [p + k * step for k in range(k_first, k_last + 1)]


def _phase_sum(indices: list[int], angles: dict[int, float]) -> complex:
    total = 0j
    for x in indices:
        bits = x - 1
        total += np.exp(-1j * sum(a for j, a in angles.items() if bits >> j & 1))
    return total


def theorem4_condition_b(pat: Pattern, s: VertexSet, tol: float = EQ_TOL) -> bool:
    """Phase sums over every index set agree when the angles on ``s`` change sign.

    Basis index ``x`` (1-based) has ``x_j`` equal to bit ``j`` of ``x - 1``,
    the same little-endian convention as the simulator.
    """
    n_io = len(pat.inputs)
    if n_io != len(pat.outputs):
        raise InvalidInput("the phase condition needs |I| == |O|")
    if n_io == 0:
        raise InvalidInput("the phase condition needs at least one input")
    if pat.z_measured:
        raise InvalidInput("the phase condition covers (X, Y)-plane measurements only")
    if pat.n > 20:
        raise SizeBoundExceeded(f"2^{pat.n} phase terms is too many")
    bad = [v for v in iter_bits(s) if v not in pat.angles]
    if bad:
        raise InvalidInput(f"vertices {bad} of S are not measured")
    flipped = {j: (-a if s >> j & 1 else a) for j, a in pat.angles.items()}
    top = 1 << n_io
    for p in range(1, top + 1):
        for q in range(1, top + 1):
            idx = index_sets(pat.n, n_io, p, q)
            if abs(_phase_sum(idx, pat.angles) - _phase_sum(idx, flipped)) >= tol:
                return False
    return True


@dataclass
class Theorem4Result:
    condition_a: VertexSet | None
    condition_b: bool | None
    residual_flow: bool
    semantic: bool

    @property
    def predicted(self) -> bool:
        return self.condition_a is not None and bool(self.condition_b)


def theorem4_check(pat: Pattern, p: int, s: VertexSet | None = None) -> Theorem4Result:
    """Evaluate both structural conditions and the semantic definition for ``p``.

    ``s`` defaults to the set found by :func:`theorem4_condition_a`.
    """
    g = pat.graph
    outputs = vertex_set(pat.outputs)
    inputs = vertex_set(pat.inputs)
    keep = g.vertices & ~(1 << p)
    sub, old = g.induced(keep)
    new = {o: i for i, o in enumerate(old)}
    residual = find_flow(
        sub, vertex_set(new[v] for v in iter_bits(inputs & keep)), vertex_set(new[v] for v in iter_bits(outputs & keep))
    )
    cond_a = theorem4_condition_a(g, outputs, p)
    witness = s if s is not None else cond_a
    cond_b = theorem4_condition_b(pat, witness) if witness is not None else None
    return Theorem4Result(cond_a, cond_b, residual is not None, is_pointless_semantic(pat, p))


# ---------------------------------------------------------------------------
# Quantum secret sharing from patterns


@dataclass
class SubsetResult:
    subset: VertexSet
    has_pattern: bool
    unitary: bool = False
    failing_qubits: list[int] = field(default_factory=list)
    error: str = ""

    @property
    def passed(self) -> bool:
        return self.has_pattern and self.unitary and not self.failing_qubits and not self.error


@dataclass
class Theorem3Report:
    k: int
    results: list[SubsetResult]

    @property
    def certified(self) -> bool:
        return bool(self.results) and all(r.passed for r in self.results)


def dealer_graph(p: Protocol) -> tuple[Graph, int]:
    """``G`` plus a dealer vertex (id ``n``) adjacent to every vertex of ``A``."""
    n = p.n
    edges = list(p.graph.edges()) + [(a, n) for a in iter_bits(p.encoding)]
    return Graph.from_edges(n + 1, edges), n


PatternProvider = Callable[[VertexSet], "Pattern | None"]


def theorem3_check(
    p: Protocol,
    k: int,
    provider: PatternProvider,
    subsets: Iterable[VertexSet] | None = None,
    tol: float = EQ_TOL,
) -> Theorem3Report:
    """For each player set ``S`` of size ``k`` verify the provider's pattern.

    The pattern must live on the dealer graph with the dealer as its only
    input and a single output inside ``S``; its channel must be unitary and
    every player outside ``S`` must be a pointless measurement.
    """
    host, dealer = dealer_graph(p)
    if host.n > SIMULATION_BOUND:
        raise SizeBoundExceeded(f"{host.n} qubits exceed the simulation bound")
    if subsets is None:
        subsets = (vertex_set(c) for c in combinations(range(p.n), k))
    results = []
    for s in subsets:
        if s.bit_count() != k:
            raise InvalidInput(f"subset {members(s)} does not have size {k}")
        pat = provider(s)
        if pat is None:
            results.append(SubsetResult(s, False, error="no candidate pattern"))
            continue
        problem = _theorem3_shape_problem(pat, host, dealer, s)
        if problem:
            results.append(SubsetResult(s, True, error=problem))
            continue
        unitary = is_unitary_channel(channel_of(pat), tol)
        failing = [u for u in range(p.n) if not s >> u & 1 and not is_pointless_semantic(pat, u, tol)]
        results.append(SubsetResult(s, True, unitary, failing))
    return Theorem3Report(k, results)


def _theorem3_shape_problem(pat: Pattern, host: Graph, dealer: int, s: VertexSet) -> str:
    if pat.graph != host:
        return "pattern graph is not G plus the dealer vertex"
    if pat.inputs != {dealer}:
        return "the dealer must be the only input"
    if len(pat.outputs) != 1:
        return "exactly one output qubit is supported"
    (o,) = pat.outputs
    if not s >> o & 1:
        return f"output {o} is not in the player set"
    return ""


# ---------------------------------------------------------------------------
# Search utilities

_PAULIS = {
    (0, 0): np.eye(2, dtype=complex),
    (1, 0): np.array([[0, 1], [1, 0]], dtype=complex),
    (0, 1): np.array([[1, 0], [0, -1]], dtype=complex),
    (1, 1): np.array([[0, 1], [1, 0]], dtype=complex) @ np.array([[1, 0], [0, -1]], dtype=complex),
}


def _proportional(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na < tol or nb < tol:
        return False
    return abs(abs(np.vdot(a, b)) - na * nb) < tol * max(1.0, na * nb)


def search_pauli_pattern(
    graph: Graph,
    inputs: Iterable[int],
    output: int,
    free: Iterable[int],
    angle_choices: tuple[float, ...] = (0.0, math.pi / 2),
    tol: float = 1e-9,
) -> Pattern | None:
    """Find a single-input, single-output pattern whose ``free`` qubits need no correction.

    Every non-output qubit is measured at one of ``angle_choices`` with no
    adaptivity; the byproduct on the output must be a Pauli that is an
    affine-free GF(2)-linear function of the outcomes and ignores the
    outcomes of ``free``.  The first assignment (in ``product`` order) that
    yields a unitary channel is returned with its output corrections filled in.
    """
    inputs = frozenset(inputs)
    free = frozenset(free)
    if len(inputs) != 1:
        raise InvalidInput("exactly one input is supported")
    measured = [v for v in range(graph.n) if v != output]
    for choice in product(angle_choices, repeat=len(measured)):
        base = Pattern(graph, inputs, {output}, dict(zip(measured, choice)), order=tuple(measured))
        ch = channel_of(base)
        ref = ch.branches[0][1]
        byproducts = {}
        for label, mat in ch.branches:
            hit = next((key for key, pm in _PAULIS.items() if _proportional(pm @ mat, ref, tol)), None)
            if hit is None:
                break
            byproducts[label] = hit
        else:
            corrections = _linear_byproducts(measured, byproducts, free, output)
            if corrections is None:
                continue
            x_corr, z_corr = corrections
            pat = Pattern(graph, inputs, {output}, dict(zip(measured, choice)), x_corr, z_corr, order=tuple(measured))
            if is_unitary_channel(channel_of(pat), tol):
                return pat
    return None


def _linear_byproducts(measured, byproducts, free, output):
    """Per-qubit X/Z output corrections if the byproduct map is linear in the outcomes."""
    unit = {}
    for v in measured:
        label = tuple((q, int(q == v)) for q in measured)
        unit[v] = byproducts[label]
    for label, (bx, bz) in byproducts.items():
        ex = ez = 0
        for q, bit in label:
            if bit:
                ex ^= unit[q][0]
                ez ^= unit[q][1]
        if (ex, ez) != (bx, bz):
            return None
    if any(unit[v] != (0, 0) for v in free):
        return None
    x_corr = {v: [output] for v in measured if unit[v][0]}
    z_corr = {v: [output] for v in measured if unit[v][1]}
    return x_corr, z_corr


# ---------------------------------------------------------------------------
# Extending a flow pattern by a pointless vertex


def flow_pattern(graph: Graph, inputs: VertexSet, outputs: VertexSet, angles: dict[int, float]) -> Pattern:
    """The deterministic pattern driven by the causal flow of ``(graph, inputs, outputs)``."""
    flow = find_flow(graph, inputs, outputs)
    if flow is None:
        raise InvalidInput("the open graph has no causal flow")
    return pattern_from_gflow(graph, members(inputs), members(outputs), flow, angles)


def add_pointless_vertex(base: Pattern, s: VertexSet, alpha: float) -> tuple[Pattern, int]:
    """Attach a new qubit ``p`` (id ``n``) to ``Odd(S)`` and measure it first at ``alpha``.

    ``s`` must avoid the inputs and outputs of ``base``.  The new qubit's
    signal drives ``Z`` on its whole neighbourhood, mirroring what discarding
    it would do; corrections of ``base`` that would land on ``p`` are dropped
    because ``p`` is already measured.  When ``Odd(S)`` is empty the new qubit
    is isolated.
    """
    g = base.graph
    n = g.n
    if s & ~g.vertices or any(v in base.inputs or v in base.outputs for v in iter_bits(s)):
        raise InvalidInput("S must consist of measured non-input qubits of the base pattern")
    nbrs = odd_neighbourhood(g, s)
    graph = Graph.from_edges(n + 1, list(g.edges()) + [(v, n) for v in iter_bits(nbrs)])
    z_corr = dict(base.z_corrections)
    if nbrs:
        z_corr[n] = frozenset(members(nbrs))
    pat = Pattern(
        graph=graph,
        inputs=base.inputs,
        outputs=base.outputs,
        angles={**base.angles, n: alpha},
        x_corrections=base.x_corrections,
        z_corrections=z_corr,
        order=(n, *base.order),
    )
    return pat, n


def pointless_extensions(
    graph: Graph, inputs: VertexSet, outputs: VertexSet, angles: dict[int, float], alpha: float
) -> Iterator[tuple[Pattern, int, VertexSet]]:
    """Every single-vertex extension of a flow pattern, one per nonempty candidate ``S``.

    ``S`` ranges over subsets of the measured non-inputs with ``Odd(S)``
    nonempty, in increasing bitmask order.
    """
    base = flow_pattern(graph, inputs, outputs, angles)
    pool = members(graph.vertices & ~inputs & ~outputs)
    for bits in range(1, 1 << len(pool)):
        s = vertex_set(pool[j] for j in iter_bits(bits))
        if odd_neighbourhood(graph, s):
            pat, p = add_pointless_vertex(base, s, alpha)
            yield pat, p, s
