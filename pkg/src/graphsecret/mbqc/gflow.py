"""Generalised flow, causal flow and influencing walks on open graphs ``(G, I, O)``.

The strict order of a flow is stored as integer layers: ``i`` precedes ``j``
iff ``layers[i] < layers[j]``.  Outputs sit in the highest layer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple

from graphsecret.errors import GraphSecretError, InvalidInput
from graphsecret.gf2 import GF2Matrix, solve_affine
from graphsecret.graph import Graph, VertexSet, iter_bits, members, odd_neighbourhood, vertex_set


@dataclass(frozen=True)
class GFlow:
    g: dict[int, VertexSet]
    layers: dict[int, int]

    def is_causal(self) -> bool:
        return all(gi.bit_count() == 1 for gi in self.g.values())

    def successor(self, v: int) -> int:
        """Flow successor of ``v``; only meaningful for a causal flow."""
        gi = self.g[v]
        if gi.bit_count() != 1:
            raise InvalidInput(f"g({v}) has {gi.bit_count()} elements; not a causal flow")
        return gi.bit_length() - 1

    def to_json_dict(self) -> dict:
        return {
            "g": {str(v): members(gi) for v, gi in sorted(self.g.items())},
            "layers": {str(v): layer for v, layer in sorted(self.layers.items())},
        }


class GFlowCheck(NamedTuple):
    valid: bool
    vertex: int | None = None
    condition: int | None = None

    def __bool__(self) -> bool:
        return self.valid


def verify_gflow(graph: Graph, inputs: VertexSet, outputs: VertexSet, cand: GFlow) -> GFlowCheck:
    """Check the three gflow conditions; report the first violation.

    1. ``j in g(i)`` implies ``i < j``
    2. ``j in Odd(g(i))`` implies ``j == i`` or ``i < j``
    3. ``i in Odd(g(i))``

    Raises :class:`InvalidInput` if ``g`` is not defined on exactly ``V - O``
    with values inside ``V - I``, or a vertex has no layer.
    """
    measured = graph.vertices & ~outputs
    if vertex_set(cand.g) != measured:
        raise InvalidInput("gflow must be defined on exactly the non-output vertices")
    if set(cand.layers) != set(range(graph.n)):
        raise InvalidInput("every vertex needs a layer")
    for i in sorted(cand.g):
        gi = cand.g[i]
        if gi & inputs or gi >> graph.n:
            raise InvalidInput(f"g({i}) must lie in V - I")
        li = cand.layers[i]
        if any(cand.layers[j] <= li for j in iter_bits(gi)):
            return GFlowCheck(False, i, 1)
        odd = odd_neighbourhood(graph, gi)
        if any(j != i and cand.layers[j] <= li for j in iter_bits(odd)):
            return GFlowCheck(False, i, 2)
        if not odd >> i & 1:
            return GFlowCheck(False, i, 3)
    return GFlowCheck(True)


def _finalise_layers(depth: dict[int, int]) -> dict[int, int]:
    top = max(depth.values(), default=0)
    return {v: top - d for v, d in sorted(depth.items())}


def find_gflow(graph: Graph, inputs: VertexSet, outputs: VertexSet) -> GFlow | None:
    """Maximally delayed gflow by backward layering, or ``None``.

    Starting from the outputs, each round solves, for every unprocessed ``v``,
    ``Odd(K) & unprocessed == {v}`` with ``K`` among processed non-inputs.
    Every ``v`` that succeeds joins the next layer.
    """
    graph.check_subset(inputs, "inputs")
    graph.check_subset(outputs, "outputs")
    done = outputs
    depth = {v: 0 for v in iter_bits(outputs)}
    g: dict[int, VertexSet] = {}
    level = 0
    while done != graph.vertices:
        level += 1
        cols = members(done & ~inputs)
        todo = members(graph.vertices & ~done)
        rows = []
        for w in todo:
            r = 0
            for j, c in enumerate(cols):
                if graph.adj[w] >> c & 1:
                    r |= 1 << j
            rows.append(r)
        m = GF2Matrix(tuple(rows), len(cols))
        fresh = 0
        for idx, v in enumerate(todo):
            sol = solve_affine(m, 1 << idx)
            if sol.particular is None:
                continue
            g[v] = vertex_set(cols[j] for j in iter_bits(sol.particular))
            depth[v] = level
            fresh |= 1 << v
        if not fresh:
            return None
        done |= fresh
    return GFlow(g, _finalise_layers(depth))


def find_flow(graph: Graph, inputs: VertexSet, outputs: VertexSet) -> GFlow | None:
    """Maximally delayed causal flow (single-vertex corrections), or ``None``.

    A processed non-input ``c`` with exactly one unprocessed neighbour ``v``
    becomes the successor of ``v``.
    """
    graph.check_subset(inputs, "inputs")
    graph.check_subset(outputs, "outputs")
    done = outputs
    depth = {v: 0 for v in iter_bits(outputs)}
    g: dict[int, VertexSet] = {}
    level = 0
    while done != graph.vertices:
        level += 1
        fresh = 0
        for c in iter_bits(done & ~inputs):
            open_nbrs = graph.adj[c] & ~done
            if open_nbrs.bit_count() == 1:
                v = open_nbrs.bit_length() - 1
                if v not in g:
                    g[v] = 1 << c
                    depth[v] = level
                    fresh |= open_nbrs
        if not fresh:
            return None
        done |= fresh
    return GFlow(g, _finalise_layers(depth))


# ---------------------------------------------------------------------------
# Influencing walks


class WalkLimitExceeded(GraphSecretError):
    """A walk reached the length cap while it could still be extended."""


@dataclass(frozen=True)
class InfluencingWalk:
    vertices: tuple[int, ...]
    flow_steps: tuple[bool, ...]

    def __len__(self) -> int:
        return len(self.flow_steps)


def is_influencing_walk(graph: Graph, inputs: VertexSet, flow: GFlow, walk: InfluencingWalk) -> bool:
    """Check a walk against the definition, step by step."""
    vs, kinds = walk.vertices, walk.flow_steps
    if len(vs) < 2 or len(kinds) != len(vs) - 1 or not inputs >> vs[0] & 1:
        return False
    succ = {v: flow.successor(v) for v in flow.g}
    for t, (a, b) in enumerate(zip(vs, vs[1:])):
        if not graph.has_edge(a, b):
            return False
        forward = succ.get(a) == b
        backward = succ.get(b) == a
        if kinds[t] != forward:
            return False
        if backward:
            return False
    if not kinds[0]:
        return False
    return all(kinds[t] or kinds[t + 1] for t in range(len(kinds) - 1))


def influencing_walks(
    graph: Graph, inputs: VertexSet, flow: GFlow, target: int, max_length: int | None = None
) -> Iterator[InfluencingWalk]:
    """Every influencing walk from an input to ``target``, shortest first.

    A walk starts on a flow edge, never takes two non-flow edges in a row and
    only traverses flow edges from a vertex to its successor.  Such walks
    strictly advance through the flow order, so there are finitely many; the
    default cap is ``2 * n``.  Raises :class:`WalkLimitExceeded` if any walk
    is still extendable at the cap.
    """
    if not flow.is_causal():
        raise InvalidInput("influencing walks need a causal flow")
    cap = 2 * graph.n if max_length is None else max_length
    succ = {v: flow.successor(v) for v in flow.g}
    pred = {s: v for v, s in succ.items()}
    # state: (walk vertices, step kinds); last step kind decides what may follow
    frontier = [((i, succ[i]), (True,)) for i in iter_bits(inputs) if i in succ]
    length = 1
    while frontier:
        for vs, kinds in frontier:
            if vs[-1] == target:
                yield InfluencingWalk(vs, kinds)
        if length == cap:
            if any(_extensions(graph, succ, pred, vs[-1], kinds[-1]) for vs, kinds in frontier):
                raise WalkLimitExceeded(f"influencing walks longer than {cap} steps exist")
            return
        nxt = []
        for vs, kinds in frontier:
            for w, is_flow in _extensions(graph, succ, pred, vs[-1], kinds[-1]):
                nxt.append((vs + (w,), kinds + (is_flow,)))
        frontier = nxt
        length += 1


def _extensions(graph: Graph, succ: dict, pred: dict, v: int, last_was_flow: bool) -> list[tuple[int, bool]]:
    out = []
    for w in iter_bits(graph.adj[v]):
        if succ.get(v) == w:
            out.append((w, True))
        elif pred.get(v) == w:
            continue  # flow edge in the backward direction
        elif last_was_flow:
            out.append((w, False))
    return out
