"""Standard-form measurement patterns and pattern surgery.

A :class:`Pattern` runs as: prepare every non-input qubit in ``|+>``, apply
``CZ`` on every edge, then for each measured qubit in ``order`` apply the
pending ``X``/``Z`` corrections whose source signals are already known and
measure it, and finally apply the corrections that target outputs.

Measured qubits are either measured in the (X, Y) plane at ``angles[v]`` or
in the Z basis (``v in z_measured``).  ``x_corrections[src]`` lists the qubits
that receive ``X`` when the outcome of ``src`` is 1; likewise for ``Z``.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

from graphsecret.errors import PatternError
from graphsecret.graph import Graph, members, odd_neighbourhood, vertex_set


def _freeze_map(m: Mapping[int, Iterable[int]] | None) -> dict[int, frozenset[int]]:
    out = {}
    for src, targets in (m or {}).items():
        t = frozenset(int(x) for x in targets)
        if t:
            out[int(src)] = t
    return out


@dataclass(frozen=True, eq=False)
class Pattern:
    graph: Graph
    inputs: frozenset[int]
    outputs: frozenset[int]
    angles: dict[int, float]
    x_corrections: dict[int, frozenset[int]] = field(default_factory=dict)
    z_corrections: dict[int, frozenset[int]] = field(default_factory=dict)
    z_measured: frozenset[int] = frozenset()
    order: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        set_ = object.__setattr__
        set_(self, "inputs", frozenset(int(v) for v in self.inputs))
        set_(self, "outputs", frozenset(int(v) for v in self.outputs))
        set_(self, "angles", {int(k): float(a) for k, a in self.angles.items()})
        set_(self, "x_corrections", _freeze_map(self.x_corrections))
        set_(self, "z_corrections", _freeze_map(self.z_corrections))
        set_(self, "z_measured", frozenset(int(v) for v in self.z_measured))
        self._validate()
        set_(self, "order", self._resolve_order())

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def measured(self) -> frozenset[int]:
        return frozenset(range(self.n)) - self.outputs

    def _validate(self) -> None:
        n = self.n
        everything = frozenset(range(n))
        for name in ("inputs", "outputs", "z_measured"):
            bad = getattr(self, name) - everything
            if bad:
                raise PatternError(f"{name} contain unknown qubits {sorted(bad)}")
        measured = self.measured
        both = self.z_measured & set(self.angles)
        if both:
            raise PatternError(f"qubits {sorted(both)} have both an angle and a Z measurement")
        given = set(self.angles) | self.z_measured
        missing = measured - given
        if missing:
            raise PatternError(f"non-output qubits {sorted(missing)} are never measured")
        extra = given - measured
        if extra:
            raise PatternError(f"output or unknown qubits {sorted(extra)} carry a measurement")
        for kind, corr in (("X", self.x_corrections), ("Z", self.z_corrections)):
            for src, targets in corr.items():
                if src not in measured:
                    raise PatternError(f"{kind} correction conditioned on unmeasured qubit {src}")
                if targets - everything:
                    raise PatternError(f"{kind} correction from {src} targets unknown qubits")
                if src in targets:
                    raise PatternError(f"{kind} correction from {src} targets its own source")

    def dependencies(self) -> dict[int, set[int]]:
        """For each measured qubit, the sources whose signals it must wait for."""
        deps: dict[int, set[int]] = {v: set() for v in self.measured}
        for corr in (self.x_corrections, self.z_corrections):
            for src, targets in corr.items():
                for t in targets:
                    if t in deps:
                        deps[t].add(src)
        return deps

    def _resolve_order(self) -> tuple[int, ...]:
        deps = self.dependencies()
        if self.order is not None:
            order = tuple(int(v) for v in self.order)
            if sorted(order) != sorted(self.measured):
                raise PatternError("measurement order must list every measured qubit once")
            pos = {v: i for i, v in enumerate(order)}
            for t, srcs in deps.items():
                for s in srcs:
                    if pos[s] > pos[t]:
                        raise PatternError(f"qubit {t} is corrected by {s}, which is measured later")
            return order
        # Kahn's algorithm, smallest id first
        indeg = {v: len(d) for v, d in deps.items()}
        users: dict[int, list[int]] = {v: [] for v in deps}
        for t, srcs in deps.items():
            for s in srcs:
                users[s].append(t)
        ready = [v for v, d in indeg.items() if d == 0]
        heapq.heapify(ready)
        order = []
        while ready:
            v = heapq.heappop(ready)
            order.append(v)
            for t in users[v]:
                indeg[t] -= 1
                if indeg[t] == 0:
                    heapq.heappush(ready, t)
        if len(order) != len(deps):
            raise PatternError("correction dependencies are cyclic")
        return tuple(order)

    def with_changes(self, **changes) -> Pattern:
        changes.setdefault("order", None)
        return replace(self, **changes)


def _drop_source(corr: dict[int, frozenset[int]], u: int) -> dict[int, frozenset[int]]:
    return {s: t for s, t in corr.items() if s != u}


def _drop_target(corr: dict[int, frozenset[int]], u: int) -> dict[int, frozenset[int]]:
    return {s: t - {u} for s, t in corr.items() if t - {u}}


def remove_measurement(pat: Pattern, u: int) -> Pattern:
    """The pattern in which ``u`` is no longer measured and becomes an output.

    Its signal is fixed to 0, so every correction conditioned on ``u`` is
    deleted.  Corrections that target ``u`` are kept and now act at the end.
    """
    if not 0 <= u < pat.n:
        raise PatternError(f"qubit {u} does not exist")
    if u in pat.inputs:
        raise PatternError(f"qubit {u} is an input")
    if u in pat.outputs:
        raise PatternError(f"qubit {u} is already an output")
    angles = {v: a for v, a in pat.angles.items() if v != u}
    return pat.with_changes(
        outputs=pat.outputs | {u},
        angles=angles,
        z_measured=pat.z_measured - {u},
        x_corrections=_drop_source(pat.x_corrections, u),
        z_corrections=_drop_source(pat.z_corrections, u),
        order=tuple(v for v in pat.order if v != u),
    )


def trace_out_rewrite(pat: Pattern, u: int) -> Pattern:
    """A pattern whose channel is the input pattern's channel with output ``u`` traced out.

    ``u`` is measured in the Z basis first and its signal drives ``Z`` on
    every former neighbour.  The ``CZ`` gates touching ``u`` are dropped from
    the entangling stage: ``Z``-measuring ``u`` right after ``CZ(u, v)`` is the
    same as ``Z_v^{s_u}`` after measuring an unentangled ``u``, so keeping both
    would apply the phase twice.  Corrections that used to target ``u`` act on
    a qubit that is discarded and are removed.
    """
    if not 0 <= u < pat.n:
        raise PatternError(f"qubit {u} does not exist")
    if u not in pat.outputs:
        raise PatternError(f"qubit {u} is not an output")
    if u in pat.inputs:
        raise PatternError(f"qubit {u} is an input; only non-input outputs can be rewritten")
    nbrs = frozenset(members(pat.graph.neighbours(u)))
    z_corr = _drop_target(pat.z_corrections, u)
    if nbrs:
        z_corr[u] = nbrs
    return pat.with_changes(
        graph=pat.graph.without_edges_at(u),
        outputs=pat.outputs - {u},
        z_measured=pat.z_measured | {u},
        x_corrections=_drop_target(pat.x_corrections, u),
        z_corrections=z_corr,
        order=(u, *pat.order),
    )


def pattern_from_gflow(
    graph: Graph,
    inputs: Iterable[int],
    outputs: Iterable[int],
    gflow,
    angles: Mapping[int, float],
) -> Pattern:
    """The deterministic pattern driven by a gflow.

    Measuring ``i`` triggers ``X`` on ``g(i)`` and ``Z`` on ``Odd(g(i)) - {i}``;
    qubits are measured by increasing layer.
    """
    x_corr, z_corr = {}, {}
    for i, gi in gflow.g.items():
        x_corr[i] = members(gi)
        z_corr[i] = members(odd_neighbourhood(graph, gi) & ~(1 << i))
    measured = [v for v in range(graph.n) if v in gflow.g]
    order = tuple(sorted(measured, key=lambda v: (gflow.layers[v], v)))
    return Pattern(
        graph=graph,
        inputs=frozenset(inputs),
        outputs=frozenset(outputs),
        angles=dict(angles),
        x_corrections=x_corr,
        z_corrections=z_corr,
        order=order,
    )


def signal_sources(pat: Pattern) -> set[int]:
    return set(pat.x_corrections) | set(pat.z_corrections)


def masks(pat: Pattern) -> tuple[int, int]:
    """``(inputs, outputs)`` as bitmasks."""
    return vertex_set(pat.inputs), vertex_set(pat.outputs)

