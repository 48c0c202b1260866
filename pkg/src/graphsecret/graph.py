"""Simple graphs stored as bit-adjacency rows.

Vertex sets are plain ``int`` bitmasks: bit ``v`` is set iff vertex ``v`` is a
member.  This keeps every set operation (union ``|``, intersection ``&``,
symmetric difference ``^``) exact and lets GF(2) rows be single integers.

Vertex numbering of the named families
--------------------------------------
* ``complete_bipartite(n)`` / ``bipartite_minus_matching(n)``: side ``u`` is
  ``0..n-1``, side ``v`` is ``n..2n-1``; the removed matching pairs ``i`` with
  ``n+i``.
* ``torus3x3()``: grid cell ``(i, j)`` (0-based row, column) is vertex ``3*i+j``.
* ``cycle(n)``: edges ``(i, i+1 mod n)``; ``path(n)``: edges ``(i, i+1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Iterable, Iterator

from graphsecret.errors import InvalidInput

MAX_VERTICES = 64

VertexSet = int


def vertex_set(vertices: Iterable[int]) -> VertexSet:
    """Pack an iterable of vertex ids into a bitmask."""
    mask = 0
    for v in vertices:
        if v < 0:
            raise InvalidInput(f"negative vertex id {v}")
        mask |= 1 << v
    return mask


def as_mask(vertices: VertexSet | Iterable[int]) -> VertexSet:
    """Accept either a bitmask or an iterable of ids."""
    if isinstance(vertices, int):
        if vertices < 0:
            raise InvalidInput("vertex mask must be non-negative")
        return vertices
    return vertex_set(vertices)


def members(mask: VertexSet) -> list[int]:
    """Vertex ids of a mask in ascending order."""
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return out


def iter_bits(mask: VertexSet) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def full_set(n: int) -> VertexSet:
    return (1 << n) - 1


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices ``0..n-1``.

    ``adj[u]`` is the neighbourhood N(u) as a bitmask.
    """

    n: int
    adj: tuple[int, ...]

    def __post_init__(self) -> None:
        if not 0 <= self.n <= MAX_VERTICES:
            raise InvalidInput(f"graph size {self.n} outside 0..{MAX_VERTICES}")
        if len(self.adj) != self.n:
            raise InvalidInput("adjacency has wrong number of rows")
        limit = full_set(self.n)
        for u, row in enumerate(self.adj):
            if row & ~limit:
                raise InvalidInput(f"row {u} references a vertex >= n")
            if row >> u & 1:
                raise InvalidInput(f"self-loop at {u}")
            for v in iter_bits(row):
                if not self.adj[v] >> u & 1:
                    raise InvalidInput(f"adjacency not symmetric at ({u}, {v})")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        if not 0 <= n <= MAX_VERTICES:
            raise InvalidInput(f"graph size {n} outside 0..{MAX_VERTICES}")
        rows = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidInput(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise InvalidInput(f"self-loop at {u}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    @classmethod
    def empty(cls, n: int) -> Graph:
        return cls(n, (0,) * n)

    @property
    def vertices(self) -> VertexSet:
        return full_set(self.n)

    def neighbours(self, u: int) -> VertexSet:
        return self.adj[u]

    def closed_neighbourhood(self, u: int) -> VertexSet:
        return self.adj[u] | 1 << u

    def degree(self, u: int) -> int:
        return self.adj[u].bit_count()

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def edges(self) -> list[tuple[int, int]]:
        """Edges ``(i, j)`` with ``i < j`` in lexicographic order."""
        return [(u, v) for u in range(self.n) for v in iter_bits(self.adj[u] >> (u + 1) << (u + 1))]

    def edge_count(self) -> int:
        return sum(r.bit_count() for r in self.adj) // 2

    def check_subset(self, mask: VertexSet, what: str = "set") -> VertexSet:
        if mask < 0 or mask >> self.n:
            raise InvalidInput(f"{what} is not a subset of V (n={self.n})")
        return mask

    def without_edges_at(self, u: int) -> Graph:
        """Same vertex set with every edge incident to ``u`` removed."""
        rows = [r & ~(1 << u) for r in self.adj]
        rows[u] = 0
        return Graph(self.n, tuple(rows))

    def induced(self, keep: VertexSet) -> tuple[Graph, list[int]]:
        """Induced subgraph on ``keep``, relabelled densely.

        Returns the subgraph and ``old_ids`` with ``old_ids[new] == old``.
        """
        old_ids = members(self.check_subset(keep))
        index = {old: new for new, old in enumerate(old_ids)}
        rows = []
        for old in old_ids:
            rows.append(vertex_set(index[v] for v in iter_bits(self.adj[old] & keep)))
        return Graph(len(old_ids), tuple(rows)), old_ids

    def relabel(self, perm: list[int]) -> Graph:
        """Graph with vertex ``v`` renamed to ``perm[v]``."""
        if sorted(perm) != list(range(self.n)):
            raise InvalidInput("relabelling is not a permutation")
        return Graph.from_edges(self.n, ((perm[u], perm[v]) for u, v in self.edges()))

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        seen = 1
        frontier = 1
        while frontier:
            nxt = 0
            for u in iter_bits(frontier):
                nxt |= self.adj[u]
            frontier = nxt & ~seen
            seen |= frontier
        return seen == self.vertices


@dataclass(frozen=True)
class Protocol:
    """A graph-state secret sharing protocol ``(G, A)``; ``encoding`` is A."""

    graph: Graph
    encoding: VertexSet

    def __post_init__(self) -> None:
        self.graph.check_subset(self.encoding, "encoding set")

    @property
    def n(self) -> int:
        return self.graph.n

    def require_encoding(self) -> None:
        if not self.encoding:
            raise InvalidInput("encoding set is empty; the secret is trivially private")


def odd_neighbourhood(g: Graph, k: VertexSet) -> VertexSet:
    """Vertices with an odd number of neighbours in ``k``."""
    out = 0
    for u in iter_bits(g.check_subset(k)):
        out ^= g.adj[u]
    return out


def conjugate_graph(g: Graph, a: VertexSet) -> Graph:
    """Complement the edges of ``g`` inside ``a``; all other edges are kept."""
    g.check_subset(a, "complementation set")
    rows = list(g.adj)
    for u in iter_bits(a):
        rows[u] ^= a & ~(1 << u)
    return Graph(g.n, tuple(rows))


def is_isomorphism(g: Graph, h: Graph, mapping: list[int]) -> bool:
    """True iff ``u -> mapping[u]`` maps the edges of ``g`` exactly onto those of ``h``."""
    if g.n != h.n or sorted(mapping) != list(range(g.n)):
        return False
    return g.relabel(mapping) == h


# ---------------------------------------------------------------------------
# Named families


def _require_positive(n: int) -> None:
    if n < 1:
        raise InvalidInput(f"family size must be >= 1, got {n}")


def complete_bipartite(n: int) -> Graph:
    _require_positive(n)
    return Graph.from_edges(2 * n, ((i, n + j) for i in range(n) for j in range(n)))


def bipartite_minus_matching(n: int) -> Graph:
    _require_positive(n)
    return Graph.from_edges(2 * n, ((i, n + j) for i in range(n) for j in range(n) if i != j))


def torus3x3() -> Graph:
    """K3 x K3: two cells are adjacent iff they share a row or a column."""
    edges = []
    for a, b in combinations(range(9), 2):
        if a // 3 == b // 3 or a % 3 == b % 3:
            edges.append((a, b))
    return Graph.from_edges(9, edges)


def cycle(n: int) -> Graph:
    _require_positive(n)
    if n < 3:
        raise InvalidInput("a simple cycle needs at least 3 vertices")
    return Graph.from_edges(n, ((i, (i + 1) % n) for i in range(n)))


def path(n: int) -> Graph:
    _require_positive(n)
    return Graph.from_edges(n, ((i, i + 1) for i in range(n - 1)))


def complete(n: int) -> Graph:
    _require_positive(n)
    return Graph.from_edges(n, combinations(range(n), 2))


FAMILIES = {
    "complete_bipartite": complete_bipartite,
    "bipartite_minus_matching": bipartite_minus_matching,
    "torus3x3": lambda n=None: torus3x3(),
    "cycle": cycle,
    "path": path,
    "complete": complete,
}


def generate(family: str, n: int | None = None) -> Graph:
    """Build a named family member; ``torus3x3`` ignores ``n``."""
    try:
        build = FAMILIES[family]
    except KeyError:
        raise InvalidInput(f"unknown family {family!r}; choose from {sorted(FAMILIES)}") from None
    if family == "torus3x3":
        return torus3x3()
    if n is None:
        raise InvalidInput(f"family {family!r} needs a size n")
    return build(n)


def torus_cell(i: int, j: int) -> int:
    """Vertex id of 0-based torus cell (row ``i``, column ``j``)."""
    return 3 * i + j


def torus_diagonals() -> list[VertexSet]:
    """The six transversals of the 3x3 grid (one cell per row and column)."""
    return sorted(vertex_set(torus_cell(i, c) for i, c in enumerate(p)) for p in permutations(range(3)))


# The conjugate torus re-labelling: position (i, j) of G' holds the original
# cell listed here (1-based cells, as in the construction it reproduces).
CONJUGATE_TORUS_CELLS = {
    (1, 1): (1, 1), (1, 2): (2, 2), (1, 3): (3, 3),
    (2, 1): (3, 2), (2, 2): (1, 3), (2, 3): (2, 1),
    (3, 1): (2, 3), (3, 2): (3, 1), (3, 3): (1, 2),
}  # fmt: skip


def conjugate_torus_mapping() -> list[int]:
    """``mapping[v]`` = original vertex playing the role of torus cell ``v`` in G'."""
    mapping = [0] * 9
    for (i, j), (a, b) in CONJUGATE_TORUS_CELLS.items():
        mapping[torus_cell(i - 1, j - 1)] = torus_cell(a - 1, b - 1)
    return mapping
