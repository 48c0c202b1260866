"""Who can read the secret: witness searches, access structures, thresholds.

A set ``S`` *accesses* the secret of ``(G, A)`` when some ``D`` with
``D | Odd(D)`` inside ``S`` meets ``A`` an odd number of times; it is
*blocked* when some ``K`` outside ``S`` has ``Odd(K) & S == A & S``.  Both
searches are affine GF(2) systems over the adjacency matrix, and exactly one
of them succeeds for every ``S``.  :func:`decide` runs both and raises
:class:`DichotomyViolation` if that ever fails.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

from graphsecret.errors import DichotomyViolation, InvalidInput, SizeBoundExceeded
from graphsecret.gf2 import GF2Matrix, solve_affine
from graphsecret.graph import (
    Graph,
    Protocol,
    VertexSet,
    conjugate_graph,
    full_set,
    iter_bits,
    members,
    odd_neighbourhood,
    vertex_set,
)

DEFAULT_ENUMERATION_BOUND = 16


def _compress(mask: int, columns: list[int]) -> int:
    """Restrict ``mask`` to ``columns`` and repack densely (bit j <- columns[j])."""
    out = 0
    for j, v in enumerate(columns):
        if mask >> v & 1:
            out |= 1 << j
    return out


def _expand(x: int, columns: list[int]) -> VertexSet:
    return vertex_set(columns[j] for j in iter_bits(x))


def theorem1_witness(p: Protocol, s: VertexSet) -> VertexSet | None:
    """A set ``D`` inside ``s`` with ``D | Odd(D)`` inside ``s`` and ``|D & A|`` odd.

    Unknowns are the indicator of ``D`` over the members of ``s``.  Each vertex
    outside ``s`` contributes the row ``(adj . d)_v = 0``; one extra row asks
    for ``a . d = 1``.  Free unknowns default to 0, so the witness is
    deterministic.
    """
    g = p.graph
    g.check_subset(s)
    p.require_encoding()
    cols = members(s)
    rows = [_compress(g.adj[v], cols) for v in iter_bits(g.vertices & ~s)]
    rows.append(_compress(p.encoding, cols))
    sol = solve_affine(GF2Matrix(tuple(rows), len(cols)), 1 << (len(rows) - 1))
    if sol.particular is None:
        return None
    return _expand(sol.particular, cols)


def theorem2_witness(p: Protocol, s: VertexSet) -> VertexSet | None:
    """A set ``K`` outside ``s`` with ``Odd(K) & s == A & s`` (``K`` may be empty)."""
    g = p.graph
    g.check_subset(s)
    cols = members(g.vertices & ~s)
    inside = members(s)
    rows = [_compress(g.adj[v], cols) for v in inside]
    rhs = vertex_set(i for i, v in enumerate(inside) if p.encoding >> v & 1)
    sol = solve_affine(GF2Matrix(tuple(rows), len(cols)), rhs)
    if sol.particular is None:
        return None
    return _expand(sol.particular, cols)


def is_access_witness(p: Protocol, s: VertexSet, d: VertexSet) -> bool:
    g = p.graph
    return (
        d & ~s == 0
        and (d | odd_neighbourhood(g, d)) & ~s == 0
        and (d & p.encoding).bit_count() % 2 == 1
    )


def is_block_witness(p: Protocol, s: VertexSet, k: VertexSet) -> bool:
    return k & s == 0 and odd_neighbourhood(p.graph, k) & s == p.encoding & s


@dataclass(frozen=True)
class AccessVerdict:
    accessible: bool
    witness: VertexSet

    @property
    def status(self) -> str:
        return "Accessible" if self.accessible else "Blocked"


def decide(p: Protocol, s: VertexSet) -> AccessVerdict:
    d = theorem1_witness(p, s)
    k = theorem2_witness(p, s)
    if (d is None) == (k is None):
        raise DichotomyViolation(
            f"n={p.n} edges={p.graph.edges()} A={members(p.encoding)} S={members(s)}: "
            f"access witness {d if d is None else members(d)}, block witness {k if k is None else members(k)}"
        )
    if d is not None:
        return AccessVerdict(True, d)
    return AccessVerdict(False, k)


def qq_access(p: Protocol, s: VertexSet) -> str:
    """``"yes"``, ``"no"`` or ``"undetermined"`` for quantum channels / quantum secrets.

    Access in the quantum settings needs access in both ``G`` and its conjugate
    over ``A``; a set blocked in ``G`` stays blocked.  A set that accesses in
    ``G`` but is blocked in the conjugate has no established verdict.
    """
    if not decide(p, s).accessible:
        return "no"
    conj = Protocol(conjugate_graph(p.graph, p.encoding), p.encoding)
    return "yes" if decide(conj, s).accessible else "undetermined"


# ---------------------------------------------------------------------------
# Access structures


def _check_bound(n: int, max_n: int) -> None:
    if n > max_n:
        raise SizeBoundExceeded(f"n={n} exceeds enumeration bound {max_n}")


def access_table(p: Protocol, max_n: int = DEFAULT_ENUMERATION_BOUND) -> bytearray:
    """``table[mask]`` is 1 iff subset ``mask`` accesses the secret.

    Masks are visited in increasing numeric order, so every ``S - {v}`` is
    already known; if one of them accesses then so does ``S`` and no solve is
    needed.  Only sets whose every maximal proper subset is blocked get the
    full two-sided :func:`decide`.
    """
    _check_bound(p.n, max_n)
    p.require_encoding()
    size = 1 << p.n
    table = bytearray(size)
    for mask in range(size):
        sub = mask
        inherited = False
        while sub:
            low = sub & -sub
            if table[mask ^ low]:
                inherited = True
                break
            sub ^= low
        table[mask] = 1 if inherited else int(decide(p, mask).accessible)
    return table


def _order_key(mask: int) -> tuple[int, int]:
    return (mask.bit_count(), mask)


@dataclass(frozen=True)
class AccessStructure:
    n: int
    acc_minimal: tuple[VertexSet, ...]
    blk_minimal: tuple[VertexSet, ...]

    def as_lists(self) -> tuple[list[list[int]], list[list[int]]]:
        return [members(m) for m in self.acc_minimal], [members(m) for m in self.blk_minimal]


def structure_from_table(n: int, table: bytearray) -> AccessStructure:
    full = full_set(n)
    acc, blk = [], []
    for mask in range(1 << n):
        if table[mask] and all(not table[mask ^ (1 << v)] for v in iter_bits(mask)):
            acc.append(mask)
        comp = full & ~mask
        if not table[comp] and all(table[comp | 1 << v] for v in iter_bits(mask)):
            blk.append(mask)
    return AccessStructure(n, tuple(sorted(acc, key=_order_key)), tuple(sorted(blk, key=_order_key)))


def enumerate_access_structure(p: Protocol, max_n: int = DEFAULT_ENUMERATION_BOUND) -> AccessStructure:
    """Minimal accessing sets and minimal blocking sets, sorted by size then mask."""
    return structure_from_table(p.n, access_table(p, max_n))


@dataclass(frozen=True)
class ThresholdReport:
    n: int
    k_access: int | None
    k_privacy: int
    is_threshold: bool

    @property
    def k(self) -> int | None:
        return self.k_access if self.is_threshold else None


def threshold_from_table(n: int, table: bytearray) -> ThresholdReport:
    min_accessible = None
    max_blocked = -1
    for mask in range(1 << n):
        c = mask.bit_count()
        if table[mask]:
            if min_accessible is None or c < min_accessible:
                min_accessible = c
        elif c > max_blocked:
            max_blocked = c
    k_access = max_blocked + 1 if max_blocked < n else None
    # no accessing set at all: every size is private
    k_privacy = min_accessible if min_accessible is not None else n + 1
    return ThresholdReport(n, k_access, k_privacy, k_access is not None and k_access == k_privacy)


def threshold_report(p: Protocol, max_n: int = DEFAULT_ENUMERATION_BOUND) -> ThresholdReport:
    return threshold_from_table(p.n, access_table(p, max_n))


@dataclass(frozen=True)
class LemmaCheck:
    lemma: str
    applicable: bool
    holds: bool
    detail: str = ""

    def as_dict(self) -> dict:
        return {"lemma": self.lemma, "applicable": self.applicable, "holds": self.holds, "detail": self.detail}


def check_bound_lemmas(p: Protocol, report: ThresholdReport) -> list[LemmaCheck]:
    """Necessary conditions every threshold protocol must meet.

    * ``encoding_size``: ``|A| >= n - k + 1``
    * ``degree``: ``deg(a) >= k - 1`` for every ``a`` in ``A``
    * ``odd_n_no_go``: with ``A = V`` and ``n`` odd, ``k != n - 1``

    For a non-threshold protocol the checks are reported as not applicable.
    """
    g, n = p.graph, p.n
    applicable = report.is_threshold
    k = report.k if applicable else None
    checks = []

    if applicable:
        bound = n - k + 1
        size = p.encoding.bit_count()
        checks.append(LemmaCheck("encoding_size", True, size >= bound, f"|A|={size} >= n-k+1={bound}"))
        low = [a for a in iter_bits(p.encoding) if g.degree(a) < k - 1]
        min_deg = min(g.degree(a) for a in iter_bits(p.encoding))
        checks.append(LemmaCheck("degree", True, not low, f"min deg over A={min_deg} >= k-1={k - 1}"))
        covered = p.encoding == g.vertices and n % 2 == 1
        checks.append(
            LemmaCheck(
                "odd_n_no_go",
                covered,
                not (covered and k == n - 1),
                f"A=V, n={n} odd, k={k}" if covered else "requires A=V and odd n",
            )
        )
    else:
        for name in ("encoding_size", "degree", "odd_n_no_go"):
            checks.append(LemmaCheck(name, False, True, "not a threshold protocol"))
    return checks


@dataclass
class AnalysisReport:
    structure: AccessStructure
    threshold: ThresholdReport
    lemma_checks: list[LemmaCheck] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        acc, blk = self.structure.as_lists()
        return {
            "acc_minimal": acc,
            "blk_minimal": blk,
            "k_access": self.threshold.k_access,
            "k_privacy": self.threshold.k_privacy,
            "is_threshold": self.threshold.is_threshold,
            "lemma_checks": [c.as_dict() for c in self.lemma_checks],
        }


def analyze(p: Protocol, max_n: int = DEFAULT_ENUMERATION_BOUND) -> AnalysisReport:
    table = access_table(p, max_n)
    threshold = threshold_from_table(p.n, table)
    return AnalysisReport(structure_from_table(p.n, table), threshold, check_bound_lemmas(p, threshold))


def subsets_of_size(n: int, k: int) -> Iterable[VertexSet]:
    for combo in combinations(range(n), k):
        yield vertex_set(combo)


def require_vertices(g: Graph, ids: Iterable[int]) -> VertexSet:
    ids = list(ids)
    bad = [v for v in ids if not 0 <= v < g.n]
    if bad:
        raise InvalidInput(f"vertex ids {bad} out of range 0..{g.n - 1}")
    return vertex_set(ids)
