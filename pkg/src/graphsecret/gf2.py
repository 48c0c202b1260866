"""Exact GF(2) linear algebra on int-packed rows.

A row is an ``int`` whose bit ``j`` is the coefficient of unknown ``j``.  A
right-hand side is an ``int`` whose bit ``i`` is the constant of row ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from graphsecret.errors import GraphSecretError, InvalidInput


class SolutionCapExceeded(GraphSecretError):
    """The solution space has more elements than the caller allowed."""


@dataclass(frozen=True)
class GF2Matrix:
    rows: tuple[int, ...]
    ncols: int

    def __post_init__(self) -> None:
        for r in self.rows:
            if r < 0 or r >> self.ncols:
                raise InvalidInput(f"row {r:#x} wider than {self.ncols} columns")

    @classmethod
    def from_rows(cls, rows: Sequence[int], ncols: int) -> GF2Matrix:
        return cls(tuple(rows), ncols)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def apply(self, x: int) -> int:
        """Matrix-vector product; bit ``i`` of the result is row ``i`` dotted with ``x``."""
        out = 0
        for i, r in enumerate(self.rows):
            out |= ((r & x).bit_count() & 1) << i
        return out

    def rank(self) -> int:
        return len(_eliminate(list(self.rows), [0] * len(self.rows), self.ncols)[2])


@dataclass(frozen=True)
class AffineSolution:
    """Solution set ``particular + span(basis)``; ``particular is None`` when inconsistent."""

    particular: int | None
    basis: tuple[int, ...]
    ncols: int

    @property
    def consistent(self) -> bool:
        return self.particular is not None

    @property
    def dimension(self) -> int:
        return len(self.basis)


def _eliminate(rows: list[int], rhs: list[int], ncols: int) -> tuple[list[int], list[int], list[int]]:
    """Reduced row echelon form, pivoting on the lowest-index row per column."""
    pivots: list[int] = []
    top = 0
    for col in range(ncols):
        bit = 1 << col
        piv = next((i for i in range(top, len(rows)) if rows[i] & bit), None)
        if piv is None:
            continue
        rows[top], rows[piv] = rows[piv], rows[top]
        rhs[top], rhs[piv] = rhs[piv], rhs[top]
        for i in range(len(rows)):
            if i != top and rows[i] & bit:
                rows[i] ^= rows[top]
                rhs[i] ^= rhs[top]
        pivots.append(col)
        top += 1
        if top == len(rows):
            break
    return rows, rhs, pivots


def solve_affine(m: GF2Matrix, rhs: int) -> AffineSolution:
    """All ``x`` with ``m x = rhs``.

    Free unknowns are set to zero in the particular solution, and the kernel
    basis has one vector per free column (ascending), so the output is a pure
    function of ``(m, rhs)``.
    """
    if rhs < 0 or rhs >> m.nrows:
        raise InvalidInput(f"right-hand side has more than {m.nrows} bits")
    rows, b, pivots = _eliminate(list(m.rows), [rhs >> i & 1 for i in range(m.nrows)], m.ncols)
    rank = len(pivots)
    if any(b[i] for i in range(rank, len(rows))):
        return AffineSolution(None, (), m.ncols)

    particular = 0
    for i, col in enumerate(pivots):
        if b[i]:
            particular |= 1 << col

    pivot_set = set(pivots)
    basis = []
    for free in range(m.ncols):
        if free in pivot_set:
            continue
        vec = 1 << free
        for i, col in enumerate(pivots):
            if rows[i] >> free & 1:
                vec |= 1 << col
        basis.append(vec)
    return AffineSolution(particular, tuple(basis), m.ncols)


def kernel(m: GF2Matrix) -> tuple[int, ...]:
    return solve_affine(m, 0).basis


def enumerate_solutions(sol: AffineSolution, cap: int = 1 << 20) -> Iterator[int]:
    """Yield every solution exactly once, in Gray-code order of the basis.

    Raises :class:`SolutionCapExceeded` up front if there are more than ``cap``.
    """
    if sol.particular is None:
        return
    if sol.dimension >= 63 or 1 << sol.dimension > cap:
        raise SolutionCapExceeded(f"2^{sol.dimension} solutions exceed cap {cap}")
    x = sol.particular
    yield x
    for step in range(1, 1 << sol.dimension):
        # flip the basis vector indexed by the lowest set bit of the step
        x ^= sol.basis[(step & -step).bit_length() - 1]
        yield x
