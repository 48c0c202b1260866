"""Dense state-vector ground truth for graph states and measurement patterns.

Qubit ordering is little-endian: in a basis index ``x``, bit ``q`` is the
value of qubit ``q``.  Reduced density matrices and channel matrices index
their qubits the same way, with the kept qubits taken in ascending id order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from graphsecret.errors import InvalidInput, SizeBoundExceeded
from graphsecret.graph import Graph, Protocol, VertexSet, members
from graphsecret.mbqc.pattern import Pattern

SIMULATION_BOUND = 14
EQ_TOL = 1e-9
SELF_TOL = 1e-12

PRIVATE = "private"
ACCESSIBLE = "accessible"
NEITHER = "neither"


def _check_size(n: int, bound: int = SIMULATION_BOUND) -> None:
    if n > bound:
        raise SizeBoundExceeded(f"{n} qubits exceed the simulation bound {bound}")


def _bit_parity(values: np.ndarray) -> np.ndarray:
    """Parity of the set bits of each entry."""
    v = values.copy()
    parity = np.zeros_like(v)
    while np.any(v):
        parity ^= v & 1
        v >>= 1
    return parity


def build_graph_state(g: Graph, bound: int = SIMULATION_BOUND) -> np.ndarray:
    """Amplitudes of |G>: ``2^{-n/2} (-1)^{#edges inside x}`` for each basis string ``x``."""
    _check_size(g.n, bound)
    idx = np.arange(1 << g.n, dtype=np.int64)
    parity = np.zeros_like(idx)
    for u, v in g.edges():
        parity ^= (idx >> u) & (idx >> v) & 1
    return (1 - 2 * parity).astype(complex) / np.sqrt(1 << g.n)


def encode_secret(state: np.ndarray, a: VertexSet, s: int) -> np.ndarray:
    """``Z_A^s`` applied to ``state``."""
    if s not in (0, 1):
        raise InvalidInput("secret must be a bit")
    n = int(state.size).bit_length() - 1
    if a >> n:
        raise InvalidInput("encoding set exceeds the qubit range")
    if s == 0:
        return state.copy()
    idx = np.arange(state.size, dtype=np.int64)
    return state * (1 - 2 * _bit_parity(idx & a))


def reduced_density(state: np.ndarray, s: VertexSet) -> np.ndarray:
    """Partial trace of ``|state><state|`` onto the qubits of ``s``."""
    n = int(state.size).bit_length() - 1
    if s >> n:
        raise InvalidInput("subsystem exceeds the qubit range")
    keep = members(s)
    rest = [q for q in range(n) if not s >> q & 1]
    # numpy axis t holds qubit n-1-t; put kept qubits first, highest id first,
    # so the row index of the reshaped matrix is little-endian over ``keep``
    axes = [n - 1 - q for q in reversed(keep)] + [n - 1 - q for q in reversed(rest)]
    m = state.reshape((2,) * n).transpose(axes).reshape(1 << len(keep), 1 << len(rest))
    return m @ m.conj().T


def check_density(rho: np.ndarray) -> None:
    """Raise ``AssertionError`` if ``rho`` is not a density matrix within tolerance."""
    assert np.allclose(rho, rho.conj().T, atol=SELF_TOL, rtol=0), "not Hermitian"
    assert abs(np.trace(rho) - 1) < SELF_TOL, "trace differs from 1"
    assert np.linalg.eigvalsh(rho).min() >= -1e-9, "not positive semidefinite"


class ProtocolOracle:
    """Caches ``|phi(0)>`` and ``|phi(1)>`` of a protocol for repeated subset checks."""

    def __init__(self, p: Protocol, bound: int = SIMULATION_BOUND):
        self.protocol = p
        base = build_graph_state(p.graph, bound)
        self.states = (base, encode_secret(base, p.encoding, 1))

    def densities(self, s: VertexSet) -> tuple[np.ndarray, np.ndarray]:
        return reduced_density(self.states[0], s), reduced_density(self.states[1], s)

    def check(self, s: VertexSet, tol: float = EQ_TOL) -> str:
        self.protocol.graph.check_subset(s)
        r0, r1 = self.densities(s)
        if np.max(np.abs(r0 - r1)) < tol:
            return PRIVATE
        # tr(r0 r1) without forming the product
        if abs(np.sum(r0 * r1.T)) < tol:
            return ACCESSIBLE
        return NEITHER


def privacy_check(p: Protocol, s: VertexSet, tol: float = EQ_TOL) -> str:
    """``"private"``, ``"accessible"`` or ``"neither"`` from the reduced states."""
    return ProtocolOracle(p).check(s, tol)


def stabilizer_apply(state: np.ndarray, g: Graph, u: int) -> np.ndarray:
    """``X_u prod_{v in N(u)} Z_v`` applied to ``state``."""
    idx = np.arange(state.size, dtype=np.int64)
    phase = 1 - 2 * _bit_parity(idx & g.adj[u])
    # (X_u psi)[x] = psi[x ^ 2^u]; the Z's act first
    return (state * phase)[idx ^ (1 << u)]


# ---------------------------------------------------------------------------
# Patterns as channels


@dataclass(frozen=True)
class Channel:
    """Kraus branches ``(outcome label, matrix)`` from the input qubits to the output qubits.

    Each label is a tuple of ``(qubit, outcome)`` pairs in measurement order.
    """

    inputs: tuple[int, ...]
    outputs: tuple[int, ...]
    branches: tuple[tuple[tuple[tuple[int, int], ...], np.ndarray], ...]

    @property
    def dims(self) -> tuple[int, int]:
        return 1 << len(self.outputs), 1 << len(self.inputs)

    def kraus(self) -> list[np.ndarray]:
        return [k for _, k in self.branches]

    def apply(self, rho: np.ndarray) -> np.ndarray:
        dout, din = self.dims
        if rho.shape != (din, din):
            raise InvalidInput(f"input has shape {rho.shape}, expected {(din, din)}")
        out = np.zeros((dout, dout), dtype=complex)
        for k in self.kraus():
            out += k @ rho @ k.conj().T
        return out

    def completeness(self) -> np.ndarray:
        """``sum_s B_s^dagger B_s``; the identity for a trace-preserving channel."""
        _, din = self.dims
        total = np.zeros((din, din), dtype=complex)
        for k in self.kraus():
            total += k.conj().T @ k
        return total

    def is_trace_preserving(self, tol: float = EQ_TOL) -> bool:
        return bool(np.max(np.abs(self.completeness() - np.eye(self.dims[1]))) < tol)

    def choi(self) -> np.ndarray:
        """``sum_s vec(B_s) vec(B_s)^dagger`` with row-major ``vec``."""
        dout, din = self.dims
        j = np.zeros((dout * din, dout * din), dtype=complex)
        for k in self.kraus():
            v = k.reshape(-1)
            j += np.outer(v, v.conj())
        return j


def _bra(angle: float | None, outcome: int) -> np.ndarray:
    """``<+_a|`` / ``<-_a|`` for an (X, Y)-plane measurement, ``<0|`` / ``<1|`` for Z."""
    if angle is None:
        return np.array([1.0, 0.0], dtype=complex) if outcome == 0 else np.array([0.0, 1.0], dtype=complex)
    sign = 1 if outcome == 0 else -1
    return np.array([1.0, sign * np.exp(-1j * angle)], dtype=complex) / np.sqrt(2)


class _Branch:
    __slots__ = ("signals", "tensor", "qubits")

    def __init__(self, signals: dict[int, int], tensor: np.ndarray, qubits: list[int]):
        self.signals = signals
        self.tensor = tensor
        self.qubits = qubits  # qubit held by each tensor axis, excluding the last (input) axis


def _apply_x(b: _Branch, q: int) -> None:
    b.tensor = np.flip(b.tensor, axis=b.qubits.index(q))


def _apply_z(b: _Branch, q: int) -> None:
    ax = b.qubits.index(q)
    sl = [slice(None)] * b.tensor.ndim
    sl[ax] = 1
    b.tensor = b.tensor.copy()
    b.tensor[tuple(sl)] *= -1


def _pending(pat: Pattern, q: int, signals: dict[int, int]) -> tuple[int, int]:
    x = z = 0
    for src, targets in pat.x_corrections.items():
        if q in targets and src in signals:
            x ^= signals[src]
    for src, targets in pat.z_corrections.items():
        if q in targets and src in signals:
            z ^= signals[src]
    return x, z


def _initial_tensor(pat: Pattern) -> np.ndarray:
    """Columns are the entangled open graph state for each input basis state."""
    n = pat.n
    ins = sorted(pat.inputs)
    idx = np.arange(1 << n, dtype=np.int64)
    col = np.zeros_like(idx)
    for j, q in enumerate(ins):
        col |= ((idx >> q) & 1) << j
    psi = np.zeros((1 << n, 1 << len(ins)), dtype=complex)
    psi[idx, col] = 1 / np.sqrt(1 << (n - len(ins)))
    parity = np.zeros_like(idx)
    for u, v in pat.graph.edges():
        parity ^= (idx >> u) & (idx >> v) & 1
    psi *= (1 - 2 * parity)[:, None]
    return psi.reshape((2,) * n + (1 << len(ins),))


def channel_of(pat: Pattern, bound: int = SIMULATION_BOUND) -> Channel:
    """Kraus decomposition of the pattern, one branch per outcome string."""
    _check_size(pat.n, bound)
    n = pat.n
    branches = [_Branch({}, _initial_tensor(pat), [n - 1 - t for t in range(n)])]
    for q in pat.order:
        angle = None if q in pat.z_measured else pat.angles[q]
        nxt = []
        for b in branches:
            x, z = _pending(pat, q, b.signals)
            if z:
                _apply_z(b, q)
            if x:
                _apply_x(b, q)
            ax = b.qubits.index(q)
            rest = b.qubits[:ax] + b.qubits[ax + 1 :]
            for outcome in (0, 1):
                t = np.tensordot(_bra(angle, outcome), b.tensor, axes=([0], [ax]))
                nxt.append(_Branch({**b.signals, q: outcome}, t, rest))
        branches = nxt

    outputs = tuple(sorted(pat.outputs))
    result = []
    for b in branches:
        for q in outputs:
            x, z = _pending(pat, q, b.signals)
            if z:
                _apply_z(b, q)
            if x:
                _apply_x(b, q)
        # highest output id first, input axis last
        perm = [b.qubits.index(q) for q in reversed(outputs)] + [len(b.qubits)]
        mat = b.tensor.transpose(perm).reshape(1 << len(outputs), -1)
        label = tuple((q, b.signals[q]) for q in pat.order)
        result.append((label, mat))
    return Channel(tuple(sorted(pat.inputs)), outputs, tuple(result))


def run_pattern(pat: Pattern, rho: np.ndarray) -> np.ndarray:
    """Output density matrix of the pattern on input ``rho`` (ordered by input id)."""
    return channel_of(pat).apply(rho)


def trace_out(ch: Channel, u: int) -> Channel:
    """The channel followed by discarding output qubit ``u``."""
    if u not in ch.outputs:
        raise InvalidInput(f"qubit {u} is not an output of the channel")
    pos = ch.outputs.index(u)
    k_out = len(ch.outputs)
    axis = k_out - 1 - pos
    branches = []
    for label, mat in ch.branches:
        t = mat.reshape((2,) * k_out + (mat.shape[1],))
        for x in (0, 1):
            part = np.take(t, x, axis=axis).reshape(1 << (k_out - 1), mat.shape[1])
            branches.append((label + ((u, x),), part))
    return Channel(ch.inputs, tuple(q for q in ch.outputs if q != u), tuple(branches))


def channels_equal(c1: Channel, c2: Channel, tol: float = EQ_TOL) -> bool:
    """Entrywise Choi-matrix comparison."""
    if c1.dims != c2.dims:
        raise InvalidInput(f"channel dimensions differ: {c1.dims} vs {c2.dims}")
    return bool(np.max(np.abs(c1.choi() - c2.choi())) < tol)


def is_unitary_channel(ch: Channel, tol: float = EQ_TOL) -> bool:
    """Rank-one Choi matrix, square dimensions and trace preservation."""
    dout, din = ch.dims
    if dout != din or not ch.is_trace_preserving(tol):
        return False
    eig = np.linalg.eigvalsh(ch.choi())
    return bool(eig[-2] < tol) if eig.size > 1 else True


def identity_channel(qubits: Sequence[int]) -> Channel:
    d = 1 << len(qubits)
    return Channel(tuple(qubits), tuple(qubits), (((), np.eye(d, dtype=complex)),))

