"""Random instance generators shared by the test modules."""

from __future__ import annotations

import math
import random

import numpy as np

from graphsecret.graph import Graph
from graphsecret.mbqc.pattern import Pattern


def random_pattern(rng: random.Random, n: int, max_inputs: int = 2, traced_output: bool = True) -> Pattern:
    """A random standard-form pattern on ``n`` qubits.

    Inputs and outputs are random (they may overlap); at least one output is
    a non-input when ``traced_output`` is set.  Corrections only flow from a
    measured qubit to qubits measured after it or to outputs.
    """
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.5]
    g = Graph.from_edges(n, edges)
    qubits = list(range(n))
    rng.shuffle(qubits)
    n_out = rng.randint(1, n - 1)
    outputs = set(qubits[:n_out])
    inputs = set(rng.sample(range(n), rng.randint(0, min(max_inputs, n - 1))))
    if traced_output and not outputs - inputs:
        inputs -= {qubits[0]}
    measured = [q for q in qubits if q not in outputs]
    rng.shuffle(measured)
    angles = {q: rng.uniform(0, 2 * math.pi) for q in measured}
    x_corr, z_corr = {}, {}
    for t, src in enumerate(measured):
        later = measured[t + 1 :] + sorted(outputs)
        x_corr[src] = [q for q in later if rng.random() < 0.4]
        z_corr[src] = [q for q in later if rng.random() < 0.4]
    return Pattern(g, inputs, outputs, angles, x_corr, z_corr, order=tuple(measured))


def random_density(rng: np.random.Generator, k: int) -> np.ndarray:
    d = 1 << k
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = m @ m.conj().T
    return rho / np.trace(rho)
