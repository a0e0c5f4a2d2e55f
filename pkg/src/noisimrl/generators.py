"""Random circuit generators for dataset construction and benchmarking.

All generators draw from an explicit numpy Generator so that dataset creation
is reproducible and parallel workers can use independent streams.
"""

from __future__ import annotations

import numpy as np

from noisimrl.circuits import Circuit, Moment, cz, rx, rz
from noisimrl.clifford import random_tableau, tableau_to_circuit

QUARTER_ANGLES = (0.0, np.pi / 2, np.pi, 3 * np.pi / 2)


def _random_1q_gate(q: int, rng: np.random.Generator, clifford: bool):
    if rng.random() < 0.5:
        angle = QUARTER_ANGLES[int(rng.integers(4))]
        return rx(q, angle)
    if clifford:
        return rz(q, QUARTER_ANGLES[int(rng.integers(4))])
    return rz(q, float(rng.uniform(0.0, 2 * np.pi)))


def random_clifford_circuit_1q(depth: int, rng: np.random.Generator) -> Circuit:
    """One uniformly random native Clifford gate (Rx/Rz, angle k*pi/2) per moment."""
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    moments = [Moment(1, [_random_1q_gate(0, rng, clifford=True)]) for _ in range(depth)]
    return Circuit(1, moments)


def random_moment_circuit(
    n_qubits: int,
    n_moments: int,
    rng: np.random.Generator,
    clifford: bool,
    cz_prob: float = 0.25,
    idle_prob: float = 0.2,
) -> Circuit:
    """Fixed number of moments with gates and parameters drawn at random."""
    if n_moments < 1:
        raise ValueError(f"n_moments must be >= 1, got {n_moments}")
    if n_qubits == 1:
        cz_prob = 0.0
    moments = []
    for _ in range(n_moments):
        gates = []
        free = list(range(n_qubits))
        if n_qubits >= 2 and rng.random() < cz_prob:
            pair = rng.choice(n_qubits, size=2, replace=False)
            gates.append(cz(int(pair[0]), int(pair[1])))
            free = [q for q in free if q not in pair]
        for q in free:
            if rng.random() >= idle_prob:
                gates.append(_random_1q_gate(q, rng, clifford))
        moments.append(Moment(n_qubits, gates))
    return Circuit(n_qubits, moments)


def random_circuit_3q(n_moments: int, rng: np.random.Generator) -> Circuit:
    """Fixed-moment-count three-qubit circuit with continuous Rz angles."""
    return random_moment_circuit(3, n_moments, rng, clifford=False)


def random_clifford_unitary_circuit_3q(rng: np.random.Generator) -> Circuit:
    """A uniformly random 3-qubit Clifford element, synthesized to native gates."""
    return tableau_to_circuit(random_tableau(3, rng))


def random_clifford_circuit(
    n_qubits: int, depth: int, rng: np.random.Generator
) -> Circuit:
    """Depth-`depth` Clifford circuit (all rotation angles multiples of pi/2)."""
    if n_qubits == 1:
        return random_clifford_circuit_1q(depth, rng)
    return random_moment_circuit(n_qubits, depth, rng, clifford=True)


def random_nonclifford_circuit(
    n_qubits: int, depth: int, rng: np.random.Generator
) -> Circuit:
    """Fixed-depth circuit with continuous Rz angles (generalization test set)."""
    if n_qubits == 1:
        moments = [
            Moment(1, [_random_1q_gate(0, rng, clifford=False)]) for _ in range(depth)
        ]
        return Circuit(1, moments)
    return random_moment_circuit(n_qubits, depth, rng, clifford=False)


def mixed_training_circuits_3q(
    count: int, n_moments: int, rng: np.random.Generator
) -> list:
    """Half fixed-moment random circuits, half random Clifford unitaries."""
    circuits = []
    for i in range(count):
        if i % 2 == 0:
            circuits.append(random_circuit_3q(n_moments, rng))
        else:
            circuits.append(random_clifford_unitary_circuit_3q(rng))
    return circuits
