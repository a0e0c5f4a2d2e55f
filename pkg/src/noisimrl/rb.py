"""Randomized benchmarking: sequence construction, decay fitting, reporting.

Each sequence applies m random Clifford elements followed by the element
inverting their product, so the noiseless circuit is the identity up to a
global phase.  Survival probability is the population of |0...0> at the end;
the decay P(l) = a p^l + b is fitted over sequence length l.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import curve_fit

from noisimrl.circuits import Circuit, composite_unitary, rx, rz, schedule
from noisimrl.clifford import (
    CliffordTableau,
    invert_clifford_1q,
    random_tableau,
    symplectic_inverse,
    synthesize_tableau,
)
from noisimrl.dm import DensityMatrix
from noisimrl.errors import NumericalError
from noisimrl.generators import random_clifford_circuit_1q
from noisimrl.noise import simulate

DEFAULT_DEPTHS = (3, 5, 7, 10, 15, 20, 25, 30)
DEFAULT_REPLICATES = 30


def rb_sequence(n_qubits: int, m: int, rng: np.random.Generator) -> Circuit:
    """m random Clifford elements plus the inverting element, as native gates."""
    if n_qubits == 1:
        body = random_clifford_circuit_1q(m, rng)
        inverse = list(invert_clifford_1q(composite_unitary(body)))
        return Circuit(1, body.moments + schedule(inverse, 1).moments)
    gates = []
    for _ in range(m):
        gates.extend(synthesize_tableau(random_tableau(n_qubits, rng)))
    body = schedule(gates, n_qubits)
    total = CliffordTableau.from_circuit(body)
    inv = CliffordTableau.from_symplectic(symplectic_inverse(total.symplectic()))
    inv_gates = synthesize_tableau(inv)
    # the sign-free inverse cancels the symplectic part; whatever Pauli is
    # left over is removed with Rz(pi) (= Z) and Rx(pi) (= X) corrections
    residual = total.copy()
    for g in inv_gates:
        residual.apply_gate(g)
    if not np.array_equal(
        residual.symplectic(), np.eye(2 * n_qubits, dtype=np.uint8)
    ):
        raise NumericalError("inverse synthesis left a non-Pauli residue")
    fix = []
    for q in range(n_qubits):
        if residual.x_row(q).sign < 0:
            fix.append(rz(q, np.pi))
        if residual.z_row(q).sign < 0:
            fix.append(rx(q, np.pi))
    tail = schedule(inv_gates + fix, n_qubits)
    return Circuit(n_qubits, body.moments + tail.moments)


def survival_probability(rho: DensityMatrix) -> float:
    """Population of the all-zeros computational state."""
    return float(rho.data[0, 0].real)


@dataclass(frozen=True)
class RBFit:
    """Fitted decay P(l) = a p^l + b."""

    a: float
    p: float
    b: float
    depths: tuple
    mean_survivals: tuple


def fit_decay(depths, survivals, n_qubits: int) -> RBFit:
    """Least-squares fit of the exponential decay over mean survivals.

    `survivals` is a mapping or array of per-depth samples; means are fitted.
    """
    depths = np.asarray(depths, dtype=float)
    means = np.array([float(np.mean(s)) for s in survivals])
    if means.max() - means.min() < 0.01:
        raise NumericalError(
            "survival range is too flat to fit a decay "
            f"({means.min():.4f}..{means.max():.4f})"
        )

    def model(l, a, p, b):
        return a * np.power(p, l) + b

    p0 = (0.5, 0.99, 1.0 / 2**n_qubits)
    params, _ = curve_fit(model, depths, means, p0=p0, maxfev=500)
    return RBFit(
        a=float(params[0]),
        p=float(params[1]),
        b=float(params[2]),
        depths=tuple(int(d) for d in depths),
        mean_survivals=tuple(float(v) for v in means),
    )


@dataclass(frozen=True)
class RBResult:
    """Fit plus the raw per-depth survival samples."""

    fit: RBFit
    samples: dict = field(default_factory=dict)


def rb_characterize(
    attach,
    n_qubits: int,
    rng: np.random.Generator,
    depths=DEFAULT_DEPTHS,
    replicates: int = DEFAULT_REPLICATES,
) -> RBResult:
    """Estimate the depolarizing decay of the noise attached by `attach`.

    Parameters
    ----------
    attach : callable
        Maps a noiseless circuit to its noisy counterpart (e.g. a ground-truth
        model closure, or the real device in a hardware setting).
    """
    samples = {}
    for m in depths:
        vals = []
        for _ in range(replicates):
            circuit = attach(rb_sequence(n_qubits, m, rng))
            vals.append(survival_probability(simulate(circuit)))
        samples[int(m)] = vals
    fit = fit_decay(list(samples), list(samples.values()), n_qubits)
    return RBResult(fit=fit, samples=samples)
