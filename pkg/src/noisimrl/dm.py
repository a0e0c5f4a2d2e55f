"""Dense density-matrix simulation for 1-4 qubit systems.

States are full 2^n x 2^n complex matrices. Gates are applied as rho -> U rho U^dag
and noise channels as Kraus sums rho -> sum_i A_i rho A_i^dag, with operators
embedded on their target qubits. Qubit 0 is the most significant bit of the
computational-basis index.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from noisimrl.errors import DataError

logger = logging.getLogger(__name__)

MAX_QUBITS = 4

# Eigenvalues in [-PSD_TOL, 0) are numerical noise and get clamped; anything
# more negative indicates a genuinely invalid state.
PSD_TOL = 1e-9
HERM_TOL = 1e-10


@dataclass(frozen=True)
class DensityMatrix:
    """A 2^n x 2^n Hermitian, PSD, unit-trace complex matrix."""

    n_qubits: int
    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "data", np.asarray(self.data, dtype=complex))

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def validate(self, psd_tol: float = PSD_TOL, herm_tol: float = HERM_TOL) -> None:
        """Raise DataError if trace, Hermiticity or positivity are violated."""
        if self.data.shape != (self.dim, self.dim):
            raise DataError(
                f"density matrix shape {self.data.shape} does not match "
                f"{self.n_qubits} qubits"
            )
        if abs(np.trace(self.data) - 1.0) > herm_tol:
            raise DataError(f"trace {np.trace(self.data)} != 1")
        if np.max(np.abs(self.data - self.data.conj().T)) > herm_tol:
            raise DataError("density matrix is not Hermitian")
        if np.min(np.linalg.eigvalsh(self.data)) < -psd_tol:
            raise DataError("density matrix has negative eigenvalues")


@dataclass(frozen=True)
class Unitary:
    """A 1- or 2-qubit unitary matrix."""

    n_targets: int
    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "data", np.asarray(self.data, dtype=complex))
        d = 2**self.n_targets
        if self.n_targets not in (1, 2):
            raise ValueError(f"n_targets must be 1 or 2, got {self.n_targets}")
        if self.data.shape != (d, d):
            raise ValueError(f"unitary shape {self.data.shape} != ({d}, {d})")

    def validate(self, tol: float = 1e-10) -> None:
        d = self.data.shape[0]
        if np.max(np.abs(self.data @ self.data.conj().T - np.eye(d))) > tol:
            raise DataError("matrix is not unitary")


class ChannelKind(Enum):
    DEPOLARIZING = "depolarizing"
    AMPLITUDE_DAMPING = "amplitude_damping"
    COHERENT_X = "coherent_x"
    COHERENT_Z = "coherent_z"


@dataclass(frozen=True)
class KrausChannel:
    """A single-qubit noise channel given by its Kraus operators."""

    kind: ChannelKind
    param: float
    operators: tuple = field(repr=False)

    def validate(self, tol: float = 1e-10) -> None:
        acc = sum(a.conj().T @ a for a in self.operators)
        if np.max(np.abs(acc - np.eye(2))) > tol:
            raise DataError(f"{self.kind.value} channel is not trace preserving")


# ---------------------------------------------------------------------------
# Gate matrices


def rx_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def rz_matrix(theta: float) -> np.ndarray:
    return np.array(
        [[np.exp(-1j * theta / 2), 0], [0, np.exp(1j * theta / 2)]], dtype=complex
    )


CZ_MATRIX = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)


# ---------------------------------------------------------------------------
# Channel constructors


def depolarizing(lam: float) -> KrausChannel:
    """Local single-qubit depolarizing channel: rho -> (1-lam) rho + lam I/2."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"depolarizing parameter must be in [0, 1], got {lam}")
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    y = np.array([[0, -1j], [1j, 0]], dtype=complex)
    z = np.diag([1.0, -1.0]).astype(complex)
    ops = (
        np.sqrt(1 - 3 * lam / 4) * np.eye(2, dtype=complex),
        np.sqrt(lam / 4) * x,
        np.sqrt(lam / 4) * y,
        np.sqrt(lam / 4) * z,
    )
    return KrausChannel(ChannelKind.DEPOLARIZING, lam, ops)


def amplitude_damping(gamma: float) -> KrausChannel:
    """Decay |1> -> |0> with probability gamma."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"damping parameter must be in [0, 1], got {gamma}")
    a1 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex)
    a2 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)
    return KrausChannel(ChannelKind.AMPLITUDE_DAMPING, gamma, (a1, a2))


def coherent_x(angle: float) -> KrausChannel:
    """Unintended Rx(angle) rotation, as a single-element Kraus channel."""
    if not -np.pi <= angle <= np.pi:
        raise ValueError(f"coherent angle must be in [-pi, pi], got {angle}")
    return KrausChannel(ChannelKind.COHERENT_X, angle, (rx_matrix(angle),))


def coherent_z(angle: float) -> KrausChannel:
    """Unintended Rz(angle) rotation, as a single-element Kraus channel."""
    if not -np.pi <= angle <= np.pi:
        raise ValueError(f"coherent angle must be in [-pi, pi], got {angle}")
    return KrausChannel(ChannelKind.COHERENT_Z, angle, (rz_matrix(angle),))


def make_channel(kind: ChannelKind, param: float) -> KrausChannel:
    if kind is ChannelKind.DEPOLARIZING:
        return depolarizing(param)
    if kind is ChannelKind.AMPLITUDE_DAMPING:
        return amplitude_damping(param)
    if kind is ChannelKind.COHERENT_X:
        return coherent_x(param)
    return coherent_z(param)


# ---------------------------------------------------------------------------
# State constructors


def zero_state(n_qubits: int) -> DensityMatrix:
    """|0...0><0...0| on n_qubits."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    d = 2**n_qubits
    data = np.zeros((d, d), dtype=complex)
    data[0, 0] = 1.0
    return DensityMatrix(n_qubits, data)


def maximally_mixed(n_qubits: int) -> DensityMatrix:
    """I / 2^n."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    d = 2**n_qubits
    return DensityMatrix(n_qubits, np.eye(d, dtype=complex) / d)


# ---------------------------------------------------------------------------
# Operator embedding and application


def embed_operator(op: np.ndarray, targets: Sequence[int], n_qubits: int) -> np.ndarray:
    """Embed a k-qubit operator on `targets` into the full 2^n space."""
    k = len(targets)
    if len(set(targets)) != k:
        raise ValueError(f"targets must be distinct, got {targets}")
    for q in targets:
        if not 0 <= q < n_qubits:
            raise ValueError(f"target {q} out of range for {n_qubits} qubits")
    if op.shape != (2**k, 2**k):
        raise ValueError(f"operator shape {op.shape} does not match {k} targets")
    if k == n_qubits and tuple(targets) == tuple(range(n_qubits)):
        return op
    rest = [q for q in range(n_qubits) if q not in targets]
    big = np.kron(op, np.eye(2 ** len(rest), dtype=complex))
    # `big` acts on qubits ordered [targets..., rest...]; permute the basis back
    # to standard qubit order (qubit 0 = MSB).
    order = list(targets) + rest
    dim = 2**n_qubits
    sigma = np.zeros(dim, dtype=int)
    for i in range(dim):
        bits = [(i >> (n_qubits - 1 - q)) & 1 for q in range(n_qubits)]
        j = 0
        for pos, q in enumerate(order):
            j |= bits[q] << (n_qubits - 1 - pos)
        sigma[i] = j
    return big[np.ix_(sigma, sigma)]


def apply_unitary(
    rho: DensityMatrix, u: Unitary, targets: Sequence[int]
) -> DensityMatrix:
    """rho -> U rho U^dag with U embedded on `targets`."""
    if len(targets) != u.n_targets:
        raise ValueError(
            f"unitary acts on {u.n_targets} qubits but got targets {targets}"
        )
    full = embed_operator(u.data, targets, rho.n_qubits)
    return DensityMatrix(rho.n_qubits, full @ rho.data @ full.conj().T)


def apply_channel(rho: DensityMatrix, ch: KrausChannel, target: int) -> DensityMatrix:
    """rho -> sum_i A_i rho A_i^dag with operators embedded on `target`."""
    out = np.zeros_like(rho.data)
    for a in ch.operators:
        full = embed_operator(a, (target,), rho.n_qubits)
        out += full @ rho.data @ full.conj().T
    return DensityMatrix(rho.n_qubits, out)


# ---------------------------------------------------------------------------
# Metrics


def _check_same_dim(a: DensityMatrix, b: DensityMatrix) -> None:
    if a.n_qubits != b.n_qubits:
        raise ValueError(
            f"dimension mismatch: {a.n_qubits} vs {b.n_qubits} qubits"
        )


def _clamped_eigvalsh(m: np.ndarray, what: str) -> np.ndarray:
    vals = np.linalg.eigvalsh(m)
    worst = vals.min()
    if worst < -PSD_TOL:
        logger.warning(
            "%s has eigenvalue %.3e below -%g; clamping to 0", what, worst, PSD_TOL
        )
    return np.clip(vals, 0.0, None)


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """0.5 * sum |eigenvalues of (a - b)|."""
    _check_same_dim(a, b)
    diff = a.data - b.data
    vals = np.linalg.eigvalsh(diff)
    return float(0.5 * np.sum(np.abs(vals)))


def fidelity(a: DensityMatrix, b: DensityMatrix) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(a) b sqrt(a)))^2."""
    _check_same_dim(a, b)
    vals_a = _clamped_eigvalsh(a.data, "fidelity input")
    vecs = np.linalg.eigh(a.data)[1]
    sqrt_a = (vecs * np.sqrt(vals_a)) @ vecs.conj().T
    inner = _clamped_eigvalsh(sqrt_a @ b.data @ sqrt_a, "fidelity inner product")
    f = float(np.sum(np.sqrt(inner)) ** 2)
    return float(np.clip(f, 0.0, 1.0))


def computational_probabilities(rho: DensityMatrix) -> np.ndarray:
    """Real diagonal of the density matrix (basis-state probabilities)."""
    return np.real(np.diag(rho.data)).copy()
