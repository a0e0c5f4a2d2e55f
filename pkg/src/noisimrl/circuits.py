"""Circuit data model and the QCR tensor encoding.

A circuit is an ordered list of moments. Each moment holds gates on disjoint
qubits plus a per-qubit noise-parameter block (depolarizing strength, damping
strength, coherent-Z angle, coherent-X angle; zero means "no channel").

The QCR encoding of a circuit is a real [n_qubits, depth, 8] tensor with the
per-(qubit, moment) layout [Rz, Rx, CZ, theta/2pi, Dep, Dam, Coh_z, Coh_x].
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from noisimrl import dm
from noisimrl.errors import DataError

TWO_PI = 2.0 * np.pi

# Column indices of the QCR encoding axis.
ENC_RZ, ENC_RX, ENC_CZ, ENC_THETA = 0, 1, 2, 3
ENC_DEP, ENC_DAM, ENC_COH_Z, ENC_COH_X = 4, 5, 6, 7
ENC_DIM = 8

# Column indices of a moment's per-qubit noise block (and of noise actions).
NOISE_DEP, NOISE_DAM, NOISE_COH_Z, NOISE_COH_X = 0, 1, 2, 3


class GateKind(Enum):
    RX = "rx"
    RZ = "rz"
    CZ = "cz"


def normalize_angle(theta: float) -> float:
    theta = float(theta) % TWO_PI
    return 0.0 if abs(theta - TWO_PI) < 1e-15 else theta


@dataclass(frozen=True)
class GateOp:
    kind: GateKind
    qubits: tuple
    angle: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        if self.kind is GateKind.CZ:
            if len(self.qubits) != 2 or self.qubits[0] == self.qubits[1]:
                raise ValueError(f"CZ needs 2 distinct qubits, got {self.qubits}")
            object.__setattr__(self, "qubits", tuple(sorted(self.qubits)))
            object.__setattr__(self, "angle", 0.0)
        else:
            if len(self.qubits) != 1:
                raise ValueError(
                    f"{self.kind.value} needs exactly 1 qubit, got {self.qubits}"
                )
            object.__setattr__(self, "angle", normalize_angle(self.angle))

    def unitary(self) -> dm.Unitary:
        if self.kind is GateKind.RX:
            return dm.Unitary(1, dm.rx_matrix(self.angle))
        if self.kind is GateKind.RZ:
            return dm.Unitary(1, dm.rz_matrix(self.angle))
        return dm.Unitary(2, dm.CZ_MATRIX)


def rx(q: int, angle: float) -> GateOp:
    return GateOp(GateKind.RX, (q,), angle)


def rz(q: int, angle: float) -> GateOp:
    return GateOp(GateKind.RZ, (q,), angle)


def cz(a: int, b: int) -> GateOp:
    return GateOp(GateKind.CZ, (a, b))


@dataclass
class Moment:
    """Gates on disjoint qubits plus per-qubit noise parameters."""

    n_qubits: int
    gates: list = field(default_factory=list)
    noise: np.ndarray = None

    def __post_init__(self):
        if self.noise is None:
            self.noise = np.zeros((self.n_qubits, 4))
        self.noise = np.asarray(self.noise, dtype=float)
        occupied = set()
        for g in self.gates:
            for q in g.qubits:
                if q in occupied:
                    raise ValueError(f"qubit {q} occupied twice in one moment")
                if not 0 <= q < self.n_qubits:
                    raise ValueError(f"qubit {q} out of range")
                occupied.add(q)

    def gate_on(self, q: int):
        for g in self.gates:
            if q in g.qubits:
                return g
        return None

    def copy(self) -> "Moment":
        return Moment(self.n_qubits, list(self.gates), self.noise.copy())


@dataclass
class Circuit:
    n_qubits: int
    moments: list = field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.moments)

    def gates(self) -> list:
        return [g for m in self.moments for g in m.gates]

    def n_gates(self) -> int:
        return len(self.gates())

    def copy(self) -> "Circuit":
        return Circuit(self.n_qubits, [m.copy() for m in self.moments])

    def has_noise(self) -> bool:
        return any(np.any(m.noise != 0.0) for m in self.moments)


def schedule(gates, n_qubits: int) -> Circuit:
    """ASAP scheduling: each gate goes into the earliest moment with all its
    qubits free, never jumping over an earlier gate on the same qubit."""
    moments: list[Moment] = []
    frontier = [0] * n_qubits  # first moment index each qubit is free at
    for g in gates:
        for q in g.qubits:
            if not 0 <= q < n_qubits:
                raise ValueError(f"qubit {q} out of range for {n_qubits} qubits")
        at = max(frontier[q] for q in g.qubits)
        while len(moments) <= at:
            moments.append(Moment(n_qubits))
        moments[at].gates.append(g)
        for q in g.qubits:
            frontier[q] = at + 1
    return Circuit(n_qubits, moments)


def composite_unitary(circuit: Circuit) -> np.ndarray:
    """Product of all gate unitaries (ignores noise slots). For n <= 4 only."""
    d = 2**circuit.n_qubits
    u = np.eye(d, dtype=complex)
    for moment in circuit.moments:
        for g in moment.gates:
            full = dm.embed_operator(g.unitary().data, g.qubits, circuit.n_qubits)
            u = full @ u
    return u


# ---------------------------------------------------------------------------
# QCR codec


def encode_qcr(circuit: Circuit) -> np.ndarray:
    t = np.zeros((circuit.n_qubits, circuit.depth, ENC_DIM))
    for m, moment in enumerate(circuit.moments):
        for g in moment.gates:
            if g.kind is GateKind.CZ:
                for q in g.qubits:
                    t[q, m, ENC_CZ] = 1.0
            else:
                col = ENC_RX if g.kind is GateKind.RX else ENC_RZ
                q = g.qubits[0]
                t[q, m, col] = 1.0
                t[q, m, ENC_THETA] = g.angle / TWO_PI
        t[:, m, ENC_DEP:] = moment.noise
    return t


def decode_qcr(t: np.ndarray) -> Circuit:
    t = np.asarray(t, dtype=float)
    if t.ndim != 3 or t.shape[2] != ENC_DIM:
        raise DataError(f"QCR tensor must be [qubits, depth, {ENC_DIM}], got {t.shape}")
    n_qubits, depth = t.shape[0], t.shape[1]
    moments = []
    for m in range(depth):
        gates = []
        cz_qubits = []
        for q in range(n_qubits):
            bits = t[q, m, (ENC_RZ, ENC_RX, ENC_CZ)]
            if not np.all(np.isin(bits, (0.0, 1.0))):
                raise DataError(f"non-binary gate bits at qubit {q}, moment {m}")
            if bits.sum() > 1:
                raise DataError(f"multiple gate bits set at qubit {q}, moment {m}")
            if bits[0]:
                gates.append(rz(q, t[q, m, ENC_THETA] * TWO_PI))
            elif bits[1]:
                gates.append(rx(q, t[q, m, ENC_THETA] * TWO_PI))
            elif bits[2]:
                cz_qubits.append(q)
        if len(cz_qubits) not in (0, 2):
            raise DataError(
                f"moment {m} has {len(cz_qubits)} CZ slots set; expected 0 or 2"
            )
        if cz_qubits:
            gates.append(cz(*cz_qubits))
        moments.append(Moment(n_qubits, gates, t[:, m, ENC_DEP:].copy()))
    return Circuit(n_qubits, moments)


def window(t: np.ndarray, m: int, k: int) -> np.ndarray:
    """Slice of k moments centered at m, zero-padded at the boundaries."""
    if k < 1 or k % 2 == 0:
        raise ValueError(f"window size must be odd and >= 1, got {k}")
    n_qubits, depth = t.shape[0], t.shape[1]
    if not 0 <= m < depth:
        raise ValueError(f"moment index {m} out of range for depth {depth}")
    half = (k - 1) // 2
    out = np.zeros((n_qubits, k, t.shape[2]))
    lo, hi = m - half, m + half + 1
    src_lo, src_hi = max(lo, 0), min(hi, depth)
    out[:, src_lo - lo : src_hi - lo, :] = t[:, src_lo:src_hi, :]
    return out
