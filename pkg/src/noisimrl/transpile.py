"""Transpilation from a textbook gate set to the native set {Rx(pi/2), Rz, CZ}.

Source circuits are lists of :class:`SourceGate` over the alphabet
H, X, U1(theta), CU1(theta), CNOT, SWAP and CCX (Toffoli).  Two-qubit and
three-qubit source gates are expanded into CZ plus single-qubit matrices,
maximal runs of single-qubit matrices between CZs are fused, and each fused
matrix is decomposed into at most five native rotations of the form
Rz Rx(pi/2) Rz Rx(pi/2) Rz.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from noisimrl.circuits import Circuit, GateOp, composite_unitary, rx, rz, schedule
from noisimrl.circuits import cz as native_cz
from noisimrl.errors import NumericalError

HALF_PI = np.pi / 2
ANGLE_TOL = 1e-9

H_MATRIX = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
X_MATRIX = np.array([[0, 1], [1, 0]], dtype=complex)

SOURCE_NAMES = ("h", "x", "u1", "cu1", "cnot", "swap", "ccx")


@dataclass(frozen=True)
class SourceGate:
    """A gate in the textbook alphabet, prior to transpilation."""

    name: str
    qubits: tuple
    angle: float = 0.0

    def __post_init__(self):
        if self.name not in SOURCE_NAMES:
            raise ValueError(f"unknown source gate {self.name!r}")
        arity = {"h": 1, "x": 1, "u1": 1, "cu1": 2, "cnot": 2, "swap": 2, "ccx": 3}
        if len(self.qubits) != arity[self.name]:
            raise ValueError(
                f"{self.name} expects {arity[self.name]} qubits, got {self.qubits}"
            )
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"duplicate qubits in {self.qubits}")


def h(q: int) -> SourceGate:
    return SourceGate("h", (q,))


def x(q: int) -> SourceGate:
    return SourceGate("x", (q,))


def u1(q: int, angle: float) -> SourceGate:
    return SourceGate("u1", (q,), angle)


def cu1(control: int, target: int, angle: float) -> SourceGate:
    return SourceGate("cu1", (control, target), angle)


def cnot(control: int, target: int) -> SourceGate:
    return SourceGate("cnot", (control, target))


def swap(a: int, b: int) -> SourceGate:
    return SourceGate("swap", (a, b))


def ccx(c0: int, c1: int, target: int) -> SourceGate:
    return SourceGate("ccx", (c0, c1, target))


def u1_matrix(angle: float) -> np.ndarray:
    return np.diag([1.0, np.exp(1j * angle)]).astype(complex)


def _expand(gate: SourceGate):
    """Yield ('mat', q, U) and ('cz', a, b) primitives in time order."""
    name, q = gate.name, gate.qubits
    if name == "h":
        yield ("mat", q[0], H_MATRIX)
    elif name == "x":
        yield ("mat", q[0], X_MATRIX)
    elif name == "u1":
        yield ("mat", q[0], u1_matrix(gate.angle))
    elif name == "cnot":
        yield ("mat", q[1], H_MATRIX)
        yield ("cz", q[0], q[1])
        yield ("mat", q[1], H_MATRIX)
    elif name == "swap":
        for c, t in ((q[0], q[1]), (q[1], q[0]), (q[0], q[1])):
            yield from _expand(cnot(c, t))
    elif name == "cu1":
        half = gate.angle / 2
        yield ("mat", q[0], u1_matrix(half))
        yield ("mat", q[1], u1_matrix(half))
        yield from _expand(cnot(q[0], q[1]))
        yield ("mat", q[1], u1_matrix(-half))
        yield from _expand(cnot(q[0], q[1]))
    elif name == "ccx":
        a, b, t = q
        quarter = np.pi / 4
        yield ("mat", t, H_MATRIX)
        yield from _expand(cnot(b, t))
        yield ("mat", t, u1_matrix(-quarter))
        yield from _expand(cnot(a, t))
        yield ("mat", t, u1_matrix(quarter))
        yield from _expand(cnot(b, t))
        yield ("mat", t, u1_matrix(-quarter))
        yield from _expand(cnot(a, t))
        yield ("mat", b, u1_matrix(quarter))
        yield ("mat", t, u1_matrix(quarter))
        yield ("mat", t, H_MATRIX)
        yield from _expand(cnot(a, b))
        yield ("mat", a, u1_matrix(quarter))
        yield ("mat", b, u1_matrix(-quarter))
        yield from _expand(cnot(a, b))


def _is_proportional(a: np.ndarray, b: np.ndarray, tol: float = 1e-8) -> bool:
    inner = np.trace(a.conj().T @ b)
    return abs(abs(inner) - a.shape[0]) < tol and np.allclose(
        b, inner / a.shape[0] * a, atol=tol
    )


def _zyz_angles(u: np.ndarray):
    """Euler angles (a, b, c) with u proportional to Rz(a) Ry(b) Rz(c)."""
    det = np.linalg.det(u)
    v = u * np.exp(-0.5j * np.angle(det))
    b = 2 * np.arctan2(abs(v[1, 0]), abs(v[0, 0]))
    if abs(v[0, 0]) < 1e-12:
        # pure off-diagonal: only a - c is determined
        return 2 * np.angle(v[1, 0]), b, 0.0
    if abs(v[1, 0]) < 1e-12:
        return -2 * np.angle(v[0, 0]), b, 0.0
    apc = -2 * np.angle(v[0, 0])
    amc = 2 * np.angle(v[1, 0])
    return (apc + amc) / 2, b, (apc - amc) / 2


def decompose_1q(u: np.ndarray, q: int) -> list:
    """Native gates reproducing `u` on qubit `q` up to global phase.

    Uses at most Rz, Rx(pi/2), Rz, Rx(pi/2), Rz; shorter forms (identity,
    diagonal, single-Rx sandwiches) are detected and emitted directly.
    """
    if _is_proportional(np.eye(2), u):
        return []
    if abs(u[0, 1]) < ANGLE_TOL and abs(u[1, 0]) < ANGLE_TOL:
        return [rz(q, float(np.angle(u[1, 1] / u[0, 0])))]
    gates = None
    if np.allclose(np.abs(u), 0.5**0.5, atol=1e-9):
        # u ~ Rz(a) Rx(pi/2) Rz(b): all entries have magnitude 1/sqrt(2);
        # halving the phase differences leaves a joint pi ambiguity, so try
        # both candidates
        apb = np.angle(u[1, 1]) - np.angle(u[0, 0])
        amb = np.angle(u[1, 0]) - np.angle(u[0, 1])
        a, b = (apb + amb) / 2, (apb - amb) / 2
        for aa, bb in ((a, b), (a + np.pi, b + np.pi)):
            cand = [rz(q, float(bb)), rx(q, HALF_PI), rz(q, float(aa))]
            acc = np.eye(2, dtype=complex)
            for g in cand:
                acc = g.unitary().data @ acc
            if _is_proportional(u, acc):
                gates = cand
                break
    if gates is None:
        a, b, c = _zyz_angles(u)
        # Ry(b) = Rx(3pi/2) Rz(b) Rx(pi/2); folding Rx(3pi/2) into
        # Rz(pi) Rx(pi/2) Rz(pi) keeps every Rx at +pi/2
        gates = [
            rz(q, float(c)),
            rx(q, HALF_PI),
            rz(q, float(b) + np.pi),
            rx(q, HALF_PI),
            rz(q, float(a) + np.pi),
        ]
    gates = [g for g in gates if not (g.kind.value == "rz" and _near_zero(g.angle))]
    acc = np.eye(2, dtype=complex)
    for g in gates:
        acc = g.unitary().data @ acc
    if not _is_proportional(u, acc):
        raise NumericalError("single-qubit decomposition failed verification")
    return gates


def _near_zero(angle: float) -> bool:
    return min(angle, 2 * np.pi - angle) < ANGLE_TOL


@dataclass
class _Fuser:
    """Accumulates pending single-qubit matrices and flushes them as natives."""

    pending: dict = field(default_factory=dict)
    out: list = field(default_factory=list)

    def push(self, q: int, mat: np.ndarray):
        self.pending[q] = mat @ self.pending.get(q, np.eye(2, dtype=complex))

    def flush(self, qubits):
        for q in qubits:
            if q in self.pending:
                self.out.extend(decompose_1q(self.pending.pop(q), q))


def transpile(source, n_qubits: int, verify: bool = True) -> Circuit:
    """Compile source gates (or pass through a native circuit) to native form.

    Parameters
    ----------
    source : list of SourceGate, or Circuit
        A native :class:`Circuit` is returned as an untouched copy.
    n_qubits : int
        Register width of the output circuit.
    verify : bool
        Check unitary equivalence up to global phase (|Tr(Ua^+ Ub)| = 2^n).
    """
    if isinstance(source, Circuit):
        if source.n_qubits != n_qubits:
            raise ValueError("n_qubits mismatch with native circuit")
        return source.copy()
    fuser = _Fuser()
    for gate in source:
        if isinstance(gate, GateOp):
            fuser.flush(gate.qubits)
            fuser.out.append(gate)
            continue
        if max(gate.qubits) >= n_qubits:
            raise ValueError(f"gate {gate} exceeds register of {n_qubits} qubits")
        for prim in _expand(gate):
            if prim[0] == "mat":
                fuser.push(prim[1], prim[2])
            else:
                fuser.flush((prim[1], prim[2]))
                fuser.out.append(native_cz(prim[1], prim[2]))
    fuser.flush(sorted(fuser.pending))
    circuit = schedule(fuser.out, n_qubits)
    if verify:
        verify_equivalent(source, circuit, n_qubits)
    return circuit


def source_unitary(source, n_qubits: int) -> np.ndarray:
    """Composite unitary of a source-alphabet gate list."""
    from noisimrl.dm import embed_operator

    acc = np.eye(2**n_qubits, dtype=complex)
    for gate in source:
        if isinstance(gate, GateOp):
            acc = embed_operator(gate.unitary().data, gate.qubits, n_qubits) @ acc
            continue
        for prim in _expand(gate):
            if prim[0] == "mat":
                acc = embed_operator(prim[2], (prim[1],), n_qubits) @ acc
            else:
                from noisimrl.dm import CZ_MATRIX

                acc = embed_operator(CZ_MATRIX, (prim[1], prim[2]), n_qubits) @ acc
    return acc


def verify_equivalent(source, circuit: Circuit, n_qubits: int, tol: float = 1e-7):
    """Raise NumericalError unless the two unitaries agree up to global phase."""
    ua = source_unitary(source, n_qubits)
    ub = composite_unitary(circuit)
    overlap = abs(np.trace(ua.conj().T @ ub))
    if abs(overlap - 2**n_qubits) > tol:
        raise NumericalError(
            f"transpiled circuit is not equivalent: |Tr| = {overlap:.6f}"
        )


def build_qft(n_qubits: int) -> list:
    """Quantum Fourier transform without the final qubit-reversal swaps."""
    gates = []
    for i in range(n_qubits):
        gates.append(h(i))
        for j in range(i + 1, n_qubits):
            gates.append(cu1(j, i, 2 * np.pi / 2 ** (j - i + 1)))
    return gates


def build_grover_11() -> list:
    """One Grover iteration searching |11> on qubits 0-1 with ancilla qubit 2."""
    gates = [x(2), h(0), h(1), h(2)]
    gates.append(ccx(0, 1, 2))  # oracle marks |11>
    gates += [h(0), h(1), x(0), x(1)]
    gates.append(ccx(0, 1, 2))  # diffusion reflection about |00>
    gates += [x(0), x(1), h(0), h(1)]
    return gates


def circuit_stats(circuit: Circuit) -> dict:
    """Gate, CZ and moment counts used for transpilation reports."""
    gates = circuit.gates()
    return {
        "n_gates": len(gates),
        "n_cz": sum(1 for g in gates if g.kind.value == "cz"),
        "n_moments": circuit.depth,
    }
