"""Clifford-group machinery: Pauli algebra, stabilizer tableaux, uniformly
random Clifford sampling, and synthesis into the native gate set.

A Pauli operator on n qubits is stored as i^phase * prod_q X_q^x[q] Z_q^z[q]
(factors ordered by qubit, X before Z). A tableau stores the images of the
2n generators X_0..X_{n-1}, Z_0..Z_{n-1} under conjugation by a Clifford
unitary; composing a circuit gate by gate updates those images.

Native Clifford gates are Rz and Rx with angles that are multiples of pi/2,
plus CZ. Synthesis reduces a tableau to the identity with such gates and
returns the reversed, inverted gate list.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from noisimrl.circuits import Circuit, GateKind, GateOp, cz, rx, rz, schedule
from noisimrl.errors import DataError

HALF_PI = np.pi / 2


@dataclass
class Pauli:
    """i^phase * prod_q X^x[q] Z^z[q]; phase is mod 4."""

    x: np.ndarray
    z: np.ndarray
    phase: int = 0

    @classmethod
    def identity(cls, n: int) -> "Pauli":
        return cls(np.zeros(n, dtype=bool), np.zeros(n, dtype=bool), 0)

    @classmethod
    def single(cls, n: int, q: int, axis: str, phase: int = 0) -> "Pauli":
        p = cls.identity(n)
        if axis in ("x", "y"):
            p.x[q] = True
        if axis in ("z", "y"):
            p.z[q] = True
        p.phase = (phase + (1 if axis == "y" else 0)) % 4
        return p

    def copy(self) -> "Pauli":
        return Pauli(self.x.copy(), self.z.copy(), self.phase)

    def __mul__(self, other: "Pauli") -> "Pauli":
        # X^x1 Z^z1 * X^x2 Z^z2 picks up (-1)^(z1 . x2) when commuting X2 past Z1.
        phase = (self.phase + other.phase + 2 * int(np.sum(self.z & other.x))) % 4
        return Pauli(self.x ^ other.x, self.z ^ other.z, phase)

    @property
    def sign(self) -> int:
        """+1 or -1 for a Hermitian Pauli (phase minus one i per Y factor)."""
        n_y = int(np.sum(self.x & self.z))
        residual = (self.phase - n_y) % 4
        if residual == 0:
            return 1
        if residual == 2:
            return -1
        raise DataError("Pauli is not Hermitian")

    def commutes_with(self, other: "Pauli") -> bool:
        t = int(np.sum(self.x & other.z)) + int(np.sum(self.z & other.x))
        return t % 2 == 0

    def matrix(self) -> np.ndarray:
        eye = np.eye(2, dtype=complex)
        sx = np.array([[0, 1], [1, 0]], dtype=complex)
        sz = np.diag([1.0, -1.0]).astype(complex)
        out = np.array([[1.0]], dtype=complex)
        for xq, zq in zip(self.x, self.z):
            local = eye.copy()
            if xq:
                local = local @ sx
            if zq:
                local = local @ sz
            out = np.kron(out, local)
        return (1j**self.phase) * out


# Images of X and Z under conjugation by single-qubit native Clifford gates,
# keyed by (gate kind, angle as a multiple of pi/2). Entries are
# (axis, phase) pairs in the Pauli.single convention.
_SINGLE_QUBIT_RULES = {
    (GateKind.RZ, 1): (("y", 0), ("z", 0)),   # S:   X -> Y,  Z -> Z
    (GateKind.RZ, 2): (("x", 2), ("z", 0)),   # Z:   X -> -X
    (GateKind.RZ, 3): (("y", 2), ("z", 0)),   # S†:  X -> -Y
    (GateKind.RX, 1): (("x", 0), ("y", 2)),   # √X:  Z -> -Y
    (GateKind.RX, 2): (("x", 0), ("z", 2)),   # X:   Z -> -Z
    (GateKind.RX, 3): (("x", 0), ("y", 0)),   # √X†: Z -> Y
}


def _angle_quarter_turns(angle: float, tol: float = 1e-9) -> int:
    k = round(angle / HALF_PI)
    if abs(angle - k * HALF_PI) > tol:
        raise ValueError(f"angle {angle} is not a multiple of pi/2; not Clifford")
    return k % 4


def conjugate_pauli(p: Pauli, gate: GateOp) -> Pauli:
    """Image g p g† of a Pauli under conjugation by a native Clifford gate."""
    n = len(p.x)
    out = Pauli.identity(n)
    out.phase = p.phase
    for q in range(n):
        for is_z in (False, True):
            if (p.z[q] if is_z else p.x[q]):
                out = out * _generator_image(n, q, is_z, gate)
    return out


def _generator_image(n: int, q: int, is_z: bool, gate: GateOp) -> Pauli:
    if gate.kind is GateKind.CZ:
        a, b = gate.qubits
        if q in (a, b) and not is_z:
            other = b if q == a else a
            return Pauli.single(n, q, "x") * Pauli.single(n, other, "z")
        return Pauli.single(n, q, "z" if is_z else "x")
    (gq,) = gate.qubits
    if q != gq:
        return Pauli.single(n, q, "z" if is_z else "x")
    k = _angle_quarter_turns(gate.angle)
    if k == 0:
        return Pauli.single(n, q, "z" if is_z else "x")
    img_x, img_z = _SINGLE_QUBIT_RULES[(gate.kind, k)]
    axis, phase = img_z if is_z else img_x
    return Pauli.single(n, q, axis, phase)


class CliffordTableau:
    """Images of the 2n Pauli generators under a Clifford conjugation map.

    rows[i] is the image of X_i for i < n and of Z_{i-n} for i >= n.
    """

    def __init__(self, n: int, rows=None):
        self.n = n
        if rows is None:
            rows = [Pauli.single(n, q, "x") for q in range(n)] + [
                Pauli.single(n, q, "z") for q in range(n)
            ]
        self.rows = rows

    def copy(self) -> "CliffordTableau":
        return CliffordTableau(self.n, [r.copy() for r in self.rows])

    def x_row(self, q: int) -> Pauli:
        return self.rows[q]

    def z_row(self, q: int) -> Pauli:
        return self.rows[self.n + q]

    def apply_gate(self, gate: GateOp) -> None:
        self.rows = [conjugate_pauli(r, gate) for r in self.rows]

    def is_identity(self) -> bool:
        return self == CliffordTableau(self.n)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CliffordTableau) or self.n != other.n:
            return NotImplemented
        return all(
            np.array_equal(a.x, b.x)
            and np.array_equal(a.z, b.z)
            and a.phase == b.phase
            for a, b in zip(self.rows, other.rows)
        )

    def symplectic(self) -> np.ndarray:
        """2n x 2n GF(2) matrix; row i is [x-bits | z-bits] of rows[i]."""
        m = np.zeros((2 * self.n, 2 * self.n), dtype=np.uint8)
        for i, r in enumerate(self.rows):
            m[i, : self.n] = r.x
            m[i, self.n :] = r.z
        return m

    @classmethod
    def from_symplectic(cls, m: np.ndarray, signs=None) -> "CliffordTableau":
        n = m.shape[0] // 2
        rows = []
        for i in range(2 * n):
            x = m[i, :n].astype(bool)
            z = m[i, n:].astype(bool)
            n_y = int(np.sum(x & z))
            neg = bool(signs[i]) if signs is not None else False
            rows.append(Pauli(x, z, (n_y + (2 if neg else 0)) % 4))
        return cls(n, rows)

    @classmethod
    def from_circuit(cls, circuit: Circuit) -> "CliffordTableau":
        t = cls(circuit.n_qubits)
        for moment in circuit.moments:
            for g in moment.gates:
                t.apply_gate(g)
        return t


# ---------------------------------------------------------------------------
# Uniform random tableau sampling (symplectic basis construction over GF(2))


def _gf2_nullspace(a: np.ndarray) -> np.ndarray:
    """Basis (rows) of the nullspace of a over GF(2)."""
    a = a.copy() % 2
    n_rows, n_cols = a.shape
    pivots = []
    r = 0
    for c in range(n_cols):
        rows_with_one = [i for i in range(r, n_rows) if a[i, c]]
        if not rows_with_one:
            continue
        a[[r, rows_with_one[0]]] = a[[rows_with_one[0], r]]
        for i in range(n_rows):
            if i != r and a[i, c]:
                a[i] ^= a[r]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(n_cols, dtype=np.uint8)
        v[f] = 1
        for i, c in enumerate(pivots):
            if a[i, f]:
                v[c] = 1
        basis.append(v)
    return np.array(basis, dtype=np.uint8).reshape(len(basis), n_cols)


def _symplectic_product(u: np.ndarray, v: np.ndarray, n: int) -> int:
    return int(u[:n] @ v[n:] + u[n:] @ v[:n]) % 2


def random_symplectic(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniformly random element of Sp(2n, 2), built as a random symplectic basis."""
    basis = np.eye(2 * n, dtype=np.uint8)  # rows span the current complement
    pairs = []
    for _ in range(n):
        dim = basis.shape[0]
        gram = np.zeros((dim, dim), dtype=np.uint8)
        for r in range(dim):
            for s in range(dim):
                gram[r, s] = _symplectic_product(basis[r], basis[s], n)
        c = np.zeros(dim, dtype=np.uint8)
        while not c.any():
            c = rng.integers(0, 2, size=dim, dtype=np.uint8)
        a = (c @ basis) % 2
        w = (c @ gram) % 2  # <a, basis . d> = w . d
        pivot = int(np.flatnonzero(w)[0])
        d = rng.integers(0, 2, size=dim, dtype=np.uint8)
        d[pivot] = (1 + int(w @ d) - int(w[pivot] * d[pivot])) % 2
        b = (d @ basis) % 2
        pairs.append((a, b))
        v = (d @ gram) % 2
        null = _gf2_nullspace(np.vstack([w, v]))
        basis = (null @ basis) % 2
    m = np.zeros((2 * n, 2 * n), dtype=np.uint8)
    for i, (a, b) in enumerate(pairs):
        m[i] = a
        m[n + i] = b
    return m


def random_tableau(n: int, rng: np.random.Generator) -> CliffordTableau:
    """Uniformly random Clifford tableau: random symplectic part, random signs."""
    m = random_symplectic(n, rng)
    signs = rng.integers(0, 2, size=2 * n)
    return CliffordTableau.from_symplectic(m, signs)


def symplectic_inverse(m: np.ndarray) -> np.ndarray:
    n = m.shape[0] // 2
    omega = np.zeros_like(m)
    omega[:n, n:] = np.eye(n, dtype=m.dtype)
    omega[n:, :n] = np.eye(n, dtype=m.dtype)
    return (omega @ m.T @ omega) % 2


# ---------------------------------------------------------------------------
# Synthesis: tableau -> native gate list


def _h_gates(q: int) -> list:
    # H = Rz(pi/2) Rx(pi/2) Rz(pi/2) up to global phase
    return [rz(q, HALF_PI), rx(q, HALF_PI), rz(q, HALF_PI)]


def _cx_gates(c: int, t: int) -> list:
    return _h_gates(t) + [cz(c, t)] + _h_gates(t)


def _swap_gates(a: int, b: int) -> list:
    return _cx_gates(a, b) + _cx_gates(b, a) + _cx_gates(a, b)


def _invert_gate(g: GateOp) -> GateOp:
    if g.kind is GateKind.CZ:
        return g
    return GateOp(g.kind, g.qubits, -g.angle)


def synthesize_tableau(tableau: CliffordTableau) -> list:
    """Native gate list whose circuit has exactly this tableau (incl. signs)."""
    t = tableau.copy()
    n = t.n
    applied: list[GateOp] = []

    def emit(gates):
        for g in gates:
            t.apply_gate(g)
            applied.append(g)

    for i in range(n):
        # Reduce the image of X_i to +-X_i.
        p = t.x_row(i)
        for j in range(i, n):
            if t.x_row(i).z[j]:
                emit([rz(j, HALF_PI)] if t.x_row(i).x[j] else _h_gates(j))
        supp = list(np.flatnonzero(t.x_row(i).x))
        pivot = i if i in supp else supp[0]
        for j in supp:
            if j != pivot:
                emit(_cx_gates(pivot, j))
        if pivot != i:
            emit(_swap_gates(i, pivot))

        # Reduce the image of Z_i to +-Z_i, keeping X_i fixed.
        if t.z_row(i).x[i]:
            emit([rx(i, HALF_PI)])  # Y_i -> Z_i, X_i untouched
        for j in range(i + 1, n):
            q = t.z_row(i)
            if q.z[j]:
                emit([rz(j, HALF_PI)] if q.x[j] else _h_gates(j))
        supp = [j for j in np.flatnonzero(t.z_row(i).x) if j > i]
        if supp:
            pivot = supp[0]
            for j in supp[1:]:
                emit(_cx_gates(pivot, j))
            emit(_h_gates(pivot))
            emit(_cx_gates(pivot, i))

        # Fix the signs with Pauli gates.
        if t.x_row(i).sign < 0:
            emit([rz(i, np.pi)])
        if t.z_row(i).sign < 0:
            emit([rx(i, np.pi)])

    if not t.is_identity():
        raise DataError("tableau synthesis failed to reach the identity")
    return [_invert_gate(g) for g in reversed(applied)]


def tableau_to_circuit(tableau: CliffordTableau) -> Circuit:
    return schedule(synthesize_tableau(tableau), tableau.n)


# ---------------------------------------------------------------------------
# The 24-element single-qubit Clifford group


def _canonical_key(u: np.ndarray) -> tuple:
    flat = u.flatten()
    mags = np.abs(flat)
    # First entry whose magnitude ties the maximum, so that the phase gauge is
    # stable under floating-point noise.
    idx = int(np.flatnonzero(mags > mags.max() - 1e-6)[0])
    u = u / (flat[idx] / mags[idx])
    key = np.round(u.flatten(), 9) + 0.0  # normalize -0.0 to 0.0
    return tuple(key.tolist())


def _build_clifford_1q():
    generators = [
        rz(0, HALF_PI),
        rz(0, np.pi),
        rz(0, 3 * HALF_PI),
        rx(0, HALF_PI),
        rx(0, np.pi),
        rx(0, 3 * HALF_PI),
    ]
    elements = {_canonical_key(np.eye(2, dtype=complex)): []}
    frontier = [(np.eye(2, dtype=complex), [])]
    while frontier:
        nxt = []
        for mat, seq in frontier:
            for g in generators:
                new = g.unitary().data @ mat
                key = _canonical_key(new)
                if key not in elements:
                    elements[key] = seq + [g]
                    nxt.append((new, seq + [g]))
        frontier = nxt
    table = []
    for key, seq in elements.items():
        mat = np.eye(2, dtype=complex)
        for g in seq:
            mat = g.unitary().data @ mat
        table.append((key, mat, tuple(seq)))
    table.sort(key=lambda e: (len(e[2]), str(e[0])))
    return table


_CLIFFORD_1Q = None


def clifford_1q_table():
    """(canonical key, unitary, native gate sequence) for all 24 elements."""
    global _CLIFFORD_1Q
    if _CLIFFORD_1Q is None:
        _CLIFFORD_1Q = _build_clifford_1q()
    return _CLIFFORD_1Q


def invert_clifford_1q(u: np.ndarray) -> tuple:
    """Native gate sequence implementing u^{-1}, up to global phase."""
    key = _canonical_key(u.conj().T)
    for k, _, seq in clifford_1q_table():
        if k == key:
            return seq
    raise DataError("matrix is not a single-qubit Clifford element")
