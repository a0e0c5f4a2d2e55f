import numpy as np
import pytest

from noisimrl.circuits import composite_unitary, rx, rz, schedule
from noisimrl.dm import zero_state
from noisimrl.transpile import (
    H_MATRIX,
    X_MATRIX,
    SourceGate,
    build_grover_11,
    build_qft,
    ccx,
    circuit_stats,
    cnot,
    cu1,
    decompose_1q,
    h,
    source_unitary,
    swap,
    transpile,
    u1,
    u1_matrix,
    x,
)


def haar_unitary(rng):
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def assert_proportional(a, b, atol=1e-8):
    overlap = abs(np.trace(a.conj().T @ b))
    assert abs(overlap - a.shape[0]) < atol


CNOT_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
SWAP_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


def toffoli_matrix():
    m = np.eye(8, dtype=complex)
    m[6, 6] = m[7, 7] = 0
    m[6, 7] = m[7, 6] = 1
    return m


class TestSourceGates:
    def test_arity_validation(self):
        with pytest.raises(ValueError):
            SourceGate("h", (0, 1))
        with pytest.raises(ValueError):
            SourceGate("cnot", (1, 1))
        with pytest.raises(ValueError):
            SourceGate("bogus", (0,))

    def test_cnot_unitary(self):
        np.testing.assert_allclose(source_unitary([cnot(0, 1)], 2), CNOT_MATRIX, atol=1e-12)

    def test_swap_unitary(self):
        np.testing.assert_allclose(source_unitary([swap(0, 1)], 2), SWAP_MATRIX, atol=1e-12)

    def test_cu1_unitary(self):
        theta = 0.7
        expected = np.diag([1, 1, 1, np.exp(1j * theta)])
        np.testing.assert_allclose(source_unitary([cu1(0, 1, theta)], 2), expected, atol=1e-10)

    def test_cu1_symmetric_in_qubits(self):
        np.testing.assert_allclose(
            source_unitary([cu1(0, 1, 0.9)], 2),
            source_unitary([cu1(1, 0, 0.9)], 2),
            atol=1e-10,
        )

    def test_toffoli_unitary(self):
        np.testing.assert_allclose(
            source_unitary([ccx(0, 1, 2)], 3), toffoli_matrix(), atol=1e-10
        )


class TestDecompose1q:
    def test_identity_is_empty(self):
        assert decompose_1q(np.eye(2, dtype=complex), 0) == []
        assert decompose_1q(1j * np.eye(2, dtype=complex), 0) == []

    def test_diagonal_is_single_rz(self):
        gates = decompose_1q(u1_matrix(0.8), 0)
        assert len(gates) == 1
        assert gates[0].kind.value == "rz"
        assert gates[0].angle == pytest.approx(0.8)

    def test_hadamard_is_three_gates(self):
        gates = decompose_1q(H_MATRIX, 0)
        assert len(gates) == 3
        kinds = [g.kind.value for g in gates]
        assert kinds == ["rz", "rx", "rz"]

    def test_random_unitaries(self, rng):
        for _ in range(100):
            u = haar_unitary(rng)
            gates = decompose_1q(u, 0)
            assert len(gates) <= 5
            acc = np.eye(2, dtype=complex)
            for g in gates:
                assert g.kind.value in ("rx", "rz")
                if g.kind.value == "rx":
                    assert g.angle == pytest.approx(np.pi / 2)
                acc = g.unitary().data @ acc
            assert_proportional(u, acc)

    def test_x_gate(self):
        gates = decompose_1q(X_MATRIX, 0)
        acc = np.eye(2, dtype=complex)
        for g in gates:
            acc = g.unitary().data @ acc
        assert_proportional(X_MATRIX, acc)


class TestTranspile:
    def test_native_circuit_passes_through(self):
        c = schedule([rx(0, np.pi / 2), rz(1, 0.3)], 2)
        out = transpile(c, 2)
        assert [g for m in out.moments for g in m.gates] == [
            g for m in c.moments for g in m.gates
        ]

    def test_native_gateops_in_list_pass_through(self):
        out = transpile([rx(0, np.pi / 2), h(0)], 1)
        assert out.gates()[0] == rx(0, np.pi / 2)

    @pytest.mark.parametrize(
        "gates,n",
        [
            ([h(0)], 1),
            ([x(0), u1(0, 1.1)], 1),
            ([cnot(0, 1)], 2),
            ([swap(0, 1)], 2),
            ([cu1(0, 1, 0.6)], 2),
            ([ccx(0, 1, 2)], 3),
        ],
        ids=["h", "x-u1", "cnot", "swap", "cu1", "ccx"],
    )
    def test_equivalence_single_gates(self, gates, n):
        circuit = transpile(gates, n)
        assert_proportional(source_unitary(gates, n), composite_unitary(circuit))

    def test_random_source_programs(self, rng):
        makers = [
            lambda r: h(int(r.integers(3))),
            lambda r: x(int(r.integers(3))),
            lambda r: u1(int(r.integers(3)), float(r.uniform(0, 2 * np.pi))),
            lambda r: cu1(*_pair(r), float(r.uniform(0, 2 * np.pi))),
            lambda r: cnot(*_pair(r)),
            lambda r: swap(*_pair(r)),
        ]
        for _ in range(25):
            gates = [makers[int(rng.integers(len(makers)))](rng) for _ in range(8)]
            circuit = transpile(gates, 3)
            assert_proportional(source_unitary(gates, 3), composite_unitary(circuit))
            for g in circuit.gates():
                if g.kind.value == "rx":
                    assert g.angle == pytest.approx(np.pi / 2)

    def test_out_of_range_qubit(self):
        with pytest.raises(ValueError):
            transpile([h(2)], 2)


def _pair(rng):
    p = rng.choice(3, size=2, replace=False)
    return int(p[0]), int(p[1])


class TestBuilders:
    def test_qft_on_zero_is_uniform(self):
        u = composite_unitary(transpile(build_qft(3), 3))
        rho = u @ zero_state(3).data @ u.conj().T
        np.testing.assert_allclose(np.diag(rho).real, np.full(8, 1 / 8), atol=1e-10)

    def test_qft_matches_dft_matrix(self):
        # without final swaps the QFT unitary is the DFT matrix with
        # bit-reversed rows
        n = 3
        dim = 2**n
        omega = np.exp(2j * np.pi / dim)
        dft = np.array([[omega ** (j * k) for k in range(dim)] for j in range(dim)])
        dft /= np.sqrt(dim)
        rev = [int(format(i, f"0{n}b")[::-1], 2) for i in range(dim)]
        expected = dft[rev, :]
        got = composite_unitary(transpile(build_qft(3), 3))
        overlap = abs(np.trace(expected.conj().T @ got))
        assert abs(overlap - dim) < 1e-7

    def test_grover_finds_11(self):
        u = composite_unitary(transpile(build_grover_11(), 3))
        rho = u @ zero_state(3).data @ u.conj().T
        probs = np.diag(rho).real
        # marginal over the two search qubits (qubit 0 is the MSB)
        marginal = probs.reshape(4, 2).sum(axis=1)
        np.testing.assert_allclose(marginal, [0, 0, 0, 1], atol=1e-10)

    def test_stats_reported(self):
        qft = circuit_stats(transpile(build_qft(3), 3))
        grover = circuit_stats(transpile(build_grover_11(), 3))
        assert qft["n_cz"] == 6
        assert grover["n_cz"] == 12  # two Toffolis at six CZ each
        assert qft["n_gates"] < 60
        assert grover["n_gates"] < 90
