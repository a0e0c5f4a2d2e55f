import numpy as np
import pytest

from noisimrl.circuits import (
    Circuit,
    GateKind,
    Moment,
    cz,
    decode_qcr,
    encode_qcr,
    rx,
    rz,
    schedule,
    window,
)
from noisimrl.errors import DataError


def random_circuit(n_qubits, depth, rng):
    gates = []
    for _ in range(depth * n_qubits):
        if n_qubits > 1 and rng.random() < 0.2:
            pair = rng.choice(n_qubits, size=2, replace=False)
            gates.append(cz(int(pair[0]), int(pair[1])))
        else:
            q = int(rng.integers(n_qubits))
            angle = float(rng.uniform(0, 2 * np.pi))
            gates.append(rx(q, angle) if rng.random() < 0.5 else rz(q, angle))
    return schedule(gates, n_qubits)


class TestGateOp:
    def test_cz_sorts_qubits(self):
        assert cz(2, 0).qubits == (0, 2)

    def test_cz_rejects_duplicates(self):
        with pytest.raises(ValueError):
            cz(1, 1)

    def test_angle_normalization(self):
        assert rz(0, -np.pi / 2).angle == pytest.approx(3 * np.pi / 2)
        assert rx(0, 2 * np.pi).angle == 0.0


class TestSchedule:
    def test_disjoint_qubits_share_moment(self):
        c = schedule([rx(0, 1.0), rz(1, 2.0)], 2)
        assert c.depth == 1

    def test_same_qubit_splits(self):
        c = schedule([rx(0, 1.0), rz(0, 2.0)], 1)
        assert c.depth == 2

    def test_cz_occupies_both(self):
        c = schedule([cz(0, 1), rx(0, 1.0), rx(1, 1.0)], 2)
        assert c.depth == 2
        assert len(c.moments[1].gates) == 2

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            schedule([rx(3, 1.0)], 2)

    def test_no_double_occupancy(self, rng):
        for _ in range(50):
            c = random_circuit(3, 8, rng)
            for m in c.moments:
                seen = [q for g in m.gates for q in g.qubits]
                assert len(seen) == len(set(seen))


class TestQCR:
    def test_worked_example(self):
        # Two-qubit circuit: moment 1 = Rx(pi) on q0 + Coh_x(0.1) on q1;
        # moment 2 = CZ with Dep(0.1) on q0, Dam(0.2) on q1;
        # moment 3 = Rz(pi/2) on q1 with Coh_z(0.05).
        m1 = Moment(2, [rx(0, np.pi)])
        m1.noise[1, 3] = 0.1
        m2 = Moment(2, [cz(0, 1)])
        m2.noise[0, 0] = 0.1
        m2.noise[1, 1] = 0.2
        m3 = Moment(2, [rz(1, np.pi / 2)])
        m3.noise[1, 2] = 0.05
        t = encode_qcr(Circuit(2, [m1, m2, m3]))
        np.testing.assert_allclose(t[0, 0], [0, 1, 0, 0.5, 0, 0, 0, 0])
        np.testing.assert_allclose(t[1, 0], [0, 0, 0, 0, 0, 0, 0, 0.1])
        np.testing.assert_allclose(t[0, 1], [0, 0, 1, 0, 0.1, 0, 0, 0])
        np.testing.assert_allclose(t[1, 1], [0, 0, 1, 0, 0, 0.2, 0, 0])
        np.testing.assert_allclose(t[0, 2], [0, 0, 0, 0, 0, 0, 0, 0])
        np.testing.assert_allclose(t[1, 2], [1, 0, 0, 0.25, 0, 0, 0.05, 0])

    def test_empty_moment_is_zero_row(self):
        t = encode_qcr(Circuit(1, [Moment(1)]))
        np.testing.assert_allclose(t, 0.0)

    def test_roundtrip_random(self, rng):
        for n_qubits in (1, 3):
            for _ in range(100):
                c = random_circuit(n_qubits, 6, rng)
                t = encode_qcr(c)
                np.testing.assert_allclose(encode_qcr(decode_qcr(t)), t, atol=0)

    def test_decode_all_zero(self):
        c = decode_qcr(np.zeros((2, 4, 8)))
        assert c.depth == 4
        assert c.n_gates() == 0

    def test_decode_rejects_two_gate_bits(self):
        t = np.zeros((1, 1, 8))
        t[0, 0, 0] = 1
        t[0, 0, 2] = 1
        with pytest.raises(DataError):
            decode_qcr(t)

    def test_decode_rejects_lone_cz(self):
        t = np.zeros((2, 1, 8))
        t[0, 0, 2] = 1
        with pytest.raises(DataError):
            decode_qcr(t)

    def test_theta_roundtrip_precision(self):
        angle = 1.2345678901234
        c = schedule([rz(0, angle)], 1)
        dec = decode_qcr(encode_qcr(c))
        assert dec.moments[0].gates[0].angle == pytest.approx(angle, abs=1e-12)


class TestWindow:
    def test_k1_is_single_slice(self, rng):
        c = random_circuit(2, 5, rng)
        t = encode_qcr(c)
        for m in range(c.depth):
            np.testing.assert_allclose(window(t, m, 1), t[:, m : m + 1, :])

    def test_boundary_zero_padding(self, rng):
        t = encode_qcr(random_circuit(2, 5, rng))
        w = window(t, 0, 3)
        np.testing.assert_allclose(w[:, 0, :], 0.0)
        np.testing.assert_allclose(w[:, 1:, :], t[:, :2, :])
        last = t.shape[1] - 1
        w = window(t, last, 3)
        np.testing.assert_allclose(w[:, 2, :], 0.0)
        np.testing.assert_allclose(w[:, :2, :], t[:, last - 1 :, :])

    def test_interior(self, rng):
        t = encode_qcr(random_circuit(2, 5, rng))
        np.testing.assert_allclose(window(t, 2, 3), t[:, 1:4, :])

    def test_invalid_args(self, rng):
        t = encode_qcr(random_circuit(1, 3, rng))
        with pytest.raises(ValueError):
            window(t, 0, 2)
        with pytest.raises(ValueError):
            window(t, t.shape[1], 1)
