import json

import numpy as np
import pytest

from noisimrl.config import (
    ExperimentConfig,
    config_from_dict,
    default_config,
    load_config,
)
from noisimrl.dataset import (
    Dataset,
    circuit_from_dict,
    circuit_to_dict,
    dm_from_nested,
    dm_to_nested,
    generate_dataset,
    load_checkpoint,
    load_dataset,
    save_checkpoint,
    save_dataset,
)
from noisimrl.errors import ConfigError, DataError
from noisimrl.generators import random_circuit_3q
from noisimrl.noise import NOISE_1Q, NOISE_3Q_HIGH, apply_ground_truth
from noisimrl.policy import PolicyNetwork, PolicySpec

from conftest import random_density_matrix


class TestConfig:
    def test_defaults(self):
        c1 = default_config(1)
        assert c1.noise_model == "1q"
        assert c1.dataset.count == 100 and c1.dataset.depth == 10
        assert c1.training.episodes("desk") == 50_000
        assert c1.training.episodes("paper") == 400_000
        c3 = default_config(3)
        assert c3.dataset.count == 800
        assert c3.training.episodes("desk") == 300_000
        assert c3.training.episodes("paper") == 1_500_000
        assert c3.policy.conv_filters == 32 and c3.policy.feature_dim == 32

    def test_from_dict_overrides(self):
        cfg = config_from_dict(
            {"n_qubits": 1, "seed": 7, "dataset": {"count": 10, "depth": 5}}
        )
        assert cfg.seed == 7
        assert cfg.dataset.count == 10
        assert cfg.policy.hidden_dim == 256  # untouched default

    @pytest.mark.parametrize(
        "bad",
        [
            {},
            {"n_qubits": 4},
            {"n_qubits": 1, "noise_model": "bogus"},
            {"n_qubits": 1, "seed": "abc"},
            {"n_qubits": 1, "unknown_key": 1},
            {"n_qubits": 1, "dataset": {"bogus": 2}},
            {"n_qubits": 1, "dataset": 5},
        ],
    )
    def test_rejects_bad_configs(self, bad):
        with pytest.raises(ConfigError):
            config_from_dict(bad)

    def test_load_config_file(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"n_qubits": 3, "noise_model": "3q-low"}))
        cfg = load_config(path)
        assert isinstance(cfg, ExperimentConfig)
        assert cfg.noise_model == "3q-low"
        with pytest.raises(ConfigError):
            load_config(tmp_path / "missing.json")
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        with pytest.raises(ConfigError):
            load_config(bad)


class TestCircuitSerialization:
    def test_roundtrip_with_noise(self, rng):
        c = apply_ground_truth(random_circuit_3q(8, rng), NOISE_3Q_HIGH)
        back = circuit_from_dict(circuit_to_dict(c))
        assert back.n_qubits == c.n_qubits
        assert back.gates() == c.gates()
        for ma, mb in zip(c.moments, back.moments):
            np.testing.assert_array_equal(ma.noise, mb.noise)

    def test_malformed_raises(self):
        with pytest.raises(DataError):
            circuit_from_dict({"n_qubits": 1})

    def test_dm_roundtrip(self, rng):
        dm = random_density_matrix(2, rng)
        back = dm_from_nested(2, dm_to_nested(dm))
        np.testing.assert_allclose(back.data, dm.data, atol=0)


class TestDataset:
    def test_generate_1q(self):
        ds = generate_dataset(1, 5, 10, NOISE_1Q, seed=3)
        assert len(ds) == 5
        assert ds.kind == "clifford-1q"
        assert all(c.depth == 10 for c in ds.circuits)
        for _, t in ds.pairs():
            t.validate()

    def test_generate_3q_mixed(self):
        ds = generate_dataset(3, 4, 6, NOISE_3Q_HIGH, seed=3)
        assert ds.kind == "mixed-3q"
        assert ds.circuits[0].depth == 6  # fixed-moment entry

    def test_roundtrip_and_byte_identical(self, tmp_path):
        ds = generate_dataset(1, 4, 6, NOISE_1Q, seed=9)
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        save_dataset(ds, p1)
        save_dataset(generate_dataset(1, 4, 6, NOISE_1Q, seed=9), p2)
        assert p1.read_bytes() == p2.read_bytes()
        back = load_dataset(p1)
        assert len(back) == 4
        for (c1, t1), (c2, t2) in zip(ds.pairs(), back.pairs()):
            assert c1.gates() == c2.gates()
            np.testing.assert_array_equal(t1.data, t2.data)

    def test_load_errors(self, tmp_path):
        with pytest.raises(DataError):
            load_dataset(tmp_path / "missing.json")
        bad = tmp_path / "bad.json"
        bad.write_text("[1, 2")
        with pytest.raises(DataError):
            load_dataset(bad)


class TestCheckpoint:
    SPEC = PolicySpec(n_qubits=1, conv_filters=2, feature_dim=8, hidden_dim=16)

    def test_roundtrip(self, tmp_path, rng):
        net = PolicyNetwork(self.SPEC, rng)
        path = tmp_path / "ckpt.json"
        save_checkpoint(path, net, {"episodes": 10})
        back, meta = load_checkpoint(path)
        np.testing.assert_array_equal(back.to_flat(), net.to_flat())
        assert meta == {"episodes": 10}

    def test_hash_mismatch_rejected(self, tmp_path, rng):
        net = PolicyNetwork(self.SPEC, rng)
        path = tmp_path / "ckpt.json"
        save_checkpoint(path, net)
        record = json.loads(path.read_text())
        record["spec"]["hidden_dim"] = 32
        path.write_text(json.dumps(record))
        with pytest.raises(DataError):
            load_checkpoint(path)

    def test_truncated_weights_rejected(self, tmp_path, rng):
        net = PolicyNetwork(self.SPEC, rng)
        path = tmp_path / "ckpt.json"
        save_checkpoint(path, net)
        record = json.loads(path.read_text())
        record["weights"] = record["weights"][: len(record["weights"]) // 2]
        path.write_text(json.dumps(record))
        with pytest.raises(DataError):
            load_checkpoint(path)

    def test_byte_identical(self, tmp_path):
        net = PolicyNetwork(self.SPEC, np.random.default_rng(4))
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        save_checkpoint(p1, net, {"seed": 4})
        save_checkpoint(p2, net, {"seed": 4})
        assert p1.read_bytes() == p2.read_bytes()
