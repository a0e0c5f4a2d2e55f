import json

import pytest

from noisimrl.cli import main

TINY_CONFIG = {
    "n_qubits": 1,
    "noise_model": "1q",
    "seed": 42,
    "dataset": {"count": 6, "depth": 4},
    "rb": {"replicates": 10},
    "policy": {"conv_filters": 2, "feature_dim": 8, "hidden_dim": 16},
    "training": {
        "episodes_desk": 16,
        "episodes_paper": 32,
        "eval_interval": 8,
        "ppo": {"batch_episodes": 4, "epochs": 2},
    },
    "eval": {"depths": [3, 6], "circuits_per_depth": 2},
}


@pytest.fixture
def config_path(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(TINY_CONFIG))
    return str(path)


def run(args):
    return main(args)


class TestExitCodes:
    def test_missing_config_is_config_error(self, tmp_path):
        code = run(
            ["gen-dataset", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path)]
        )
        assert code == 2

    def test_invalid_config_is_config_error(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"n_qubits": 9}))
        assert run(["rb", "--config", str(bad), "--out", str(tmp_path)]) == 2

    def test_train_without_dataset_is_data_error(self, config_path, tmp_path):
        out = tmp_path / "out"
        assert run(["train", "--config", config_path, "--out", str(out)]) == 3

    def test_eval_without_checkpoint_is_data_error(self, config_path, tmp_path):
        out = tmp_path / "out"
        assert run(["eval", "--config", config_path, "--out", str(out)]) == 3


class TestPipeline:
    def test_full_flow(self, config_path, tmp_path, capsys):
        out = str(tmp_path / "out")
        assert run(["gen-dataset", "--config", config_path, "--out", out]) == 0
        assert run(["rb", "--config", config_path, "--out", out]) == 0
        assert run(["train", "--config", config_path, "--out", out]) == 0
        assert run(["eval", "--config", config_path, "--out", out]) == 0
        assert run(
            ["apply", "--config", config_path, "--out", out, "--input", "builtin:qft"]
        ) == 0

        produced = {p.name for p in (tmp_path / "out").iterdir()}
        assert {
            "dataset.json", "rb.json", "rb_decay.png", "checkpoint.json",
            "history.csv", "training_curve.png", "eval.csv", "eval.json",
            "depth_sweep.png", "applied.json",
        } <= produced

        rb = json.loads((tmp_path / "out" / "rb.json").read_text())
        assert 0.9 < rb["p"] < 1.0
        header = (tmp_path / "out" / "eval.csv").read_text().splitlines()[0]
        assert header == "model,depth,circuit_id,fidelity,trace_distance"
        applied = json.loads((tmp_path / "out" / "applied.json").read_text())
        assert len(applied["probabilities"]) == 2
        assert abs(sum(applied["probabilities"]) - 1) < 1e-9

    def test_gen_dataset_byte_identical(self, config_path, tmp_path):
        out_a, out_b = str(tmp_path / "a"), str(tmp_path / "b")
        assert run(["gen-dataset", "--config", config_path, "--out", out_a]) == 0
        assert run(["gen-dataset", "--config", config_path, "--out", out_b]) == 0
        a = (tmp_path / "a" / "dataset.json").read_bytes()
        b = (tmp_path / "b" / "dataset.json").read_bytes()
        assert a == b

    def test_seed_override_changes_dataset(self, config_path, tmp_path):
        out_a, out_b = str(tmp_path / "a"), str(tmp_path / "b")
        run(["gen-dataset", "--config", config_path, "--out", out_a])
        run(["gen-dataset", "--config", config_path, "--out", out_b, "--seed", "43"])
        a = (tmp_path / "a" / "dataset.json").read_bytes()
        b = (tmp_path / "b" / "dataset.json").read_bytes()
        assert a != b

    def test_apply_rejects_wrong_register(self, config_path, tmp_path):
        out = str(tmp_path / "out")
        run(["gen-dataset", "--config", config_path, "--out", out])
        run(["rb", "--config", config_path, "--out", out])
        run(["train", "--config", config_path, "--out", out])
        code = run(
            ["apply", "--config", config_path, "--out", out, "--input", "builtin:grover"]
        )
        assert code == 3
