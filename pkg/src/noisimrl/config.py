"""Experiment configuration: JSON loading, validation, embedded presets.

A config fully determines an experiment (dataset generation, RB
characterization, training and evaluation) given a seed.  The `desk` profile
is sized for a workstation run; `paper` reproduces the full-size experiments.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from noisimrl.errors import ConfigError
from noisimrl.noise import PRESETS

PROFILES = ("desk", "paper")


@dataclass(frozen=True)
class DatasetConfig:
    count: int
    depth: int
    path: str = "dataset.json"


@dataclass(frozen=True)
class RBConfig:
    depths: tuple = (3, 5, 7, 10, 15, 20, 25, 30)
    replicates: int = 30


@dataclass(frozen=True)
class PolicyConfig:
    window: int = 3
    conv_filters: int = 16
    feature_dim: int = 64
    hidden_dim: int = 256
    p_max: float = None  # None: derive 2 (1 - p) from the RB fit


@dataclass(frozen=True)
class TrainingConfig:
    episodes_desk: int
    episodes_paper: int
    eval_interval: int = 2000
    ppo: dict = field(default_factory=dict)  # PPOConfig field overrides

    def episodes(self, profile: str) -> int:
        return self.episodes_desk if profile == "desk" else self.episodes_paper


@dataclass(frozen=True)
class EvalConfig:
    depths: tuple = (3, 6, 9, 12, 15, 18, 21, 24, 27, 30)
    circuits_per_depth: int = 10


@dataclass(frozen=True)
class ExperimentConfig:
    n_qubits: int
    noise_model: str
    seed: int = 1234
    dataset: DatasetConfig = None
    rb: RBConfig = field(default_factory=RBConfig)
    policy: PolicyConfig = field(default_factory=PolicyConfig)
    training: TrainingConfig = None
    eval: EvalConfig = field(default_factory=EvalConfig)

    def to_dict(self) -> dict:
        return asdict(self)


def default_config(n_qubits: int, seed: int = 1234) -> ExperimentConfig:
    """Built-in presets for the single-qubit and three-qubit experiments."""
    if n_qubits == 1:
        return ExperimentConfig(
            n_qubits=1,
            noise_model="1q",
            seed=seed,
            dataset=DatasetConfig(count=100, depth=10),
            policy=PolicyConfig(conv_filters=16, feature_dim=64),
            training=TrainingConfig(episodes_desk=50_000, episodes_paper=400_000),
        )
    if n_qubits == 3:
        return ExperimentConfig(
            n_qubits=3,
            noise_model="3q-high",
            seed=seed,
            dataset=DatasetConfig(count=800, depth=10),
            policy=PolicyConfig(conv_filters=32, feature_dim=32),
            training=TrainingConfig(episodes_desk=300_000, episodes_paper=1_500_000),
        )
    raise ConfigError(f"no default configuration for {n_qubits} qubits")


def _build(section, cls, data, base=None):
    if not isinstance(data, dict):
        raise ConfigError(f"section {section!r} must be an object, got {type(data).__name__}")
    known = {f for f in cls.__dataclass_fields__}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown keys in {section!r}: {sorted(unknown)}")
    merged = dict(asdict(base)) if base is not None else {}
    merged.update(data)
    for key in ("depths",):
        if key in merged and isinstance(merged[key], list):
            merged[key] = tuple(merged[key])
    try:
        return cls(**merged)
    except TypeError as exc:
        raise ConfigError(f"invalid section {section!r}: {exc}") from exc


def config_from_dict(data: dict) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    if "n_qubits" not in data:
        raise ConfigError("config is missing required key 'n_qubits'")
    n_qubits = data["n_qubits"]
    if n_qubits not in (1, 2, 3):
        raise ConfigError(f"n_qubits must be 1, 2 or 3, got {n_qubits!r}")
    base = default_config(n_qubits if n_qubits in (1, 3) else 1)
    noise_model = data.get("noise_model", base.noise_model)
    if noise_model not in PRESETS:
        raise ConfigError(
            f"unknown noise model {noise_model!r}; available: {sorted(PRESETS)}"
        )
    seed = data.get("seed", base.seed)
    if not isinstance(seed, int):
        raise ConfigError(f"seed must be an integer, got {seed!r}")
    known_top = {
        "n_qubits", "noise_model", "seed", "dataset", "rb", "policy",
        "training", "eval",
    }
    unknown = set(data) - known_top
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    return ExperimentConfig(
        n_qubits=n_qubits,
        noise_model=noise_model,
        seed=seed,
        dataset=_build("dataset", DatasetConfig, data.get("dataset", {}), base.dataset),
        rb=_build("rb", RBConfig, data.get("rb", {}), base.rb),
        policy=_build("policy", PolicyConfig, data.get("policy", {}), base.policy),
        training=_build("training", TrainingConfig, data.get("training", {}), base.training),
        eval=_build("eval", EvalConfig, data.get("eval", {}), base.eval),
    )


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as f:
            data = json.load(f)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    return config_from_dict(data)
