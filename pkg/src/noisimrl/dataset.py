"""Dataset and checkpoint persistence.

Everything is JSON: circuits as explicit moment/gate lists with their noise
arrays, density matrices as nested [re, im] pairs, and network weights as a
base64-encoded little-endian float64 vector guarded by a hash of the policy
architecture.  No wall-clock metadata is stored, so identical inputs produce
byte-identical files.
"""

from __future__ import annotations

import base64
import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from noisimrl.circuits import Circuit, GateKind, Moment, cz, rx, rz
from noisimrl.dm import DensityMatrix
from noisimrl.errors import DataError
from noisimrl.generators import (
    mixed_training_circuits_3q,
    random_clifford_circuit_1q,
)
from noisimrl.noise import NoiseModelSpec, apply_ground_truth, simulate
from noisimrl.policy import PolicyNetwork, PolicySpec

FORMAT_VERSION = 1


# -- circuit / density matrix JSON forms --------------------------------------


def circuit_to_dict(circuit: Circuit) -> dict:
    moments = []
    for moment in circuit.moments:
        moments.append(
            {
                "gates": [
                    {"kind": g.kind.value, "qubits": list(g.qubits), "angle": g.angle}
                    for g in moment.gates
                ],
                "noise": moment.noise.tolist(),
            }
        )
    return {"n_qubits": circuit.n_qubits, "moments": moments}


def circuit_from_dict(data: dict) -> Circuit:
    try:
        n_qubits = data["n_qubits"]
        moments = []
        for m in data["moments"]:
            gates = []
            for g in m["gates"]:
                kind = GateKind(g["kind"])
                if kind is GateKind.CZ:
                    gates.append(cz(*g["qubits"]))
                elif kind is GateKind.RX:
                    gates.append(rx(g["qubits"][0], g["angle"]))
                else:
                    gates.append(rz(g["qubits"][0], g["angle"]))
            noise = np.asarray(m["noise"], dtype=float)
            moments.append(Moment(n_qubits, gates, noise))
        return Circuit(n_qubits, moments)
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed circuit record: {exc}") from exc


def dm_to_nested(dm: DensityMatrix) -> list:
    return [[[float(v.real), float(v.imag)] for v in row] for row in dm.data]


def dm_from_nested(n_qubits: int, nested) -> DensityMatrix:
    try:
        arr = np.asarray(nested, dtype=float)
        data = arr[..., 0] + 1j * arr[..., 1]
        return DensityMatrix(n_qubits, data)
    except (ValueError, IndexError) as exc:
        raise DataError(f"malformed density matrix record: {exc}") from exc


# -- datasets ------------------------------------------------------------------


@dataclass
class Dataset:
    n_qubits: int
    kind: str
    noise_model: str
    seed: int
    circuits: list = field(default_factory=list)
    targets: list = field(default_factory=list)

    def pairs(self) -> list:
        return list(zip(self.circuits, self.targets))

    def __len__(self) -> int:
        return len(self.circuits)


def generate_dataset(
    n_qubits: int,
    count: int,
    depth: int,
    spec: NoiseModelSpec,
    seed: int,
) -> Dataset:
    """Noiseless circuits plus their simulated noisy targets.

    One qubit: random Clifford circuits of fixed depth.  Three qubits: half
    fixed-moment random circuits, half random Clifford unitaries.
    """
    rng = np.random.default_rng(seed)
    if n_qubits == 1:
        circuits = [random_clifford_circuit_1q(depth, rng) for _ in range(count)]
        kind = "clifford-1q"
    elif n_qubits == 3:
        circuits = mixed_training_circuits_3q(count, depth, rng)
        kind = "mixed-3q"
    else:
        raise DataError(f"no dataset recipe for {n_qubits} qubits")
    targets = [simulate(apply_ground_truth(c, spec)) for c in circuits]
    return Dataset(n_qubits, kind, spec.name, seed, circuits, targets)


def dataset_to_dict(ds: Dataset) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "n_qubits": ds.n_qubits,
        "kind": ds.kind,
        "noise_model": ds.noise_model,
        "seed": ds.seed,
        "entries": [
            {"circuit": circuit_to_dict(c), "target": dm_to_nested(t)}
            for c, t in zip(ds.circuits, ds.targets)
        ],
    }


def dataset_from_dict(data: dict) -> Dataset:
    try:
        if data["format_version"] != FORMAT_VERSION:
            raise DataError(f"unsupported dataset format {data['format_version']}")
        n_qubits = data["n_qubits"]
        circuits, targets = [], []
        for entry in data["entries"]:
            circuits.append(circuit_from_dict(entry["circuit"]))
            targets.append(dm_from_nested(n_qubits, entry["target"]))
        return Dataset(
            n_qubits, data["kind"], data["noise_model"], data["seed"], circuits, targets
        )
    except KeyError as exc:
        raise DataError(f"dataset record is missing key {exc}") from exc


def save_dataset(ds: Dataset, path) -> None:
    with open(path, "w") as f:
        json.dump(dataset_to_dict(ds), f, sort_keys=True)
        f.write("\n")


def load_dataset(path) -> Dataset:
    try:
        with open(path) as f:
            data = json.load(f)
    except FileNotFoundError as exc:
        raise DataError(f"dataset file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"dataset file is not valid JSON: {exc}") from exc
    return dataset_from_dict(data)


# -- checkpoints ---------------------------------------------------------------


def spec_hash(spec: PolicySpec) -> str:
    payload = json.dumps(
        {
            "n_qubits": spec.n_qubits,
            "window": spec.window,
            "conv_filters": spec.conv_filters,
            "feature_dim": spec.feature_dim,
            "hidden_dim": spec.hidden_dim,
            "p_max": spec.p_max,
        },
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode()).hexdigest()


def save_checkpoint(path, net: PolicyNetwork, metadata: dict = None) -> None:
    spec = net.spec
    flat = np.ascontiguousarray(net.to_flat(), dtype="<f8")
    record = {
        "format_version": FORMAT_VERSION,
        "spec": {
            "n_qubits": spec.n_qubits,
            "window": spec.window,
            "conv_filters": spec.conv_filters,
            "feature_dim": spec.feature_dim,
            "hidden_dim": spec.hidden_dim,
            "p_max": spec.p_max,
        },
        "spec_hash": spec_hash(spec),
        "n_params": spec.n_params,
        "weights": base64.b64encode(flat.tobytes()).decode("ascii"),
        "metadata": metadata or {},
    }
    with open(path, "w") as f:
        json.dump(record, f, sort_keys=True)
        f.write("\n")


def load_checkpoint(path) -> tuple:
    """Returns (PolicyNetwork, metadata) after validating the weight vector."""
    try:
        with open(path) as f:
            record = json.load(f)
    except FileNotFoundError as exc:
        raise DataError(f"checkpoint file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"checkpoint file is not valid JSON: {exc}") from exc
    try:
        spec = PolicySpec(**record["spec"])
        if record["spec_hash"] != spec_hash(spec):
            raise DataError("checkpoint spec hash mismatch")
        try:
            raw = base64.b64decode(record["weights"])
            flat = np.frombuffer(raw, dtype="<f8")
        except (ValueError, TypeError) as exc:
            raise DataError(f"checkpoint weights are corrupted: {exc}") from exc
        if flat.size != record["n_params"] or flat.size != spec.n_params:
            raise DataError(
                f"checkpoint has {flat.size} weights, expected {spec.n_params}"
            )
        net = PolicyNetwork(spec)
        net.from_flat(flat.astype(float))
        return net, record.get("metadata", {})
    except KeyError as exc:
        raise DataError(f"checkpoint record is missing key {exc}") from exc
