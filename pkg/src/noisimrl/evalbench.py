"""Model comparison benchmarks: depth sweeps and algorithm case studies.

A "model" here is anything that predicts the output density matrix of a
noiseless circuit: the learned agent, the RB depolarizing baseline, the
ground-truth model itself, the noiseless simulation, or the maximally mixed
state.  Results are plain rows (model, depth, circuit_id, fidelity,
trace_distance) plus per-algorithm case studies, serializable to CSV/JSON
with deterministic ordering.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from noisimrl.circuits import Circuit
from noisimrl.dm import (
    DensityMatrix,
    computational_probabilities,
    fidelity,
    maximally_mixed,
    trace_distance,
)
from noisimrl.noise import (
    NoiseModelSpec,
    RBModel,
    apply_ground_truth,
    apply_rb_model,
    simulate,
)
from noisimrl.policy import PolicyNetwork
from noisimrl.ppo import predict_noise

MODEL_NAMES = ("learned", "rb", "ground-truth", "none", "mms")


@dataclass(frozen=True)
class EvalModel:
    """Named predictor mapping a noiseless circuit to a density matrix."""

    name: str
    predict: object  # callable Circuit -> DensityMatrix


def learned_model(net: PolicyNetwork) -> EvalModel:
    return EvalModel("learned", lambda c: simulate(predict_noise(net, c)))


def rb_baseline(p: float) -> EvalModel:
    model = RBModel(p)
    return EvalModel("rb", lambda c: simulate(apply_rb_model(c, model)))


def ground_truth_model(spec: NoiseModelSpec) -> EvalModel:
    return EvalModel("ground-truth", lambda c: simulate(apply_ground_truth(c, spec)))


def no_noise_model() -> EvalModel:
    return EvalModel("none", lambda c: simulate(c.copy()))


def mms_model() -> EvalModel:
    return EvalModel("mms", lambda c: maximally_mixed(c.n_qubits))


@dataclass(frozen=True)
class EvalRow:
    model: str
    depth: int
    circuit_id: int
    fidelity: float
    trace_distance: float


def evaluate_model(model: EvalModel, circuit: Circuit, target: DensityMatrix):
    """(fidelity, trace distance) of the model's prediction against target."""
    rho = model.predict(circuit)
    return fidelity(rho, target), trace_distance(rho, target)


def depth_sweep(models, cases) -> list:
    """Evaluate every model on every case.

    `cases` is a list of (depth, circuit_id, circuit, target); rows come back
    sorted by (model, depth, circuit_id).
    """
    rows = []
    for model in models:
        for depth, circuit_id, circuit, target in cases:
            f, td = evaluate_model(model, circuit, target)
            rows.append(EvalRow(model.name, int(depth), int(circuit_id), f, td))
    rows.sort(key=lambda r: (r.model, r.depth, r.circuit_id))
    return rows


@dataclass(frozen=True)
class CaseStudy:
    """One algorithm circuit evaluated under every model."""

    name: str
    fidelities: dict
    trace_distances: dict
    probabilities: dict  # model -> list of computational-basis probabilities
    diff_matrices: dict  # model -> |rho_model - rho_target| entrywise
    marginal_argmax: dict  # model -> argmax over the leading two-qubit marginal


def two_qubit_marginal(probs: np.ndarray) -> np.ndarray:
    """Marginal distribution of the two most significant qubits."""
    probs = np.asarray(probs, dtype=float)
    if probs.size < 4:
        return probs
    return probs.reshape(4, -1).sum(axis=1)


def algorithm_case_study(
    name: str, models, circuit: Circuit, target: DensityMatrix
) -> CaseStudy:
    fids, tds, probs, diffs, argmaxes = {}, {}, {}, {}, {}
    for model in models:
        rho = model.predict(circuit)
        fids[model.name] = fidelity(rho, target)
        tds[model.name] = trace_distance(rho, target)
        p = computational_probabilities(rho)
        probs[model.name] = [float(v) for v in p]
        diffs[model.name] = np.abs(rho.data - target.data).tolist()
        argmaxes[model.name] = int(np.argmax(two_qubit_marginal(p)))
    return CaseStudy(name, fids, tds, probs, diffs, argmaxes)


@dataclass
class EvalReport:
    rows: list = field(default_factory=list)
    case_studies: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)


def write_rows_csv(rows, path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["model", "depth", "circuit_id", "fidelity", "trace_distance"])
        for r in rows:
            writer.writerow(
                [r.model, r.depth, r.circuit_id, f"{r.fidelity:.12f}", f"{r.trace_distance:.12f}"]
            )


def report_to_dict(report: EvalReport) -> dict:
    return {
        "metadata": dict(sorted(report.metadata.items())),
        "rows": [
            {
                "model": r.model,
                "depth": r.depth,
                "circuit_id": r.circuit_id,
                "fidelity": r.fidelity,
                "trace_distance": r.trace_distance,
            }
            for r in report.rows
        ],
        "case_studies": [
            {
                "name": c.name,
                "fidelities": dict(sorted(c.fidelities.items())),
                "trace_distances": dict(sorted(c.trace_distances.items())),
                "probabilities": dict(sorted(c.probabilities.items())),
                "diff_matrices": dict(sorted(c.diff_matrices.items())),
                "marginal_argmax": dict(sorted(c.marginal_argmax.items())),
            }
            for c in report.case_studies
        ],
    }


def export_report(report: EvalReport, csv_path, json_path) -> None:
    """Write the delimited rows and the full JSON report deterministically."""
    write_rows_csv(report.rows, csv_path)
    with open(json_path, "w") as f:
        json.dump(report_to_dict(report), f, indent=2, sort_keys=True)
        f.write("\n")


def summarize_by_depth(rows) -> dict:
    """Mean fidelity per (model, depth), for plotting and quick inspection."""
    acc = {}
    for r in rows:
        acc.setdefault((r.model, r.depth), []).append(r.fidelity)
    return {k: float(np.mean(v)) for k, v in sorted(acc.items())}
