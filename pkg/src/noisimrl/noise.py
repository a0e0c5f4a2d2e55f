"""Ground-truth and baseline noise models, and the noisy simulator.

A noise model attaches per-qubit channel parameters to circuit moments.  The
four channel slots per qubit are, in application order, depolarizing,
amplitude damping, coherent Z over-rotation and coherent X over-rotation.
Coherent over-rotation angles scale linearly with the gate angle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from noisimrl.circuits import (
    NOISE_COH_X,
    NOISE_COH_Z,
    NOISE_DAM,
    NOISE_DEP,
    Circuit,
    GateKind,
)
from noisimrl.dm import (
    DensityMatrix,
    amplitude_damping,
    apply_unitary,
    coherent_x,
    coherent_z,
    depolarizing,
    zero_state,
)

ACTION_ZERO_THRESHOLD = 1e-4


@dataclass(frozen=True)
class GateNoiseRule:
    """Noise attached after one gate kind.

    `dep_lambda` and `damp_gamma` are constant channel strengths; `coh_z` and
    `coh_x` are dimensionless factors multiplying the gate angle to give the
    over-rotation angle.  Two-qubit rules apply to both participating qubits.
    """

    dep_lambda: float = 0.0
    damp_gamma: float = 0.0
    coh_z: float = 0.0
    coh_x: float = 0.0

    def params_for(self, angle: float) -> np.ndarray:
        out = np.zeros(4)
        out[NOISE_DEP] = self.dep_lambda
        out[NOISE_DAM] = self.damp_gamma
        out[NOISE_COH_Z] = self.coh_z * angle
        out[NOISE_COH_X] = self.coh_x * angle
        return out


@dataclass(frozen=True)
class NoiseModelSpec:
    """A named mapping from gate kind to its trailing noise rule."""

    name: str
    rules: dict = field(default_factory=dict)

    def rule_for(self, kind: GateKind) -> GateNoiseRule:
        return self.rules.get(kind, GateNoiseRule())


NOISE_1Q = NoiseModelSpec(
    "1q",
    {
        GateKind.RX: GateNoiseRule(damp_gamma=0.03, coh_x=0.04),
        GateKind.RZ: GateNoiseRule(dep_lambda=0.02, coh_z=0.02),
    },
)

NOISE_3Q_HIGH = NoiseModelSpec(
    "3q-high",
    {
        GateKind.RX: GateNoiseRule(damp_gamma=0.03, coh_x=0.04),
        GateKind.RZ: GateNoiseRule(dep_lambda=0.02, coh_z=0.03),
        GateKind.CZ: GateNoiseRule(dep_lambda=0.02, damp_gamma=0.03),
    },
)

NOISE_3Q_LOW = NoiseModelSpec(
    "3q-low",
    {
        GateKind.RX: GateNoiseRule(damp_gamma=0.01, coh_x=0.015),
        GateKind.RZ: GateNoiseRule(dep_lambda=0.015, coh_z=0.02),
        GateKind.CZ: GateNoiseRule(dep_lambda=0.015, damp_gamma=0.01),
    },
)

PRESETS = {m.name: m for m in (NOISE_1Q, NOISE_3Q_HIGH, NOISE_3Q_LOW)}


def apply_ground_truth(circuit: Circuit, spec: NoiseModelSpec) -> Circuit:
    """Return a copy of `circuit` with the model's noise parameters attached."""
    out = circuit.copy()
    for moment in out.moments:
        for gate in moment.gates:
            params = spec.rule_for(gate.kind).params_for(gate.angle)
            for q in gate.qubits:
                moment.noise[q] = params
    return out


@dataclass(frozen=True)
class RBModel:
    """Depolarizing baseline: Dep(1 - p) after every gate, on every qubit hit."""

    p: float

    def __post_init__(self):
        if not 0.0 < self.p <= 1.0:
            raise ValueError(f"decay parameter must be in (0, 1], got {self.p}")


def apply_rb_model(circuit: Circuit, model: RBModel) -> Circuit:
    out = circuit.copy()
    lam = 1.0 - model.p
    if lam == 0.0:
        return out
    for moment in out.moments:
        for gate in moment.gates:
            for q in gate.qubits:
                moment.noise[q, NOISE_DEP] = lam
    return out


def apply_action(circuit: Circuit, m: int, action: np.ndarray) -> None:
    """Overwrite moment `m`'s noise with `action`, zeroing tiny entries."""
    action = np.asarray(action, dtype=float)
    if action.shape != (circuit.n_qubits, 4):
        raise ValueError(
            f"action shape {action.shape} != ({circuit.n_qubits}, 4)"
        )
    cleaned = np.where(np.abs(action) < ACTION_ZERO_THRESHOLD, 0.0, action)
    circuit.moments[m].noise[:] = cleaned


def _noise_channels(params: np.ndarray):
    if params[NOISE_DEP] != 0.0:
        yield depolarizing(float(params[NOISE_DEP]))
    if params[NOISE_DAM] != 0.0:
        yield amplitude_damping(float(params[NOISE_DAM]))
    if params[NOISE_COH_Z] != 0.0:
        yield coherent_z(float(params[NOISE_COH_Z]))
    if params[NOISE_COH_X] != 0.0:
        yield coherent_x(float(params[NOISE_COH_X]))


def simulate(circuit: Circuit, initial: DensityMatrix = None) -> DensityMatrix:
    """Evolve a density matrix through the circuit, gates before noise.

    Within a moment all gates act first, then each qubit's channels are
    applied in ascending qubit order, channel slots in their canonical order.
    """
    from noisimrl.dm import apply_channel

    rho = zero_state(circuit.n_qubits) if initial is None else initial
    for moment in circuit.moments:
        for gate in moment.gates:
            rho = apply_unitary(rho, gate.unitary(), gate.qubits)
        for q in range(circuit.n_qubits):
            for channel in _noise_channels(moment.noise[q]):
                rho = apply_channel(rho, channel, q)
    return rho
