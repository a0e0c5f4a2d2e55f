"""Episode environment: moment-by-moment noise insertion into a circuit.

An episode walks the moments of a noiseless circuit left to right.  At each
step the agent observes a zero-padded window of the circuit tensor centered
on the current moment (including the noise it has already inserted) and emits
the four channel parameters for every qubit of that moment.  The only reward
arrives at the end: the inverse squared trace distance between the simulated
and the target density matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from noisimrl.circuits import ENC_DEP, Circuit, encode_qcr, window
from noisimrl.dm import DensityMatrix, trace_distance
from noisimrl.noise import apply_action, simulate

REWARD_ALPHA = 1.0
REWARD_EPS = 0.01


def terminal_reward(
    noisy: Circuit,
    target: DensityMatrix,
    alpha: float = REWARD_ALPHA,
    eps: float = REWARD_EPS,
):
    """Reward 1 / (alpha td^2 + eps); also returns td for bookkeeping."""
    td = trace_distance(simulate(noisy), target)
    return 1.0 / (alpha * td * td + eps), td


@dataclass
class NoiseInsertionEnv:
    """Stateful wrapper over one (circuit, target) pair."""

    circuit: Circuit
    target: DensityMatrix
    k: int = 3
    alpha: float = REWARD_ALPHA
    eps: float = REWARD_EPS

    def __post_init__(self):
        if self.circuit.n_qubits != self.target.n_qubits:
            raise ValueError("circuit and target qubit counts differ")
        self.reset()

    @property
    def depth(self) -> int:
        return self.circuit.depth

    def reset(self) -> np.ndarray:
        self.working = self.circuit.copy()
        for moment in self.working.moments:
            moment.noise[:] = 0.0
        self.qcr = encode_qcr(self.working)
        self.t = 0
        return window(self.qcr, 0, self.k)

    def step(self, action: np.ndarray):
        """Apply the action to the current moment; returns (obs, reward, done, td)."""
        if self.t >= self.depth:
            raise RuntimeError("episode is already finished")
        apply_action(self.working, self.t, action)
        self.qcr[:, self.t, ENC_DEP:] = self.working.moments[self.t].noise
        self.t += 1
        if self.t == self.depth:
            reward, td = terminal_reward(self.working, self.target, self.alpha, self.eps)
            return None, reward, True, td
        return window(self.qcr, self.t, self.k), 0.0, False, None
