"""Learning quantum noise models for few-qubit circuits with reinforcement learning.

The package simulates 1-3 qubit circuits at the density-matrix level, defines
parametric and randomized-benchmarking noise models, and trains a PPO agent to
insert noise channels into noiseless circuits so that the simulated density
matrices match noisy targets.
"""

from noisimrl.dm import (
    DensityMatrix,
    KrausChannel,
    Unitary,
    apply_channel,
    apply_unitary,
    computational_probabilities,
    fidelity,
    maximally_mixed,
    trace_distance,
    zero_state,
)

__all__ = [
    "DensityMatrix",
    "KrausChannel",
    "Unitary",
    "apply_channel",
    "apply_unitary",
    "computational_probabilities",
    "fidelity",
    "maximally_mixed",
    "trace_distance",
    "zero_state",
]

__version__ = "0.1.0"
