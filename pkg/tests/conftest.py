import numpy as np
import pytest

from noisimrl.dm import DensityMatrix


def random_density_matrix(n_qubits: int, rng: np.random.Generator) -> DensityMatrix:
    d = 2**n_qubits
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = a @ a.conj().T
    return DensityMatrix(n_qubits, rho / np.trace(rho))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
