import numpy as np
import pytest

from qclocksync.hamiltonian import MoleculeSpec


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def make_molecule():
    def make(rng, n, max_shift_hz=600.0, max_j_hz=80.0):
        omega_hz = rng.uniform(-max_shift_hz, max_shift_hz, n)
        j_hz = rng.uniform(-max_j_hz, max_j_hz, n * (n - 1) // 2)
        return MoleculeSpec.from_hz(omega_hz, j_hz)

    return make
