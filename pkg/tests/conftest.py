import numpy as np
import pytest

from qrough.dataset import bundled_data_path, load_csv


@pytest.fixture(scope="session")
def table1_samples():
    return load_csv(bundled_data_path())


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)


def random_state_vector(rng, num_qubits):
    """A random normalized amplitude vector."""
    raw = rng.standard_normal(1 << num_qubits) + 1j * rng.standard_normal(1 << num_qubits)
    return raw / np.linalg.norm(raw)
