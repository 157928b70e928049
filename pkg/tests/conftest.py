import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20250811)


def random_adjacency(n, rng, p=0.5):
    """Symmetric hollow 0/1 matrix with iid upper-triangle entries."""
    U = rng.uniform(size=(n, n))
    A = np.triu(U < p, k=1).astype(np.float64)
    return A + A.T
