import numpy as np
import pytest

from powergram import (
    GeneratorNetwork,
    build_reduced_system,
    bundled_network_path,
    ingest,
)


@pytest.fixture(scope="session")
def ieee9():
    return ingest(bundled_network_path("ieee9"))


@pytest.fixture(scope="session")
def ieee9_sys(ieee9):
    return build_reduced_system(ieee9)


@pytest.fixture(scope="session")
def toy2():
    """Two generators, one unit line: the smallest nontrivial network."""
    L = np.array([[1.0, -1.0], [-1.0, 1.0]])
    return GeneratorNetwork(M=np.ones(2), D=np.ones(2), L=L)


@pytest.fixture(scope="session")
def toy3():
    """Three generators on a weighted triangle with distinct parameters."""
    G = np.array(
        [
            [0.0, 2.0, 0.5],
            [2.0, 0.0, 1.0],
            [0.5, 1.0, 0.0],
        ]
    )
    L = np.diag(G.sum(axis=1)) - G
    M = np.array([0.05, 0.08, 0.12])
    D = np.array([0.02, 0.03, 0.04])
    return GeneratorNetwork(M=M, D=D, L=L)


@pytest.fixture(scope="session")
def toy3_path(toy3):
    """Three-node chain (no 3-2 edge), for support-set filtering tests."""
    G = np.array(
        [
            [0.0, 1.5, 0.7],
            [1.5, 0.0, 0.0],
            [0.7, 0.0, 0.0],
        ]
    )
    L = np.diag(G.sum(axis=1)) - G
    return GeneratorNetwork(M=toy3.M, D=toy3.D, L=L)
