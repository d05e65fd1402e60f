import numpy as np
import pytest

from spinbloch.bath import BathSpec, LorentzianComponent, SpectralDensity

TABLE1 = (
    LorentzianComponent(1.0e-11, 8.0e-4, 1.4e-3),
    LorentzianComponent(3.0e-12, 6.0e-3, 4.0e-4),
)


@pytest.fixture(scope="session")
def table1_density():
    return SpectralDensity(TABLE1)


@pytest.fixture(scope="session")
def table1_bath(table1_density):
    return BathSpec(table1_density, temperature=300.0)


@pytest.fixture(scope="session")
def weak_bath(table1_density):
    """Tenth-coupling Table-1 bath used for fast hierarchy-vs-oracle checks."""
    return BathSpec(table1_density.scaled(0.1), temperature=300.0, n_matsubara=2)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(1234)
