import numpy as np
import pytest

from viscoflow.materials import MaterialLaw, ReferenceState


@pytest.fixture
def unit_law():
    """Unit coefficients: cs = 1 at rho = 1 (A gamma = 1), zeta = eta = tau = 1."""
    return MaterialLaw(A=0.5, gamma=2.0, zeta=1.0, eta=1.0, tau=1.0)


@pytest.fixture
def unit_reference():
    return ReferenceState(rho_bar=1.0, R=1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
