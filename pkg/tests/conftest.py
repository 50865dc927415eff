import numpy as np
import pytest

from dynell.params import ModularParams


@pytest.fixture(scope="session")
def params():
    return ModularParams(tau=0.75j, gamma=0.13 + 0.04j)


@pytest.fixture(scope="session")
def params_small_gamma():
    return ModularParams(tau=0.75j, gamma=0.05)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240811)


def draw_cell(rng, p, margin=0.0, loci=None):
    """Deterministic rejection sampling inside the fundamental cell."""
    while True:
        z = complex(rng.uniform(-0.5, 0.5), rng.uniform(-p.tau.imag / 2, p.tau.imag / 2))
        pts = (z,) if loci is None else loci(z)
        if margin == 0.0 or all(p.lattice_distance(x) >= margin for x in pts):
            return z
