import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_field(rng, grid, complex_valued=False):
    from latticekg import LatticeField

    vals = rng.standard_normal(grid.shape)
    if complex_valued:
        vals = vals + 1j * rng.standard_normal(grid.shape)
    return LatticeField(grid, vals)
