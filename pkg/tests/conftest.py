import numpy as np
import pytest

import mesofick as mf

# reference instance used throughout: beta = 1.25, boundaries 0.8 / 0.7
P1 = dict(beta=1.25, mu_minus=0.8, mu_plus=0.7)


@pytest.fixture(scope="session")
def p1_params():
    return mf.ModelParams(epsilon=1 / 50, **P1)


@pytest.fixture(scope="session")
def p1_grid():
    return mf.Grid(1 / 50, 20)


@pytest.fixture(scope="session")
def p1_kernel(p1_grid):
    return mf.build_kernel(p1_grid)


@pytest.fixture(scope="session")
def p1_report(p1_params, p1_grid, p1_kernel):
    return mf.outer_solve(p1_params, p1_grid, p1_kernel)


@pytest.fixture(scope="session")
def coarse_grid():
    return mf.Grid(1 / 25, 20)


@pytest.fixture(scope="session")
def coarse_kernel(coarse_grid):
    return mf.build_kernel(coarse_grid)


def smooth_positive_gain(rng, n, lam):
    """Random smooth gain field with sup close to lam (strictly below 1)."""
    noise = rng.standard_normal(n)
    for _ in range(3):
        noise[1:-1] = 0.25 * noise[:-2] + 0.5 * noise[1:-1] + 0.25 * noise[2:]
    p = lam * (0.55 + 0.45 * np.tanh(noise))
    return p
