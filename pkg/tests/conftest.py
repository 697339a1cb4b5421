import numpy as np
import pytest

from hestonsvi import HestonParams
from hestonsvi.sampling import random_heston_params

# reference parameter set used throughout: kappa=1, theta=0.04, sigma=0.25,
# rho=-0.5, v0=0.04 (Feller: 0.08 >= 0.0625; kappa - rho*sigma = 1.125 > 0)
P0 = HestonParams(kappa=1.0, theta=0.04, sigma=0.25, rho=-0.5, v0=0.04)


@pytest.fixture
def p0() -> HestonParams:
    return P0


def seeded_params(n: int, seed: int = 20240817) -> list:
    """n reproducible Heston parameter sets in the asymptotic domain."""
    rng = np.random.default_rng(seed)
    return [random_heston_params(rng) for _ in range(n)]
