"""Seeded random parameter sets for the verification suites."""

from __future__ import annotations

import numpy as np

from .params import HestonParams

__all__ = ["random_heston_params"]

# keep kappa - rho*sigma at least this far from the large correlation regime
_ASSUMPTION_MARGIN = 0.01


def random_heston_params(rng: np.random.Generator) -> HestonParams:
    """One Heston parameter set satisfying Feller and kappa - rho*sigma > 0.

    The vol-of-vol is drawn as a fraction of its Feller bound sqrt(2 kappa
    theta), additionally capped so that positive correlation cannot push
    kappa - rho*sigma below a small margin.  Draw order is fixed, so a seeded
    generator reproduces the same sequence everywhere.
    """
    kappa = rng.uniform(0.3, 5.0)
    theta = rng.uniform(0.01, 0.3)
    rho = rng.uniform(-0.85, 0.85)
    bound = np.sqrt(2.0 * kappa * theta)
    if rho > 0.0:
        bound = min(bound, (kappa - _ASSUMPTION_MARGIN) / rho)
    sigma = bound * rng.uniform(0.05, 0.999)
    v0 = theta * rng.uniform(0.5, 2.0)
    return HestonParams(kappa=kappa, theta=theta, sigma=sigma, rho=rho, v0=v0)
