"""SVI smile evaluation and shape diagnostics.

Two parameterizations are supported: the omega form in maturity-scaled
log-moneyness x = k/T, and the raw form in log-strike k at a fixed maturity.
Slopes returned by :func:`wing_slopes` are per unit x; the raw-form slopes
per unit k are b*(1 +/- rho_tilde) and are exposed on the fit report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import _kernels as kernels
from .errors import MalformedInputError
from .params import (
    HestonParams,
    SVIOmegaParams,
    SVIRawParams,
    heston_to_svi_omega,
    require_asymptotic_domain,
)

__all__ = [
    "svi_omega_variance",
    "svi_raw_total_variance",
    "smile_minimum",
    "wing_slopes",
    "omega1_small_vvol_approx",
    "omega1_large_vvol_approx",
    "SmileDiagnostics",
    "diagnostics",
    "heston_limit_smile",
]

ArrayLike = Union[float, np.ndarray]


def _eval_grid(x: ArrayLike, func, *args) -> ArrayLike:
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise MalformedInputError("log-moneyness values must be finite")
    out = func(np.ascontiguousarray(arr.reshape(-1)), *args)
    if arr.ndim == 0:
        return float(out[0])
    return np.asarray(out).reshape(arr.shape)


def svi_omega_variance(s: SVIOmegaParams, x: ArrayLike) -> ArrayLike:
    """Implied variance (omega1/2)(1 + omega2 rho x + sqrt((omega2 x + rho)^2 + 1 - rho^2))."""
    return _eval_grid(x, kernels.svi_variance, s.omega1, s.omega2, s.rho)


def svi_raw_total_variance(r: SVIRawParams, k: ArrayLike) -> ArrayLike:
    """Total implied variance T * (a + b(rho_tilde (k - m) + sqrt((k - m)^2 + sigma_tilde^2)))."""
    karr = np.asarray(k, dtype=np.float64)
    if not np.all(np.isfinite(karr)):
        raise MalformedInputError("log-strike values must be finite")
    dk = karr - r.m
    w = r.T * (r.a + r.b * (r.rho_tilde * dk + np.hypot(dk, r.sigma_tilde)))
    if karr.ndim == 0:
        return float(w)
    return w


def smile_minimum(s: SVIOmegaParams) -> tuple[float, float]:
    """Location and value of the variance minimum: x* = -2 rho/omega2, value omega1 (1 - rho^2)."""
    return -2.0 * s.rho / s.omega2, s.omega1 * (1.0 - s.rho * s.rho)


def wing_slopes(s: SVIOmegaParams) -> tuple[float, float]:
    """Asymptotic slopes of the variance in x: (-omega1 omega2 (1 - rho)/2, omega1 omega2 (1 + rho)/2)."""
    half = 0.5 * s.omega1 * s.omega2
    return -half * (1.0 - s.rho), half * (1.0 + s.rho)


def omega1_small_vvol_approx(p: HestonParams) -> float:
    """First-order omega1 for sigma << kappa: theta (1 + rho sigma / (2 kappa)).

    The error is O((sigma/kappa)^2); expanding the exact
    omega1 = 4 kappa theta / (eta + 2 kappa - rho sigma) in sigma/kappa gives
    the 1/(2 kappa) coefficient.
    """
    require_asymptotic_domain(p)
    return p.theta * (1.0 + p.rho * p.sigma / (2.0 * p.kappa))


def omega1_large_vvol_approx(p: HestonParams) -> float:
    """Second-order omega1 for sigma >> kappa: (4 kappa theta/(sigma (1 - rho))) (1 - 2 kappa/sigma)."""
    require_asymptotic_domain(p)
    return 4.0 * p.kappa * p.theta / (p.sigma * (1.0 - p.rho)) * (1.0 - 2.0 * p.kappa / p.sigma)


@dataclass(frozen=True)
class SmileDiagnostics:
    """Shape summary of an omega-form smile (slopes per unit x)."""

    atm_variance: float
    min_location: float
    min_variance: float
    left_slope: float
    right_slope: float
    orientation: float

    def to_dict(self) -> dict:
        return {
            "atm_variance": self.atm_variance,
            "min_location": self.min_location,
            "min_variance": self.min_variance,
            "left_slope": self.left_slope,
            "right_slope": self.right_slope,
            "orientation": self.orientation,
        }


def diagnostics(s: SVIOmegaParams) -> SmileDiagnostics:
    """ATM level, minimum, wing slopes and orientation (the sign of skew is rho's)."""
    min_x, min_var = smile_minimum(s)
    left, right = wing_slopes(s)
    return SmileDiagnostics(
        atm_variance=float(svi_omega_variance(s, 0.0)),
        min_location=min_x,
        min_variance=min_var,
        left_slope=left,
        right_slope=right,
        orientation=s.rho,
    )


def heston_limit_smile(p: HestonParams) -> SVIOmegaParams:
    """Convenience alias: the omega-form smile a Heston model converges to."""
    return heston_to_svi_omega(p)
