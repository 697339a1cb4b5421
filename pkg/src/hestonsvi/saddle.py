"""Complex continuation of the limiting cumulant and the saddle-point check.

The Fourier representation of a call price has exponent psi(u) = -V(1/2 + iu)
in the large-maturity limit.  Its stationary point is explicit,
u_tilde(x) = -i (p*(x) - 1/2), and matching the exponent of the Black-Scholes
kernel at that point,

    v/8 + x^2 / (2 v) = psi(u_tilde(x)) + i x u_tilde(x),

is solved exactly by v = sigma_inf^2(x), the limiting SVI variance.  This
module exposes psi, u_tilde and the residuals of that matching condition.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .asymptotic import AsymptoticPipeline
from .errors import MalformedInputError
from .params import DerivedConstants, HestonParams

__all__ = ["SaddleContext", "SaddleReport"]


@dataclass(frozen=True)
class SaddleReport:
    """Grid evaluation of the exponent-matching condition."""

    x: np.ndarray
    residual: np.ndarray
    relative_residual: np.ndarray
    identity_gap: np.ndarray
    atm_u_tilde: complex
    tolerance: float
    passed: bool

    def summary(self) -> dict:
        return {
            "n_points": int(self.x.size),
            "x_min": float(self.x[0]),
            "x_max": float(self.x[-1]),
            "max_relative_residual": float(np.max(self.relative_residual)),
            "max_identity_gap": float(np.max(self.identity_gap)),
            "atm_u_tilde_imag": float(self.atm_u_tilde.imag),
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


class SaddleContext:
    """Saddle-point machinery for one parameter set (initial variance unused)."""

    def __init__(self, params: HestonParams):
        self._pipeline = AsymptoticPipeline(params)
        self.params = params
        self.constants: DerivedConstants = self._pipeline.constants
        # central-difference step for psi', scaled to the moment interval
        self._h = 1e-6 * (self.constants.p_plus - self.constants.p_minus)

    def v_complex(self, p: complex) -> complex:
        """Analytic continuation of the limiting cumulant V.

        Uses d(p) = sqrt((kappa - rho sigma p)^2 + sigma^2 p (1 - p)) with the
        principal branch and the rationalized quotient
        -kappa theta p (1 - p) / (kappa - rho sigma p + d(p)); the denominator
        cannot vanish because d = -(kappa - rho sigma p) would force
        p (1 - p) = 0, and at p = 0 and p = 1 the denominator is real positive.
        """
        p = complex(p)
        if not (math.isfinite(p.real) and math.isfinite(p.imag)):
            raise MalformedInputError(f"p must be finite, got {p!r}")
        k, s, r = self.params.kappa, self.params.sigma, self.params.rho
        beta = k - r * s * p
        pq = p * (1.0 - p)
        d = cmath.sqrt(beta * beta + s * s * pq)
        return -k * self.params.theta * pq / (beta + d)

    def psi(self, u: complex) -> complex:
        """Limiting exponent psi(u) = -V(1/2 + iu)."""
        return -self.v_complex(0.5 + 1j * complex(u))

    def psi_prime(self, u: complex) -> complex:
        """Central-difference derivative of psi; step scaled to p_plus - p_minus."""
        return (self.psi(u + self._h) - self.psi(u - self._h)) / (2.0 * self._h)

    def u_tilde(self, x: float) -> complex:
        """Stationary point of psi(u) + i x u: purely imaginary, -i (p*(x) - 1/2)."""
        return -1j * (self._pipeline.p_star(x) - 0.5)

    def saddle_equation_gap(self, x: float) -> float:
        """|psi'(u_tilde(x)) + i x|, finite-difference check of stationarity."""
        return abs(self.psi_prime(self.u_tilde(x)) + 1j * float(x))

    def exponent_lhs(self, x: float) -> float:
        """v/8 + x^2/(2v) with v the limiting SVI variance at x."""
        x = float(x)
        v = self._pipeline.variance_closed(x)
        return v / 8.0 + x * x / (2.0 * v)

    def exponent_rhs(self, x: float) -> complex:
        """psi(u_tilde(x)) + i x u_tilde(x), via the complex machinery."""
        x = float(x)
        ut = self.u_tilde(x)
        return self.psi(ut) + 1j * x * ut

    def saddle_residual(self, x: float) -> float:
        """|LHS - RHS| of the exponent-matching condition at x."""
        return abs(self.exponent_lhs(x) - self.exponent_rhs(x))

    def identity_gap(self, x: float) -> float:
        """|psi(u_tilde(x)) + i x u_tilde(x) - (V*(x) - x/2)|.

        Both sides are computed independently: the left through the complex
        continuation, the right through the real Legendre transform.
        """
        x = float(x)
        return abs(self.exponent_rhs(x) - (self._pipeline.v_star(x) - 0.5 * x))

    def saddle_report(self, x: np.ndarray, tolerance: float = 1e-10) -> SaddleReport:
        """Residuals over a grid; pass iff every relative residual <= tolerance."""
        grid = np.asarray(x, dtype=np.float64).reshape(-1)
        if grid.size == 0:
            raise MalformedInputError("empty saddle-check grid")
        if not np.all(np.isfinite(grid)):
            raise MalformedInputError("saddle-check grid must be finite")
        res = np.empty(grid.size)
        rel = np.empty(grid.size)
        gap = np.empty(grid.size)
        for i, xi in enumerate(grid):
            lhs = self.exponent_lhs(xi)
            res[i] = abs(lhs - self.exponent_rhs(xi))
            rel[i] = res[i] / abs(lhs)
            gap[i] = self.identity_gap(xi)
        passed = bool(np.max(rel) <= tolerance)
        return SaddleReport(
            x=grid,
            residual=res,
            relative_residual=rel,
            identity_gap=gap,
            atm_u_tilde=self.u_tilde(0.0),
            tolerance=float(tolerance),
            passed=passed,
        )
