"""Large-maturity Heston smile: rate-function pipeline and closed form.

The limiting implied variance at scaled log-moneyness x = k/T is assembled
in two independent ways:

* pipeline: saddle point p*(x), limiting cumulant V(p), Legendre transform
  V*(x) = p*(x) x - V(p*(x)), Phi(x) = V*^2 - x V*, then
  2 (2 V*(x) - x + 2 s sqrt(Phi(x))) with s = +1 on (-theta/2, theta_bar/2)
  and -1 outside;
* closed form: 2 (kappa theta + rho sigma x + Delta(x)) / (eta + 2 kappa -
  rho sigma), which is an SVI smile in x.

Their pointwise agreement (and agreement with the omega-form SVI produced by
the parameter map) is the identity this package exists to verify; see
:meth:`AsymptoticPipeline.verify_equivalence`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as kernels
from ._kernels.pykernels import PHI_GUARD
from .errors import DomainError, MalformedInputError
from .params import (
    DerivedConstants,
    HestonParams,
    SVIOmegaParams,
    derive_constants,
    heston_to_svi_omega,
)
from .svi import ArrayLike, _eval_grid

__all__ = ["AsymptoticPipeline", "EquivalenceReport"]


@dataclass(frozen=True)
class EquivalenceReport:
    """Pointwise comparison of the pipeline, closed-form and SVI variances."""

    x: np.ndarray
    pipeline: np.ndarray
    closed: np.ndarray
    svi: np.ndarray
    max_abs_deviation: float
    max_rel_deviation: float
    argmax_x: float
    tolerance: float
    passed: bool

    def summary(self) -> dict:
        return {
            "n_points": int(self.x.size),
            "x_min": float(self.x[0]),
            "x_max": float(self.x[-1]),
            "max_abs_deviation": self.max_abs_deviation,
            "max_rel_deviation": self.max_rel_deviation,
            "argmax_x": self.argmax_x,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


class AsymptoticPipeline:
    """Large-maturity smile machinery for one set of Heston parameters.

    Construction rejects parameters outside the asymptotic domain: the large
    correlation regime (kappa - rho*sigma <= 0) and Feller violations are
    hard errors here.  The initial variance v0 plays no role in the limit.
    """

    def __init__(self, params: HestonParams):
        self.params = params
        self.constants: DerivedConstants = derive_constants(params)
        self.omega: SVIOmegaParams = heston_to_svi_omega(params)
        k, t, s, r = params.kappa, params.theta, params.sigma, params.rho
        self._kt = k * t
        self._rho_bar2 = 1.0 - r * r
        self._rho_bar = math.sqrt(self._rho_bar2)
        # closed interval [p_minus, p_plus] with a rounding allowance
        self._p_tol = 1e-12 * (abs(self.constants.p_minus) + abs(self.constants.p_plus))

    # -- p-space ------------------------------------------------------------

    def _check_p(self, p: float) -> float:
        p = float(p)
        if not math.isfinite(p):
            raise MalformedInputError(f"p must be finite, got {p!r}")
        if p < self.constants.p_minus - self._p_tol or p > self.constants.p_plus + self._p_tol:
            raise DomainError(
                f"p = {p!r} outside the moment interval "
                f"[{self.constants.p_minus!r}, {self.constants.p_plus!r}]"
            )
        return p

    def d_of_p(self, p: float) -> float:
        """sqrt((kappa - rho sigma p)^2 + sigma^2 p (1 - p)); zero at p_minus and p_plus."""
        p = self._check_p(p)
        k, s, r = self.params.kappa, self.params.sigma, self.params.rho
        rad = (k - r * s * p) ** 2 + s * s * p * (1.0 - p)
        return math.sqrt(max(rad, 0.0))

    def v_of_p(self, p: float) -> float:
        """Limiting cumulant V(p) = (kappa theta/sigma^2)(kappa - rho sigma p - d(p)).

        Evaluated in the rationalized form -kappa theta p (1 - p) / (kappa -
        rho sigma p + d(p)), which is exact by the defining quadratic for d
        and makes V(0) = V(1) = 0 hold to the last bit.
        """
        p = self._check_p(p)
        k, s, r = self.params.kappa, self.params.sigma, self.params.rho
        return -self._kt * p * (1.0 - p) / (k - r * s * p + self.d_of_p(p))

    # -- x-space ------------------------------------------------------------

    def delta_of_x(self, x: float) -> float:
        """Delta(x) = sqrt(sigma^2 x^2 + 2 kappa theta rho sigma x + kappa^2 theta^2).

        Computed as hypot(kappa theta + x rho sigma, x sigma sqrt(1 - rho^2)),
        the exact completed-square form, so extreme |x| neither overflows nor
        loses the wings.
        """
        x = self._check_x(x)
        s, r = self.params.sigma, self.params.rho
        return math.hypot(self._kt + x * r * s, x * s * self._rho_bar)

    def p_star(self, x: float) -> float:
        """Saddle location: strictly increasing in x, from p_minus to p_plus."""
        x = self._check_x(x)
        k, s, r = self.params.kappa, self.params.sigma, self.params.rho
        num = s - 2.0 * k * r + (self._kt * r + x * s) * self.constants.eta / self.delta_of_x(x)
        return num / (2.0 * s * self._rho_bar2)

    def v_star(self, x: float) -> float:
        """Legendre transform V*(x) = p*(x) x - V(p*(x)); nonnegative."""
        x = self._check_x(x)
        p = self.p_star(x)
        return p * x - self.v_of_p(p)

    def v_star_closed(self, x: float) -> float:
        """V*(x) = (A(x) + Delta(x) eta) / (2 sigma^2 (1 - rho^2)) with
        A(x) = x sigma^2 - 2 x kappa rho sigma - 2 kappa^2 theta + kappa theta rho sigma."""
        x = self._check_x(x)
        k, t, s, r = (self.params.kappa, self.params.theta, self.params.sigma, self.params.rho)
        A = x * s * s - 2.0 * x * k * r * s - 2.0 * k * k * t + k * t * r * s
        return (A + self.delta_of_x(x) * self.constants.eta) / (2.0 * s * s * self._rho_bar2)

    def phi_of_x(self, x: float) -> float:
        """Phi(x) = V*(x)^2 - x V*(x), from the definition (clamped at 0)."""
        x = self._check_x(x)
        vs = self.v_star(x)
        return max(vs * (vs - x), 0.0)

    def phi_of_x_factored(self, x: float) -> float:
        """Phi(x) as the exact square (eta (kappa theta + x rho sigma) -
        (2 kappa - rho sigma) Delta(x))^2 / (4 sigma^4 (1 - rho^2)^2)."""
        x = self._check_x(x)
        k, s, r = self.params.kappa, self.params.sigma, self.params.rho
        num = self.constants.eta * (self._kt + x * r * s) - (2.0 * k - r * s) * self.delta_of_x(x)
        return (num / (2.0 * s * s * self._rho_bar2)) ** 2

    def sign_polynomial(self, x: float) -> float:
        """sigma^2 (1-rho^2) [(kappa theta + x rho sigma)^2 - x^2 (2 kappa - rho sigma)^2].

        Shares its sign with eta (kappa theta + x rho sigma) - (2 kappa - rho
        sigma) Delta(x); its roots are exactly -theta/2 and theta_bar/2.
        """
        x = self._check_x(x)
        k, s, r = self.params.kappa, self.params.sigma, self.params.rho
        return (
            s * s * self._rho_bar2
            * ((self._kt + x * r * s) ** 2 - x * x * (2.0 * k - r * s) ** 2)
        )

    @property
    def boundaries(self) -> tuple[float, float]:
        """(-theta/2, theta_bar/2): where the indicator in the variance flips."""
        return -0.5 * self.params.theta, 0.5 * self.constants.theta_bar

    # -- assembled variance ---------------------------------------------------

    def variance_pipeline(self, x: ArrayLike) -> ArrayLike:
        """Limiting variance assembled from p*, V*, Phi and the indicator."""
        p = self.params
        return _eval_grid(x, kernels.asym_variance_pipeline, p.kappa, p.theta, p.sigma, p.rho)

    def variance_closed(self, x: ArrayLike) -> ArrayLike:
        """Limiting variance from the closed form (an SVI smile in x)."""
        p = self.params
        return _eval_grid(x, kernels.asym_variance_closed, p.kappa, p.theta, p.sigma, p.rho)

    def branch_values(self, x: float) -> tuple[float, float]:
        """Both indicator branches 2 (2V* - x +/- 2 sqrt(Phi)) at one point.

        They coincide where Phi = 0, i.e. at the boundaries; elsewhere exactly
        one of them is the limiting variance.
        """
        x = self._check_x(x)
        vs = self.v_star(x)
        phi = max(vs * (vs - x), 0.0)
        if phi < (PHI_GUARD * (vs + abs(x))) ** 2:
            sqrt_phi = self.phi_of_x_factored(x) ** 0.5
        else:
            sqrt_phi = math.sqrt(phi)
        base = 2.0 * vs - x
        return 2.0 * (base + 2.0 * sqrt_phi), 2.0 * (base - 2.0 * sqrt_phi)

    def verify_equivalence(self, x: ArrayLike, tolerance: float = 1e-10) -> EquivalenceReport:
        """Evaluate all three variance routes on a grid and compare pointwise.

        The reported relative deviation at each point is the largest pairwise
        gap divided by the closed-form value; ``passed`` means the maximum
        over the grid is within ``tolerance``.
        """
        grid = np.asarray(x, dtype=np.float64).reshape(-1)
        if grid.size == 0:
            raise MalformedInputError("empty verification grid")
        if not np.all(np.isfinite(grid)):
            raise MalformedInputError("verification grid must be finite")
        pipeline = np.asarray(self.variance_pipeline(grid))
        closed = np.asarray(self.variance_closed(grid))
        svi = np.asarray(kernels.svi_variance(
            np.ascontiguousarray(grid), self.omega.omega1, self.omega.omega2, self.omega.rho
        ))
        dev = np.maximum(
            np.abs(pipeline - closed),
            np.maximum(np.abs(pipeline - svi), np.abs(closed - svi)),
        )
        rel = dev / closed
        i = int(np.argmax(rel))
        passed = bool(rel[i] <= tolerance)
        return EquivalenceReport(
            x=grid,
            pipeline=pipeline,
            closed=closed,
            svi=svi,
            max_abs_deviation=float(dev[i]),
            max_rel_deviation=float(rel[i]),
            argmax_x=float(grid[i]),
            tolerance=float(tolerance),
            passed=passed,
        )

    @staticmethod
    def _check_x(x: float) -> float:
        x = float(x)
        if not math.isfinite(x):
            raise MalformedInputError(f"x must be finite, got {x!r}")
        return x
