"""Least-squares raw-SVI fitting and interpretation of the fitted smile.

The objective is squared error in total variance, where raw SVI is nearly
linear in its parameters.  Bounds (|rho_tilde| < 1, sigma_tilde > 0, b >= 0)
are enforced by smooth transforms so the inner problem is unconstrained, and
a deterministic multi-start grid guards against the objective's local minima.
A converged fit carries an interpretation report: the correlation read-off,
smile minimum, wing slopes and the residual of the single-Heston-limit
consistency relation b = omega1 omega2 / (2 T).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import least_squares

from .errors import NotConvergedError, UnderdeterminedError
from .params import SVIOmegaParams, SVIRawParams, raw_omega_consistency
from .pricer import Smile

__all__ = ["FitResult", "InterpretationReport", "fit_svi", "interpret_fit"]

_GRAD_TOL = 1e-10


@dataclass(frozen=True)
class InterpretationReport:
    """Heston-flavored reading of fitted raw SVI parameters.

    Slopes are magnitudes of the total-variance wings per unit log-strike,
    b (1 -+ rho_tilde); the minimum location is reported both in log-strike
    and in the maturity-scaled coordinate x = k/T, where it equals
    -2 rho / omega2.
    """

    orientation: float
    atm_variance: float
    min_location_k: float
    min_location_x: float
    min_variance: float
    left_slope: float
    right_slope: float
    omega: SVIOmegaParams
    consistency_residual: float

    def to_dict(self) -> dict:
        return {
            "orientation": self.orientation,
            "atm_variance": self.atm_variance,
            "min_location_k": self.min_location_k,
            "min_location_x": self.min_location_x,
            "min_variance": self.min_variance,
            "left_slope": self.left_slope,
            "right_slope": self.right_slope,
            "omega": self.omega.to_dict(),
            "consistency_residual": self.consistency_residual,
        }


@dataclass(frozen=True)
class FitResult:
    """Outcome of a raw-SVI fit.

    ``objective`` is the root-mean-square error in total variance.
    ``interpretation`` is present exactly when the fit converged.
    """

    params: SVIRawParams
    objective: float
    iterations: int
    converged: bool
    interpretation: Optional[InterpretationReport] = None

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "objective": self.objective,
            "iterations": self.iterations,
            "converged": self.converged,
            "interpretation": (
                None if self.interpretation is None else self.interpretation.to_dict()
            ),
        }


def _interpret(params: SVIRawParams) -> InterpretationReport:
    a, b, rho_t, m, st = (params.a, params.b, params.rho_tilde,
                          params.m, params.sigma_tilde)
    rho_bar = math.sqrt(1.0 - rho_t * rho_t)
    omega, residual = raw_omega_consistency(params)
    k_min = m - st * rho_t / rho_bar
    return InterpretationReport(
        orientation=rho_t,
        atm_variance=a + b * (-rho_t * m + math.hypot(m, st)),
        min_location_k=k_min,
        min_location_x=k_min / params.T,
        min_variance=a + b * st * rho_bar,
        left_slope=b * (1.0 - rho_t),
        right_slope=b * (1.0 + rho_t),
        omega=omega,
        consistency_residual=residual,
    )


def interpret_fit(result: FitResult) -> InterpretationReport:
    """Interpretation report for a converged fit; refuses otherwise."""
    if not result.converged:
        raise NotConvergedError(
            "fit did not converge (objective "
            f"{result.objective:.6g} after {result.iterations} evaluations); "
            "interpretation refused"
        )
    if result.interpretation is not None:
        return result.interpretation
    return _interpret(result.params)


def _to_vector(p: SVIRawParams) -> np.ndarray:
    return np.array([p.a, math.log(p.b) if p.b > 0 else -30.0,
                     math.atanh(p.rho_tilde), p.m, math.log(p.sigma_tilde)])


def _from_vector(vec: np.ndarray, T: float) -> SVIRawParams:
    a, log_b, arc_rho, m, log_st = (float(v) for v in vec)
    b = math.exp(log_b)
    rho_t = math.tanh(arc_rho)
    st = math.exp(log_st)
    floor = -b * st * math.sqrt(1.0 - rho_t * rho_t)
    if a < floor:
        # nudge onto the nonnegative-variance boundary the transform cannot see
        a = floor
    return SVIRawParams(a=a, b=b, rho_tilde=rho_t, m=m, sigma_tilde=st, T=T)


def fit_svi(smile: Smile, initial: Optional[SVIRawParams] = None) -> FitResult:
    """Fit raw SVI to a smile by damped least squares in total variance.

    Runs a fixed grid of eight starts (plus ``initial`` when given, tried
    first) and keeps the lowest objective, ties resolved by start order, so
    the result is deterministic.  Convergence additionally requires the
    gradient infinity-norm to be within 1e-10 * (1 + objective) at the
    selected solution.
    """
    if len(smile.points) < 5:
        raise UnderdeterminedError(
            f"raw SVI has 5 free parameters; got {len(smile.points)} points"
        )
    T = smile.T
    k = smile.k
    w = smile.total_variance

    def residuals(vec: np.ndarray) -> np.ndarray:
        a, log_b, arc_rho, m, log_st = vec
        b = math.exp(log_b)
        rho_t = math.tanh(arc_rho)
        st = math.exp(log_st)
        d = k - m
        return T * (a + b * (rho_t * d + np.hypot(d, st))) - w

    def jacobian(vec: np.ndarray) -> np.ndarray:
        a, log_b, arc_rho, m, log_st = vec
        b = math.exp(log_b)
        rho_t = math.tanh(arc_rho)
        st = math.exp(log_st)
        d = k - m
        h = np.hypot(d, st)
        J = np.empty((k.size, 5))
        J[:, 0] = T
        J[:, 1] = T * b * (rho_t * d + h)
        J[:, 2] = T * b * d * (1.0 - rho_t * rho_t)
        J[:, 3] = T * b * (-rho_t - d / h)
        J[:, 4] = T * b * st * st / h
        return J

    k_lo, k_hi = float(k[0]), float(k[-1])
    span = k_hi - k_lo
    var = w / T
    v_lo = float(np.min(var))
    v_spread = max(float(np.max(var)) - v_lo, 1e-8 * max(v_lo, 1e-8))
    st0 = max(0.25 * span, 1e-6 * (1.0 + span))
    b0 = v_spread / (span + st0)
    mid = 0.5 * (k_lo + k_hi)

    starts = []
    if initial is not None:
        starts.append(_to_vector(initial))
    for rho_t in (-0.7, 0.0, 0.7):
        for m0 in (k_lo + 0.25 * span, k_lo + 0.75 * span):
            starts.append(np.array([0.5 * v_lo, math.log(b0), math.atanh(rho_t),
                                    m0, math.log(st0)]))
    for scale in (0.5, 2.0):
        starts.append(np.array([0.5 * v_lo, math.log(b0), 0.0,
                                mid, math.log(st0 * scale)]))

    best = None
    for order, vec0 in enumerate(starts):
        sol = least_squares(residuals, vec0, jac=jacobian, method="lm",
                            xtol=1e-14, ftol=1e-14, gtol=1e-14, max_nfev=5000)
        key = (sol.cost, order)
        if best is None or key < best[0]:
            best = (key, sol)
    sol = best[1]

    # Total variance is linear in (a, b) at fixed (rho_tilde, m, sigma_tilde),
    # so those two coordinates are re-solved exactly; the damped iteration's
    # step control cannot push their gradient components to the stated
    # stationarity tolerance when T inflates the Jacobian scale.
    vec = sol.x.copy()
    rho_t = math.tanh(vec[2])
    st = math.exp(vec[4])
    g = rho_t * (k - vec[3]) + np.hypot(k - vec[3], st)
    design = np.column_stack([np.ones_like(k), g])
    (a_lin, b_lin), *_ = np.linalg.lstsq(design, w / T, rcond=None)
    if b_lin > 0.0 and a_lin + b_lin * st * math.sqrt(1.0 - rho_t * rho_t) >= 0.0:
        vec[0] = a_lin
        vec[1] = math.log(b_lin)
    r_final = residuals(vec)
    cost = 0.5 * float(r_final @ r_final)
    if cost > sol.cost:
        vec = sol.x
        r_final = residuals(vec)
        cost = sol.cost
    grad = jacobian(vec).T @ r_final

    params = _from_vector(vec, T)
    objective = math.sqrt(2.0 * cost / k.size)
    grad_inf = float(np.max(np.abs(grad)))
    converged = bool(sol.success) and grad_inf <= _GRAD_TOL * (1.0 + objective)
    # a <= 0 has no omega-form counterpart; leave such fits uninterpreted
    interpretation = _interpret(params) if converged and params.a > 0.0 else None
    return FitResult(
        params=params,
        objective=objective,
        iterations=int(sol.nfev),
        converged=converged,
        interpretation=interpretation,
    )
