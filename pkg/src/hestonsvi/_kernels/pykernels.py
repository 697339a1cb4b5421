"""Pure-Python kernel backend.

Scalar hot-path functions (characteristic function, pricing integrand,
Black-Scholes) use cmath/math; grid evaluators are vectorized NumPy.  The
compiled backend in ``_ckernels.pyx`` implements the same algorithms with the
same guard thresholds, so the two agree to rounding.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

BACKEND = "python"

# Switch to the exact factored square root of Phi = V*(V* - x) once the
# subtraction has lost enough digits to threaten 1e-10 relative accuracy.
PHI_GUARD = 3e-5


def heston_cf(z: complex, T: float, kappa: float, theta: float,
              sigma: float, rho: float, v0: float) -> complex:
    """phi_T(z) = E[exp(i z log S_T/S_0)], unit spot, zero rates.

    Continuous-branch form: with p = iz, beta = kappa - rho*sigma*p and
    d = sqrt(beta^2 - sigma^2 (p^2 - p)) (principal root, Re d >= 0),

        phi = exp(C + D v0),
        C = (kappa theta/sigma^2) [(beta - d) T - 2 log((beta + d - (beta - d) e^{-dT}) / (2d))],
        D = (p^2 - p)(1 - e^{-dT}) / (beta + d - (beta - d) e^{-dT}).

    The log argument equals (1 - g e^{-dT})/(1 - g) with g = (beta-d)/(beta+d),
    which stays clear of the negative real axis on the strips used here, so the
    principal branch is continuous in T.
    """
    p = 1j * z
    beta = kappa - rho * sigma * p
    pp = p * p - p
    if pp == 0:
        # p in {0, 1}: phi = 1 exactly (normalization and martingale)
        return 1.0 + 0.0j
    d = cmath.sqrt(beta * beta - sigma * sigma * pp)
    if abs(d) * (T + 2.0 / max(abs(beta), 1e-300)) < 1e-6:
        # moment boundary (d ~ 0): first-order expansion in d
        C = kappa * theta / (sigma * sigma) * (beta * T - 2.0 * cmath.log(1.0 + 0.5 * beta * T))
        D = pp * T / (2.0 + beta * T)
    else:
        eT = cmath.exp(-d * T)
        A = (beta + d) - (beta - d) * eT
        C = kappa * theta / (sigma * sigma) * ((beta - d) * T - 2.0 * cmath.log(A / (2.0 * d)))
        D = pp * (1.0 - eT) / A
    return cmath.exp(C + D * v0)


def lewis_integrand(u: float, k: float, T: float, kappa: float, theta: float,
                    sigma: float, rho: float, v0: float) -> float:
    """Re[e^{-iuk} phi_T(u - i/2)] / (u^2 + 1/4)."""
    val = cmath.exp(-1j * u * k) * heston_cf(complex(u, -0.5), T, kappa, theta, sigma, rho, v0)
    return val.real / (u * u + 0.25)


def lewis_kernel_re(u: float, T: float, kappa: float, theta: float,
                    sigma: float, rho: float, v0: float) -> float:
    """Re phi_T(u - i/2) / (u^2 + 1/4), for cosine-weighted quadrature."""
    val = heston_cf(complex(u, -0.5), T, kappa, theta, sigma, rho, v0)
    return val.real / (u * u + 0.25)


def lewis_kernel_im(u: float, T: float, kappa: float, theta: float,
                    sigma: float, rho: float, v0: float) -> float:
    """Im phi_T(u - i/2) / (u^2 + 1/4), for sine-weighted quadrature."""
    val = heston_cf(complex(u, -0.5), T, kappa, theta, sigma, rho, v0)
    return val.imag / (u * u + 0.25)


def norm_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def bs_call(vol: float, k: float, T: float) -> float:
    """Black-Scholes call, unit spot, zero rates, strike exp(k)."""
    tot = vol * math.sqrt(T)
    if tot <= 0.0:
        return max(1.0 - math.exp(k), 0.0)
    d1 = -k / tot + 0.5 * tot
    d2 = d1 - tot
    return norm_cdf(d1) - math.exp(k) * norm_cdf(d2)


def svi_variance(x: np.ndarray, omega1: float, omega2: float, rho: float) -> np.ndarray:
    """(omega1/2)(1 + omega2 rho x + sqrt((omega2 x + rho)^2 + 1 - rho^2))."""
    x = np.asarray(x, dtype=np.float64)
    y = omega2 * x + rho
    return 0.5 * omega1 * (1.0 + omega2 * rho * x + np.hypot(y, math.sqrt(1.0 - rho * rho)))


def asym_variance_closed(x: np.ndarray, kappa: float, theta: float,
                         sigma: float, rho: float) -> np.ndarray:
    """Closed form 2 (kappa theta + rho sigma x + Delta(x)) / (eta + 2 kappa - rho sigma).

    Rationalized from (2/(sigma^2 (1-rho^2))) (eta - (2 kappa - rho sigma))
    (kappa theta + rho sigma x + Delta(x)); Delta(x) is evaluated as
    hypot(kappa theta + rho sigma x, x sigma sqrt(1-rho^2)), which is exact
    algebra and immune to overflow in x^2.
    """
    x = np.asarray(x, dtype=np.float64)
    rho_bar = math.sqrt(1.0 - rho * rho)
    eta = math.hypot(2.0 * kappa - rho * sigma, sigma * rho_bar)
    a1 = kappa * theta + rho * sigma * x
    delta = np.hypot(a1, x * sigma * rho_bar)
    return 2.0 * (a1 + delta) / (eta + 2.0 * kappa - rho * sigma)


def asym_variance_pipeline(x: np.ndarray, kappa: float, theta: float,
                           sigma: float, rho: float) -> np.ndarray:
    """Large-maturity variance assembled from the rate-function pipeline.

    Per point: the saddle p*(x), the limiting cumulant V at p*, the Legendre
    transform V*(x) = p* x - V(p*), Phi = V*(V* - x), then
    2 (2V* - x + 2 s sqrt(Phi)) with s = +1 inside (-theta/2, theta_bar/2) and
    -1 outside.  Near the interval endpoints Phi vanishes to second order and
    the direct product loses precision, so sqrt(Phi) switches to its factored
    form |eta (kappa theta + x rho sigma) - (2 kappa - rho sigma) Delta(x)| /
    (2 sigma^2 (1 - rho^2)) once Phi < (3e-5 (V* + |x|))^2.
    """
    x = np.asarray(x, dtype=np.float64)
    rho_bar2 = 1.0 - rho * rho
    rho_bar = math.sqrt(rho_bar2)
    two_k = 2.0 * kappa - rho * sigma
    eta = math.hypot(two_k, sigma * rho_bar)
    kt = kappa * theta
    theta_bar = kt / (kappa - rho * sigma)

    a1 = kt + rho * sigma * x
    delta = np.hypot(a1, x * sigma * rho_bar)
    p = (sigma - 2.0 * kappa * rho + (kt * rho + x * sigma) * eta / delta) / (2.0 * sigma * rho_bar2)
    rad = (kappa - rho * sigma * p) ** 2 + sigma * sigma * p * (1.0 - p)
    d = np.sqrt(np.maximum(rad, 0.0))
    v = -kt * p * (1.0 - p) / (kappa - rho * sigma * p + d)
    vs = p * x - v
    phi = np.maximum(vs * (vs - x), 0.0)
    sqrt_phi_factored = np.abs(eta * a1 - two_k * delta) / (2.0 * sigma * sigma * rho_bar2)
    guard = (PHI_GUARD * (vs + np.abs(x))) ** 2
    sqrt_phi = np.where(phi < guard, sqrt_phi_factored, np.sqrt(phi))
    s = np.where((x > -0.5 * theta) & (x < 0.5 * theta_bar), 1.0, -1.0)
    return 2.0 * (2.0 * vs - x + 2.0 * s * sqrt_phi)
