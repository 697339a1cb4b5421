# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend.

Same algorithms and guard thresholds as ``pykernels``; see that module for
the formula derivations.  Scalar entry points are cpdef so the pricing
quadrature pays one trampoline per evaluation instead of interpreted math.
"""

import numpy as np

from libc.math cimport erfc, exp, fabs, hypot, sqrt

cdef extern from "complex.h" nogil:
    double complex csqrt(double complex)
    double complex cexp(double complex)
    double complex clog(double complex)
    double cabs(double complex)
    double creal(double complex)
    double cimag(double complex)

BACKEND = "compiled"

cdef double PHI_GUARD = 3e-5
cdef double SQRT2 = 1.4142135623730951


cdef double complex _cf(double complex z, double T, double kappa, double theta,
                        double sigma, double rho, double v0) noexcept nogil:
    cdef double complex p = z * 1j
    cdef double complex beta = kappa - rho * sigma * p
    cdef double complex pp = p * p - p
    if pp == 0:
        # p in {0, 1}: phi = 1 exactly (normalization and martingale)
        return 1.0
    cdef double complex d = csqrt(beta * beta - sigma * sigma * pp)
    cdef double ab = cabs(beta)
    cdef double complex eT, A, C, D
    if ab < 1e-300:
        ab = 1e-300
    if cabs(d) * (T + 2.0 / ab) < 1e-6:
        C = kappa * theta / (sigma * sigma) * (beta * T - 2.0 * clog(1.0 + 0.5 * beta * T))
        D = pp * T / (2.0 + beta * T)
    else:
        eT = cexp(-d * T)
        A = (beta + d) - (beta - d) * eT
        C = kappa * theta / (sigma * sigma) * ((beta - d) * T - 2.0 * clog(A / (2.0 * d)))
        D = pp * (1.0 - eT) / A
    return cexp(C + D * v0)


cpdef double complex heston_cf(double complex z, double T, double kappa, double theta,
                               double sigma, double rho, double v0):
    return _cf(z, T, kappa, theta, sigma, rho, v0)


cpdef double lewis_integrand(double u, double k, double T, double kappa, double theta,
                             double sigma, double rho, double v0):
    cdef double complex z = u - 0.5j
    cdef double complex val = cexp(-1j * u * k) * _cf(z, T, kappa, theta, sigma, rho, v0)
    return creal(val) / (u * u + 0.25)


cpdef double lewis_kernel_re(double u, double T, double kappa, double theta,
                             double sigma, double rho, double v0):
    cdef double complex z = u - 0.5j
    return creal(_cf(z, T, kappa, theta, sigma, rho, v0)) / (u * u + 0.25)


cpdef double lewis_kernel_im(double u, double T, double kappa, double theta,
                             double sigma, double rho, double v0):
    cdef double complex z = u - 0.5j
    return cimag(_cf(z, T, kappa, theta, sigma, rho, v0)) / (u * u + 0.25)


cpdef double norm_cdf(double x):
    return 0.5 * erfc(-x / SQRT2)


cpdef double bs_call(double vol, double k, double T):
    cdef double tot = vol * sqrt(T)
    cdef double d1, d2, intrinsic
    if tot <= 0.0:
        intrinsic = 1.0 - exp(k)
        return intrinsic if intrinsic > 0.0 else 0.0
    d1 = -k / tot + 0.5 * tot
    d2 = d1 - tot
    return 0.5 * erfc(-d1 / SQRT2) - exp(k) * 0.5 * erfc(-d2 / SQRT2)


def svi_variance(double[::1] x, double omega1, double omega2, double rho):
    cdef double rho_bar = sqrt(1.0 - rho * rho)
    out_arr = np.empty(x.shape[0], dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    cdef double y
    with nogil:
        for i in range(x.shape[0]):
            y = omega2 * x[i] + rho
            out[i] = 0.5 * omega1 * (1.0 + omega2 * rho * x[i] + hypot(y, rho_bar))
    return out_arr


def asym_variance_closed(double[::1] x, double kappa, double theta,
                         double sigma, double rho):
    cdef double rho_bar = sqrt(1.0 - rho * rho)
    cdef double eta = hypot(2.0 * kappa - rho * sigma, sigma * rho_bar)
    cdef double denom = eta + 2.0 * kappa - rho * sigma
    cdef double kt = kappa * theta
    out_arr = np.empty(x.shape[0], dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    cdef double a1, delta
    with nogil:
        for i in range(x.shape[0]):
            a1 = kt + rho * sigma * x[i]
            delta = hypot(a1, x[i] * sigma * rho_bar)
            out[i] = 2.0 * (a1 + delta) / denom
    return out_arr


def asym_variance_pipeline(double[::1] x, double kappa, double theta,
                           double sigma, double rho):
    cdef double rho_bar2 = 1.0 - rho * rho
    cdef double rho_bar = sqrt(rho_bar2)
    cdef double two_k = 2.0 * kappa - rho * sigma
    cdef double eta = hypot(two_k, sigma * rho_bar)
    cdef double kt = kappa * theta
    cdef double theta_bar = kt / (kappa - rho * sigma)
    out_arr = np.empty(x.shape[0], dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    cdef double xi, a1, delta, p, rad, d, v, vs, phi, guard, sqrt_phi, s
    with nogil:
        for i in range(x.shape[0]):
            xi = x[i]
            a1 = kt + rho * sigma * xi
            delta = hypot(a1, xi * sigma * rho_bar)
            p = (sigma - 2.0 * kappa * rho + (kt * rho + xi * sigma) * eta / delta) \
                / (2.0 * sigma * rho_bar2)
            rad = (kappa - rho * sigma * p) ** 2 + sigma * sigma * p * (1.0 - p)
            if rad < 0.0:
                rad = 0.0
            d = sqrt(rad)
            v = -kt * p * (1.0 - p) / (kappa - rho * sigma * p + d)
            vs = p * xi - v
            phi = vs * (vs - xi)
            if phi < 0.0:
                phi = 0.0
            guard = PHI_GUARD * (vs + fabs(xi))
            guard *= guard
            if phi < guard:
                sqrt_phi = fabs(eta * a1 - two_k * delta) / (2.0 * sigma * sigma * rho_bar2)
            else:
                sqrt_phi = sqrt(phi)
            s = 1.0 if (-0.5 * theta < xi and xi < 0.5 * theta_bar) else -1.0
            out[i] = 2.0 * (2.0 * vs - xi + 2.0 * s * sqrt_phi)
    return out_arr
