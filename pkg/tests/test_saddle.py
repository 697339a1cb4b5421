import cmath
import math

import numpy as np
import pytest

from hestonsvi import (
    HestonParams,
    LargeCorrelationError,
    MalformedInputError,
    SaddleContext,
    heston_cf,
)
from conftest import P0, seeded_params

PSI_0 = 0.004689710744947590526
U_TILDE_0_IMAG = 0.014667915105843722624


@pytest.fixture(scope="module")
def ctx():
    return SaddleContext(P0)


def test_context_rejects_large_correlation():
    with pytest.raises(LargeCorrelationError):
        SaddleContext(HestonParams(kappa=0.5, theta=0.04, sigma=0.8, rho=0.8, v0=0.04))


def test_cumulant_continuation_zeros(ctx):
    assert ctx.v_complex(0.0) == 0.0
    assert ctx.v_complex(1.0) == 0.0
    assert ctx.v_complex(0.0 + 0.0j) == 0.0


def test_cumulant_continuation_conjugate_symmetry(ctx):
    rng = np.random.default_rng(11)
    for _ in range(50):
        p = complex(rng.uniform(-2.0, 3.0), rng.uniform(-2.0, 2.0))
        a = ctx.v_complex(p.conjugate())
        b = ctx.v_complex(p).conjugate()
        assert cmath.isclose(a, b, rel_tol=1e-14, abs_tol=1e-300)


def test_cumulant_continuation_matches_real_restriction(ctx):
    c = ctx.constants
    for p in np.linspace(c.p_minus + 1e-9, c.p_plus - 1e-9, 31):
        zc = ctx.v_complex(complex(p))
        zr = ctx._pipeline.v_of_p(float(p))
        assert zc.imag == 0.0
        assert abs(zc.real - zr) <= 1e-14 * max(abs(zr), 1e-6)


def test_cumulant_continuation_rejects_nonfinite(ctx):
    with pytest.raises(MalformedInputError):
        ctx.v_complex(complex(math.nan, 0.0))
    with pytest.raises(MalformedInputError):
        ctx.v_complex(complex(0.0, math.inf))


def test_exponent_reference_values(ctx):
    z = ctx.psi(0.0)
    assert z.imag == 0.0
    assert abs(z.real - PSI_0) < 1e-17
    # p = 0 and p = 1 are zeros of the cumulant, reached at u = +/- i/2
    assert abs(ctx.psi(0.5j)) == 0.0
    assert abs(ctx.psi(-0.5j)) == 0.0


def test_stationary_point_reference(ctx):
    ut = ctx.u_tilde(0.0)
    assert ut.real == 0.0
    assert abs(ut.imag - U_TILDE_0_IMAG) < 5e-16
    for x in np.linspace(-0.4, 0.4, 9):
        assert ctx.u_tilde(float(x)).real == 0.0


def test_stationary_point_vanishes_for_zero_correlation():
    ctx = SaddleContext(HestonParams(kappa=1.0, theta=0.04, sigma=0.25, rho=0.0, v0=0.04))
    assert ctx.u_tilde(0.0) == 0.0


def test_saddle_equation_gap(ctx):
    # psi'(u_tilde(x)) = -ix up to the finite-difference truncation error
    for x in np.linspace(-0.4, 0.4, 21):
        assert ctx.saddle_equation_gap(float(x)) <= 1e-8 * (1.0 + abs(x))


def test_exponent_identity_gap(ctx):
    for x in np.linspace(-0.4, 0.4, 21):
        assert ctx.identity_gap(float(x)) <= 1e-12


def test_matching_condition_residual(ctx):
    assert ctx.saddle_residual(0.0) <= 1e-12
    for x in np.linspace(-0.4, 0.4, 21):
        lhs = ctx.exponent_lhs(float(x))
        assert ctx.saddle_residual(float(x)) <= 1e-10 * abs(lhs)


def test_report_fixture(ctx):
    x = np.linspace(-0.4, 0.4, 21)
    report = ctx.saddle_report(x)
    assert report.passed
    assert np.max(report.relative_residual) <= 1e-10
    assert np.max(report.identity_gap) <= 1e-12
    s = report.summary()
    assert s["pass"] is True
    assert s["n_points"] == 21
    assert abs(s["atm_u_tilde_imag"] - U_TILDE_0_IMAG) < 5e-16


def test_report_seeded_sets():
    for p in seeded_params(10):
        ctx = SaddleContext(p)
        x = np.linspace(-10.0 * p.theta, 10.0 * p.theta, 21)
        report = ctx.saddle_report(x)
        assert report.passed, p
        assert np.max(report.identity_gap) <= 1e-12


def test_report_rejects_bad_grids(ctx):
    with pytest.raises(MalformedInputError):
        ctx.saddle_report(np.array([]))
    with pytest.raises(MalformedInputError):
        ctx.saddle_report(np.array([0.0, math.nan]))


def test_finite_maturity_cumulant_approaches_exponent(ctx):
    # (1/T) log cf_T(u - i/2) -> -psi(u); the gap decays like 1/T
    for u in (0.1, 0.5, 1.0):
        target = -ctx.psi(u)
        gaps = {}
        for T in (50.0, 100.0):
            log_cf = cmath.log(heston_cf(P0, complex(u, -0.5), T))
            gaps[T] = abs(log_cf / T - target)
        assert gaps[100.0] < gaps[50.0]
        ratio = gaps[100.0] / gaps[50.0]
        assert 0.45 < ratio < 0.55, (u, gaps)
