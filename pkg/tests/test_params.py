import math

import numpy as np
import pytest

from hestonsvi import (
    ConsistencyError,
    FellerViolationError,
    HestonParams,
    LargeCorrelationError,
    MalformedInputError,
    SVIOmegaParams,
    SVIRawParams,
    derive_constants,
    heston_to_svi_omega,
    raw_omega_consistency,
    require_asymptotic_domain,
    svi_omega_to_raw,
    svi_raw_to_omega,
    validate_heston,
)
from conftest import P0, seeded_params

# reference constants for P0, frozen from a 50-digit evaluation of the
# defining formulas
ETA_P0 = 2.1360009363293827919679
THETA_BAR_P0 = 0.04 / 1.125
P_MINUS_P0 = -2.3626691635450207786
P_PLUS_P0 = 9.0293358302116874452
OMEGA1_P0 = 0.037549862670959929917
OMEGA2_P0 = 6.25


def test_construction_rejects_bad_values():
    good = dict(kappa=1.0, theta=0.04, sigma=0.25, rho=-0.5, v0=0.04)
    for key, bad in [
        ("kappa", 0.0), ("kappa", -1.0), ("kappa", math.nan),
        ("theta", 0.0), ("sigma", -0.25), ("v0", 0.0),
        ("rho", 1.0), ("rho", -1.0), ("rho", 1.5), ("rho", math.inf),
    ]:
        with pytest.raises(MalformedInputError):
            HestonParams(**{**good, key: bad})


def test_flags_and_validation_report():
    assert P0.feller_ok and P0.assumption_ok
    assert validate_heston(P0) == []

    feller_bad = HestonParams(kappa=1.0, theta=0.01, sigma=0.5, rho=-0.5, v0=0.04)
    assert not feller_bad.feller_ok
    report = validate_heston(feller_bad)
    assert len(report) == 1 and "Feller" in report[0]

    corr_bad = HestonParams(kappa=0.5, theta=0.04, sigma=0.8, rho=0.8, v0=0.04)
    assert not corr_bad.assumption_ok
    report = validate_heston(corr_bad)
    assert any("large correlation regime" in line for line in report)


def test_rejection_names_large_correlation_regime():
    corr_bad = HestonParams(kappa=0.5, theta=0.04, sigma=0.8, rho=0.8, v0=0.04)
    with pytest.raises(LargeCorrelationError) as exc:
        require_asymptotic_domain(corr_bad)
    assert "large correlation regime" in str(exc.value)

    feller_bad = HestonParams(kappa=1.0, theta=0.01, sigma=0.5, rho=-0.5, v0=0.04)
    with pytest.raises(FellerViolationError):
        require_asymptotic_domain(feller_bad)


def test_derived_constants_reference_values():
    c = derive_constants(P0)
    assert abs(c.eta - ETA_P0) < 1e-15
    assert abs(c.rho_bar - math.sqrt(0.75)) < 1e-16
    assert abs(c.theta_bar - THETA_BAR_P0) < 1e-16
    assert abs(c.p_minus - P_MINUS_P0) < 1e-13
    assert abs(c.p_plus - P_PLUS_P0) < 1e-13


def test_moment_interval_brackets_unit_interval():
    # p_minus <= 0 and p_plus >= 1 whenever kappa - rho*sigma > 0
    for p in seeded_params(40):
        c = derive_constants(p)
        assert c.p_minus <= 0.0
        assert c.p_plus >= 1.0


def test_omega_map_reference_values():
    s = heston_to_svi_omega(P0)
    assert abs(s.omega1 - OMEGA1_P0) < 1e-15
    assert s.omega2 == 6.25
    assert s.rho == -0.5


def test_omega_map_zero_correlation():
    p = HestonParams(kappa=1.0, theta=0.04, sigma=0.25, rho=0.0, v0=0.04)
    s = heston_to_svi_omega(p)
    eta = math.hypot(2.0, 0.25)
    assert abs(s.omega1 - 0.16 / (eta + 2.0)) < 1e-16
    assert s.rho == 0.0


def test_omega_map_rejects_invalid_domains():
    corr_bad = HestonParams(kappa=0.5, theta=0.04, sigma=0.8, rho=0.8, v0=0.04)
    with pytest.raises(LargeCorrelationError):
        heston_to_svi_omega(corr_bad)


def test_raw_map_reference_values():
    raw = svi_omega_to_raw(heston_to_svi_omega(P0), T=10.0)
    assert abs(raw.a - 0.0140811985016099737) < 1e-16
    assert abs(raw.b - 0.0117343320846749781) < 1e-16
    assert raw.rho_tilde == -0.5
    assert abs(raw.m - 0.8) < 1e-15
    assert abs(raw.sigma_tilde - 1.3856406460551018348) < 1e-15


def test_raw_omega_round_trip():
    for p in seeded_params(20):
        s = heston_to_svi_omega(p)
        for T in (0.1, 1.0, 10.0, 100.0):
            back = svi_raw_to_omega(svi_omega_to_raw(s, T))
            assert abs(back.omega1 - s.omega1) <= 1e-12 * s.omega1
            assert abs(back.omega2 - s.omega2) <= 1e-12 * s.omega2
            assert abs(back.rho - s.rho) <= 1e-12


def test_consistency_residual_is_diagnostic_not_error():
    raw = svi_omega_to_raw(heston_to_svi_omega(P0), T=2.0)
    bumped = SVIRawParams(a=raw.a, b=raw.b * 1.1, rho_tilde=raw.rho_tilde,
                          m=raw.m, sigma_tilde=raw.sigma_tilde, T=raw.T)
    omega, residual = raw_omega_consistency(bumped)
    assert abs(residual - 0.1) < 1e-12
    assert abs(omega.omega1 - OMEGA1_P0) < 1e-15
    with pytest.raises(ConsistencyError) as exc:
        svi_raw_to_omega(bumped)
    assert abs(exc.value.residual - 0.1) < 1e-12


def test_raw_params_validation():
    with pytest.raises(MalformedInputError):
        SVIRawParams(a=0.01, b=-0.1, rho_tilde=0.0, m=0.0, sigma_tilde=1.0, T=1.0)
    with pytest.raises(MalformedInputError):
        SVIRawParams(a=0.01, b=0.1, rho_tilde=0.0, m=0.0, sigma_tilde=0.0, T=1.0)
    with pytest.raises(MalformedInputError):
        # minimum total variance a + b sigma_tilde sqrt(1-rho^2) below zero
        SVIRawParams(a=-1.0, b=0.1, rho_tilde=0.0, m=0.0, sigma_tilde=1.0, T=1.0)


def test_dict_round_trips():
    assert HestonParams.from_dict(P0.to_dict()) == P0
    s = heston_to_svi_omega(P0)
    assert SVIOmegaParams.from_dict(s.to_dict()) == s
    raw = svi_omega_to_raw(s, T=3.0)
    assert SVIRawParams.from_dict(raw.to_dict()) == raw


def test_seeded_params_are_reproducible_and_valid():
    a = seeded_params(10)
    b = seeded_params(10)
    assert a == b
    for p in a:
        assert p.feller_ok and p.assumption_ok
