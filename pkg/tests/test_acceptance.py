"""Acceptance suite: one test and one printed pass/fail line per criterion.

Run with ``pytest -v`` to get the per-criterion verdict lines; the printed
details (worst deviations, runtimes) appear with ``-s`` or on failure.
"""

import math
import time

import numpy as np
from scipy.optimize import brentq

from hestonsvi import (
    AsymptoticPipeline,
    HestonParams,
    LargeCorrelationError,
    SaddleContext,
    bs_call_price,
    convergence_study,
    derive_constants,
    fit_svi,
    heston_cf,
    heston_limit_smile,
    heston_smile,
    heston_to_svi_omega,
    implied_vol,
    omega1_large_vvol_approx,
    omega1_small_vvol_approx,
    require_asymptotic_domain,
    smile_minimum,
    svi_omega_to_raw,
    svi_omega_variance,
    svi_raw_to_omega,
    svi_raw_total_variance,
    wing_slopes,
)
from hestonsvi.cli import main as cli_main
from conftest import P0, seeded_params


def _verdict(num: int, name: str, ok: bool, detail: str) -> None:
    print(f"criterion {num} ({name}): {'PASS' if ok else 'FAIL'} [{detail}]")
    assert ok, f"criterion {num} ({name}): {detail}"


def test_criterion_1_limit_smile_equivalence():
    start = time.perf_counter()
    worst = 0.0
    for p in [P0] + seeded_params(100):
        pipe = AsymptoticPipeline(p)
        grid = np.linspace(-10.0 * p.theta, 10.0 * p.theta, 1001)
        report = pipe.verify_equivalence(grid, tolerance=1e-10)
        worst = max(worst, report.max_rel_deviation)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and elapsed <= 5.0
    _verdict(1, "pipeline/closed/SVI equivalence", ok,
             f"max rel deviation {worst:.3e} <= 1e-10 over 101 sets x 1001 points, "
             f"{elapsed:.2f} s <= 5 s")


def test_criterion_2_saddle_point_identity():
    start = time.perf_counter()
    worst_res = 0.0
    worst_gap = 0.0
    for p in [P0] + seeded_params(100):
        ctx = SaddleContext(p)
        grid = np.linspace(-10.0 * p.theta, 10.0 * p.theta, 21)
        report = ctx.saddle_report(grid, tolerance=1e-10)
        worst_res = max(worst_res, float(np.max(report.relative_residual)))
        worst_gap = max(worst_gap, float(np.max(report.identity_gap)))
    elapsed = time.perf_counter() - start
    ok = worst_res <= 1e-10 and worst_gap <= 1e-12 and elapsed <= 5.0
    _verdict(2, "exponent matching at the saddle", ok,
             f"max rel residual {worst_res:.3e} <= 1e-10, "
             f"max identity gap {worst_gap:.3e} <= 1e-12, {elapsed:.2f} s <= 5 s")


def test_criterion_3_boundary_structure():
    pipe = AsymptoticPipeline(P0)
    scale = (P0.kappa * P0.theta) ** 2
    root_residual = max(abs(pipe.sign_polynomial(b)) for b in pipe.boundaries)
    branch_gap = 0.0
    phi_peak = 0.0
    for xb in pipe.boundaries:
        for x in (xb - 1e-8, xb, xb + 1e-8):
            plus, minus = pipe.branch_values(x)
            branch_gap = max(branch_gap, abs(plus - minus))
            phi_peak = max(phi_peak, pipe.phi_of_x(x))
    ok = root_residual <= 1e-12 * scale and branch_gap <= 1e-6 and phi_peak <= 1e-12
    _verdict(3, "sign-polynomial roots and branch agreement", ok,
             f"root residual {root_residual:.3e} <= {1e-12 * scale:.3e}, "
             f"branch gap {branch_gap:.3e} <= 1e-6, Phi peak {phi_peak:.3e} <= 1e-12")


def test_criterion_4_cf_normalization_martingale():
    worst = 0.0
    for p in [P0] + seeded_params(20):
        for T in (0.1, 1.0, 10.0):
            worst = max(worst, abs(heston_cf(p, 0.0, T) - 1.0))
            worst = max(worst, abs(heston_cf(p, -1.0j, T) - 1.0))
    ok = worst <= 1e-12
    _verdict(4, "cf normalization and martingale", ok,
             f"max |cf - 1| = {worst:.3e} <= 1e-12 for T in {{0.1, 1, 10}}")


def test_criterion_5_convergence_to_limit_smile():
    start = time.perf_counter()
    report = convergence_study(P0, [1.0, 5.0, 20.0, 50.0], np.linspace(-0.05, 0.05, 11))
    elapsed = time.perf_counter() - start
    errors = report.max_rel_error
    ok = (report.strictly_decreasing
          and errors[-1] <= errors[0] / 5.0
          and elapsed <= 60.0)
    _verdict(5, "finite-maturity convergence", ok,
             "errors " + ", ".join(f"{e:.4f}" for e in errors)
             + f" strictly decreasing, err(50) {errors[-1]:.4f} <= err(1)/5 "
             f"= {errors[0] / 5.0:.4f}, {elapsed:.2f} s <= 60 s")


def test_criterion_6_interpretation_suite():
    problems = []

    # sigma^2(0) = omega1, bit exact
    for p in [P0] + seeded_params(100):
        s = heston_to_svi_omega(p)
        if svi_omega_variance(s, 0.0) != s.omega1:
            problems.append(f"atm variance != omega1 for {p}")
            break

    # numerical argmin within 1e-9/omega2 of -2 rho/omega2
    for p in [P0] + seeded_params(10):
        s = heston_to_svi_omega(p)
        x_ref = -2.0 * s.rho / s.omega2
        h = 1e-6 / s.omega2

        def dvar(x):
            return (svi_omega_variance(s, x + h) - svi_omega_variance(s, x - h)) / (2.0 * h)

        x_num = brentq(dvar, x_ref - 1.0 / s.omega2, x_ref + 1.0 / s.omega2,
                       xtol=1e-15, rtol=4.0 * np.finfo(float).eps)
        if abs(x_num - x_ref) > 1e-9 / s.omega2:
            problems.append(f"argmin off by {abs(x_num - x_ref):.3e} for {p}")

    # wing slopes within 0.1% at |omega2 x| = 1e4
    s = heston_to_svi_omega(P0)
    left, right = wing_slopes(s)
    far = 1e4 / s.omega2
    for sign, want in ((-1.0, left), (1.0, right)):
        a = svi_omega_variance(s, sign * far)
        b = svi_omega_variance(s, sign * (far + 1.0))
        secant = sign * (b - a)
        if abs(secant - want) > 1e-3 * abs(want):
            problems.append(f"wing slope {secant!r} vs {want!r}")

    # small vol-of-vol expansion error bound at sigma/kappa = 1e-3
    p_small = HestonParams(kappa=1.0, theta=0.04, sigma=1e-3, rho=-0.5, v0=0.04)
    small_err = abs(omega1_small_vvol_approx(p_small) - heston_to_svi_omega(p_small).omega1)
    small_bound = 2.0 * p_small.theta * (p_small.sigma / p_small.kappa) ** 2
    if small_err > small_bound:
        problems.append(f"small-vvol error {small_err:.3e} > {small_bound:.3e}")

    # large vol-of-vol expansion: second-order decay between kappa/sigma 0.1 and 0.01
    rels = []
    for sigma, theta in ((10.0, 50.0), (100.0, 5000.0)):
        p_large = HestonParams(kappa=1.0, theta=theta, sigma=sigma, rho=-0.5, v0=theta)
        exact = heston_to_svi_omega(p_large).omega1
        rels.append(abs(omega1_large_vvol_approx(p_large) - exact) / exact)
    decay_ratio = rels[0] / rels[1]
    if not 50.0 < decay_ratio < 150.0:
        problems.append(f"large-vvol decay ratio {decay_ratio:.1f} not second order")

    ok = not problems
    _verdict(6, "limit-smile interpretation", ok,
             "; ".join(problems) if problems
             else f"atm exact, argmin within 1e-9/omega2, slopes within 0.1%, "
                  f"small-vvol err {small_err:.2e} <= {small_bound:.2e}, "
                  f"large-vvol decay ratio {decay_ratio:.1f}")


def test_criterion_7_parameter_map_identity():
    worst_map = 0.0
    worst_round = 0.0
    for p in [P0] + seeded_params(25):
        s = heston_to_svi_omega(p)
        x = np.linspace(-10.0 * p.theta, 10.0 * p.theta, 41)
        target = svi_omega_variance(s, x)
        for T in (0.1, 1.0, 10.0, 100.0):
            raw = svi_omega_to_raw(s, T)
            w = svi_raw_total_variance(raw, x * T)
            worst_map = max(worst_map, float(np.max(np.abs(w - T * target) / (T * target))))
            back = svi_raw_to_omega(raw)
            worst_round = max(
                worst_round,
                abs(back.omega1 - s.omega1) / s.omega1,
                abs(back.omega2 - s.omega2) / s.omega2,
                abs(back.rho - s.rho) / max(abs(s.rho), 1.0),
            )
    ok = worst_map <= 1e-12 and worst_round <= 1e-12
    _verdict(7, "raw/omega parameter map", ok,
             f"max map deviation {worst_map:.3e} <= 1e-12, "
             f"max roundtrip deviation {worst_round:.3e} <= 1e-12")


def test_criterion_8_inversion_round_trips():
    # Black-Scholes implied vol on 1000 seeded cases; cases are kept inside
    # |d1|, |d2| <= 4 where the inversion is well posed at double precision
    # (vega decays like exp(-d^2/2), so far outside no solver can reach 1e-10)
    rng = np.random.default_rng(20240818)
    worst_iv = 0.0
    count = 0
    draws = 0
    while count < 1000:
        draws += 1
        assert draws < 20000, "sampling budget exceeded"
        vol = float(rng.uniform(0.01, 1.5))
        k = float(rng.uniform(-2.0, 2.0))
        T = float(rng.uniform(0.05, 50.0))
        s = vol * math.sqrt(T)
        d1 = -k / s + 0.5 * s
        if abs(d1) > 4.0 or abs(d1 - s) > 4.0:
            continue
        price = bs_call_price(vol, k, T)
        if not max(1.0 - math.exp(k), 0.0) < price < 1.0:
            continue
        worst_iv = max(worst_iv, abs(implied_vol(price, k, T) - vol))
        count += 1

    # noiseless synthetic raw-parameter recovery
    truth = svi_omega_to_raw(heston_to_svi_omega(P0), 10.0)
    k_grid = truth.m + np.linspace(-4.0, 4.0, 13) * truth.sigma_tilde
    w = svi_raw_total_variance(truth, k_grid)
    from hestonsvi import Smile
    smile = Smile(T=truth.T, points=tuple(zip(
        k_grid.tolist(), np.sqrt(w / truth.T).tolist()
    )))
    fitted = fit_svi(smile)
    worst_fit = max(
        abs(getattr(fitted.params, name) - getattr(truth, name))
        / max(abs(getattr(truth, name)), 1e-12)
        for name in ("a", "b", "rho_tilde", "m", "sigma_tilde")
    )

    # orientation recovered from a T = 50 priced smile
    priced = heston_smile(P0, 50.0, np.linspace(-0.14, 0.14, 21))
    assert priced.failures == ()
    rho_err = abs(fit_svi(priced).interpretation.orientation - P0.rho)

    ok = (worst_iv <= 1e-10 and fitted.converged and worst_fit <= 1e-6
          and rho_err <= 0.02)
    _verdict(8, "inversion round trips", ok,
             f"max BS inversion error {worst_iv:.3e} <= 1e-10 over 1000 cases, "
             f"max raw recovery error {worst_fit:.3e} <= 1e-6, "
             f"priced-smile orientation error {rho_err:.4f} <= 0.02")


def test_criterion_9_large_correlation_rejection(capsys):
    bad_sets = [
        HestonParams(kappa=0.5, theta=0.04, sigma=0.8, rho=0.8, v0=0.04),
        HestonParams(kappa=0.4, theta=0.04, sigma=0.8, rho=0.5, v0=0.04),  # exactly 0
    ]
    operations = [
        ("require_asymptotic_domain", require_asymptotic_domain),
        ("derive_constants", derive_constants),
        ("heston_to_svi_omega", heston_to_svi_omega),
        ("heston_limit_smile", heston_limit_smile),
        ("omega1_small_vvol_approx", omega1_small_vvol_approx),
        ("omega1_large_vvol_approx", omega1_large_vvol_approx),
        ("AsymptoticPipeline", AsymptoticPipeline),
        ("SaddleContext", SaddleContext),
        ("convergence_study", lambda p: convergence_study(p, [1.0, 2.0], [0.0])),
    ]
    problems = []
    for p in bad_sets:
        assert p.kappa - p.rho * p.sigma <= 0.0
        for name, op in operations:
            try:
                op(p)
                problems.append(f"{name} accepted {p}")
            except LargeCorrelationError as exc:
                if "large correlation regime" not in str(exc):
                    problems.append(f"{name} message lacks the regime name: {exc}")
    # CLI surfaces exit code 2 with the same diagnostic
    flags = ["--kappa", "0.5", "--theta", "0.04", "--sigma", "0.8", "--rho", "0.8"]
    for command in (["asymptote"], ["verify"], ["saddle-check"],
                    ["converge", "--T", "1,2"]):
        code = cli_main(command + flags)
        err = capsys.readouterr().err
        if code != 2:
            problems.append(f"cli {command[0]} exit {code} != 2")
        if "large correlation regime" not in err:
            problems.append(f"cli {command[0]} stderr lacks the regime name")
    ok = not problems
    _verdict(9, "large-correlation rejection", ok,
             "; ".join(problems) if problems
             else f"{len(operations)} operations x {len(bad_sets)} parameter sets "
                  "+ 4 cli commands all reject with the regime diagnostic")
