"""Command-line interface.

Every operation of the package is reachable as a subcommand, with CSV output
for curves and JSON run reports for verification commands, so each check can
be scripted and reproduced.  Numbers are serialized with 17 significant
digits, which round-trips doubles exactly.

Exit codes: 0 success or verification pass, 1 verification fail, 2 invalid
input, 3 numerical-accuracy failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from typing import Optional

import numpy as np

from ._serialize import dumps, fmt_float
from .asymptotic import AsymptoticPipeline
from .errors import (
    DomainError,
    HestonSviError,
    MalformedInputError,
    NotConvergedError,
    QuadratureAccuracyError,
)
from .fit import fit_svi
from .params import HestonParams, heston_to_svi_omega, svi_omega_to_raw
from .pricer import QuadratureConfig, Smile, convergence_study, heston_smile
from .saddle import SaddleContext
from .sampling import random_heston_params

__all__ = ["main"]

_PARAM_KEYS = ("kappa", "theta", "sigma", "rho", "v0")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heston-svi",
        description="Heston large-maturity smiles, their SVI limit, and checks "
                    "of the identities connecting them.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, params=True, grid=True, maturity=False):
        sp.add_argument("--config", help="JSON file supplying any flag; command line wins")
        sp.add_argument("--out", help="output path (default: stdout)")
        if params:
            for key in _PARAM_KEYS:
                sp.add_argument(f"--{key}", type=float)
        if grid:
            sp.add_argument("--xmin", type=float)
            sp.add_argument("--xmax", type=float)
            sp.add_argument("--n", type=int)
            sp.add_argument("--grid", help="explicit comma-separated x values")
        if maturity:
            sp.add_argument("--T", dest="T")

    sp = sub.add_parser("asymptote", help="tabulate the limiting variance smile")
    add_common(sp)
    sp.add_argument("--form", choices=["pipeline", "closed"], default=None)

    sp = sub.add_parser("verify", help="check pipeline/closed/SVI equivalence")
    add_common(sp)
    sp.add_argument("--tol", type=float)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--random", type=int, metavar="N",
                    help="run N seeded random parameter sets instead of explicit ones")

    sp = sub.add_parser("saddle-check", help="check the exponent-matching condition")
    add_common(sp)
    sp.add_argument("--tol", type=float)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--random", type=int, metavar="N")

    sp = sub.add_parser("smile", help="price a finite-maturity implied-vol smile")
    add_common(sp, maturity=True)
    sp.add_argument("--tol", type=float, help="quadrature tolerance")

    sp = sub.add_parser("converge", help="finite-maturity error against the limit smile")
    add_common(sp, maturity=True)
    sp.add_argument("--tol", type=float, help="quadrature tolerance")

    sp = sub.add_parser("fit", help="fit raw SVI to a smile CSV")
    add_common(sp, params=False, grid=False)
    sp.add_argument("--input", help="smile CSV path ('-' for stdin)")

    sp = sub.add_parser("map-params", help="Heston to SVI parameter map")
    add_common(sp, grid=False, maturity=True)
    return parser


def _apply_config(ns: argparse.Namespace) -> argparse.Namespace:
    if not getattr(ns, "config", None):
        return ns
    with open(ns.config) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise MalformedInputError("config file must hold a JSON object")
    for key, value in data.items():
        attr = key.replace("-", "_")
        if attr in ("command", "config") or not hasattr(ns, attr):
            raise MalformedInputError(f"config key {key!r} is not a flag of this command")
        if getattr(ns, attr) is None:
            setattr(ns, attr, value)
    return ns


def _params_from(ns: argparse.Namespace) -> HestonParams:
    missing = [key for key in ("kappa", "theta", "sigma", "rho") if getattr(ns, key) is None]
    if missing:
        raise MalformedInputError(
            "missing required parameter flags: " + ", ".join(f"--{m}" for m in missing)
        )
    v0 = ns.v0 if ns.v0 is not None else ns.theta
    return HestonParams(kappa=float(ns.kappa), theta=float(ns.theta),
                        sigma=float(ns.sigma), rho=float(ns.rho), v0=float(v0))


def _x_grid(ns: argparse.Namespace, xmin: float, xmax: float, n: int) -> np.ndarray:
    if getattr(ns, "grid", None):
        values = [float(tok) for tok in str(ns.grid).split(",") if tok.strip()]
        if not values:
            raise MalformedInputError("--grid parsed to no values")
        return np.asarray(values, dtype=np.float64)
    if ns.xmin is not None:
        xmin = float(ns.xmin)
    if ns.xmax is not None:
        xmax = float(ns.xmax)
    if ns.n is not None:
        n = int(ns.n)
    if n < 1:
        raise MalformedInputError(f"--n must be >= 1, got {n}")
    if xmax < xmin:
        raise MalformedInputError(f"--xmax {xmax!r} below --xmin {xmin!r}")
    return np.linspace(xmin, xmax, n)


def _maturity(ns: argparse.Namespace) -> float:
    if ns.T is None:
        raise MalformedInputError("missing required flag --T")
    return float(ns.T)


def _maturity_list(ns: argparse.Namespace, default: str) -> list:
    raw = ns.T if ns.T is not None else default
    return [float(tok) for tok in str(raw).split(",") if tok.strip()]


def _emit(text: str, out: Optional[str]) -> None:
    if out and out != "-":
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _quadrature(ns: argparse.Namespace) -> Optional[QuadratureConfig]:
    tol = getattr(ns, "tol", None)
    if tol is None:
        return None
    return QuadratureConfig(tolerance=float(tol))


def _report(command: str, inputs: dict, outputs: dict, passed: bool, t0: float) -> dict:
    return {
        "command": command,
        "inputs": inputs,
        "outputs": outputs,
        "pass": passed,
        "duration_seconds": time.perf_counter() - t0,
    }


def _parameter_sets(ns: argparse.Namespace) -> list:
    """Either the explicit CLI set or N seeded random ones."""
    count = getattr(ns, "random", None)
    if count is None:
        return [("explicit", _params_from(ns))]
    if count < 1:
        raise MalformedInputError(f"--random must be >= 1, got {count}")
    seed = ns.seed if ns.seed is not None else 0
    rng = np.random.default_rng(seed)
    return [(f"seed{seed}[{i}]", random_heston_params(rng)) for i in range(count)]


def _cmd_asymptote(ns: argparse.Namespace) -> int:
    params = _params_from(ns)
    pipeline = AsymptoticPipeline(params)
    theta = params.theta
    grid = _x_grid(ns, -10.0 * theta, 10.0 * theta, 1001)
    form = ns.form or "closed"
    values = (pipeline.variance_pipeline if form == "pipeline"
              else pipeline.variance_closed)(grid)
    lines = [f"# form={form}", "x,variance"]
    for x, v in zip(np.atleast_1d(grid), np.atleast_1d(values)):
        lines.append(f"{fmt_float(x)},{fmt_float(v)}")
    _emit("\n".join(lines) + "\n", ns.out)
    return 0


def _cmd_verify(ns: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    tol = float(ns.tol) if ns.tol is not None else 1e-10
    sets = _parameter_sets(ns)
    worst = None
    for label, params in sets:
        grid = _x_grid(ns, -10.0 * params.theta, 10.0 * params.theta, 1001)
        report = AsymptoticPipeline(params).verify_equivalence(grid, tolerance=tol)
        if worst is None or report.max_rel_deviation > worst[1].max_rel_deviation:
            worst = (label, report, params)
    label, report, params = worst
    outputs = {
        "n_sets": len(sets),
        "max_rel_deviation": report.max_rel_deviation,
        "max_abs_deviation": report.max_abs_deviation,
        "worst_set": label,
        "worst_params": params.to_dict(),
        "argmax_x": report.argmax_x,
        "tolerance": tol,
    }
    passed = report.max_rel_deviation <= tol
    inputs = {"sets": len(sets), "grid_points": int(report.x.size)}
    if ns.random is not None:
        inputs["seed"] = ns.seed if ns.seed is not None else 0
    else:
        inputs["params"] = params.to_dict()
    _emit(dumps(_report("verify", inputs, outputs, passed, t0)) + "\n", ns.out)
    return 0 if passed else 1


def _cmd_saddle_check(ns: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    tol = float(ns.tol) if ns.tol is not None else 1e-10
    sets = _parameter_sets(ns)
    worst = None
    n_points = None
    for label, params in sets:
        grid = _x_grid(ns, -10.0 * params.theta, 10.0 * params.theta, 21)
        report = SaddleContext(params).saddle_report(grid, tolerance=tol)
        n_points = int(report.x.size)
        key = float(np.max(report.relative_residual))
        if worst is None or key > worst[1]:
            worst = (label, key, report, params)
    label, _, report, params = worst
    summary = report.summary()
    outputs = {
        "n_sets": len(sets),
        "max_relative_residual": summary["max_relative_residual"],
        "max_identity_gap": summary["max_identity_gap"],
        "atm_u_tilde_imag": summary["atm_u_tilde_imag"],
        "worst_set": label,
        "worst_params": params.to_dict(),
        "tolerance": tol,
    }
    passed = summary["max_relative_residual"] <= tol
    inputs = {"sets": len(sets), "grid_points": n_points}
    if ns.random is not None:
        inputs["seed"] = ns.seed if ns.seed is not None else 0
    else:
        inputs["params"] = params.to_dict()
    _emit(dumps(_report("saddle-check", inputs, outputs, passed, t0)) + "\n", ns.out)
    return 0 if passed else 1


def _cmd_smile(ns: argparse.Namespace) -> int:
    params = _params_from(ns)
    T = _maturity(ns)
    grid = _x_grid(ns, -0.05, 0.05, 11)
    smile = heston_smile(params, T, grid, config=_quadrature(ns))
    for k, reason in smile.failures:
        print(f"warning: k={k:g} failed: {reason}", file=sys.stderr)
    if not smile.points:
        raise QuadratureAccuracyError("no smile point could be priced",
                                      value=math.nan, error_estimate=math.nan)
    _emit(smile.csv_text(), ns.out)
    return 0


def _cmd_converge(ns: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    params = _params_from(ns)
    maturities = _maturity_list(ns, "1,5,20,50")
    grid = _x_grid(ns, -0.05, 0.05, 5)
    report = convergence_study(params, maturities, grid, config=_quadrature(ns))
    inputs = {"params": params.to_dict(), "maturities": list(report.maturities)}
    _emit(dumps(_report("converge", inputs, report.summary(), report.passed, t0)) + "\n",
          ns.out)
    return 0 if report.passed else 1


def _cmd_fit(ns: argparse.Namespace) -> int:
    if not ns.input:
        raise MalformedInputError("missing required flag --input (smile CSV)")
    if ns.input == "-":
        smile = Smile.from_csv_text(sys.stdin.read())
    else:
        smile = Smile.read_csv(ns.input)
    result = fit_svi(smile)
    _emit(dumps(result.to_dict()) + "\n", ns.out)
    return 0 if result.converged else 1


def _cmd_map_params(ns: argparse.Namespace) -> int:
    params = _params_from(ns)
    T = _maturity(ns)
    omega = heston_to_svi_omega(params)
    raw = svi_omega_to_raw(omega, T)
    payload = {
        "heston": params.to_dict(),
        "T": T,
        "omega": omega.to_dict(),
        "raw": raw.to_dict(),
    }
    _emit(dumps(payload) + "\n", ns.out)
    return 0


_HANDLERS = {
    "asymptote": _cmd_asymptote,
    "verify": _cmd_verify,
    "saddle-check": _cmd_saddle_check,
    "smile": _cmd_smile,
    "converge": _cmd_converge,
    "fit": _cmd_fit,
    "map-params": _cmd_map_params,
}


def main(argv=None) -> int:
    ns = _build_parser().parse_args(argv)
    try:
        ns = _apply_config(ns)
        return _HANDLERS[ns.command](ns)
    except QuadratureAccuracyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NotConvergedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (MalformedInputError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except HestonSviError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
