"""Heston and SVI parameter records and the exact maps between them.

The central map sends Heston parameters to the two-parameter SVI form

    sigma^2(x) = (omega1/2) * (1 + omega2*rho*x + sqrt((omega2*x + rho)^2 + 1 - rho^2))

with x the maturity-scaled log-moneyness, via

    omega1 = 4*kappa*theta / (eta + 2*kappa - rho*sigma),   omega2 = sigma/(kappa*theta),

where eta = sqrt(4*kappa^2 + sigma^2 - 4*kappa*rho*sigma).  The omega1 formula
is the rationalized version of (4*kappa*theta/(sigma^2*(1-rho^2))) * (eta -
(2*kappa - rho*sigma)); the two agree identically because eta^2 = (2*kappa -
rho*sigma)^2 + sigma^2*(1 - rho^2), and the rationalized form avoids
cancellation for small vol-of-vol.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    ConsistencyError,
    FellerViolationError,
    LargeCorrelationError,
    MalformedInputError,
)

__all__ = [
    "HestonParams",
    "DerivedConstants",
    "SVIOmegaParams",
    "SVIRawParams",
    "validate_heston",
    "require_asymptotic_domain",
    "derive_constants",
    "heston_to_svi_omega",
    "svi_omega_to_raw",
    "svi_raw_to_omega",
    "raw_omega_consistency",
]


def _require_finite(name: str, value: float) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise MalformedInputError(f"{name} must be a real number, got {value!r}") from None
    if not math.isfinite(value):
        raise MalformedInputError(f"{name} must be finite, got {value!r}")
    return value


def _require_positive(name: str, value: float) -> float:
    value = _require_finite(name, value)
    if value <= 0.0:
        raise MalformedInputError(f"{name} must be > 0, got {value!r}")
    return value


def _require_correlation(name: str, value: float) -> float:
    value = _require_finite(name, value)
    if not -1.0 < value < 1.0:
        raise MalformedInputError(f"{name} must lie strictly inside (-1, 1), got {value!r}")
    return value


@dataclass(frozen=True)
class HestonParams:
    """Heston model parameters.

    kappa: mean-reversion speed, theta: long-run variance, sigma: vol-of-vol,
    rho: spot/variance correlation, v0: initial variance.  Construction
    enforces finiteness, positivity and |rho| < 1.  The Feller condition and
    the mean-reversion/correlation balance kappa - rho*sigma > 0 are *not*
    enforced here; see :func:`validate_heston`.
    """

    kappa: float
    theta: float
    sigma: float
    rho: float
    v0: float

    def __post_init__(self):
        object.__setattr__(self, "kappa", _require_positive("kappa", self.kappa))
        object.__setattr__(self, "theta", _require_positive("theta", self.theta))
        object.__setattr__(self, "sigma", _require_positive("sigma", self.sigma))
        object.__setattr__(self, "rho", _require_correlation("rho", self.rho))
        object.__setattr__(self, "v0", _require_positive("v0", self.v0))

    @property
    def feller_ok(self) -> bool:
        return 2.0 * self.kappa * self.theta >= self.sigma * self.sigma

    @property
    def assumption_ok(self) -> bool:
        """True when kappa - rho*sigma > 0 (outside the large correlation regime)."""
        return self.kappa - self.rho * self.sigma > 0.0

    def to_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "theta": self.theta,
            "sigma": self.sigma,
            "rho": self.rho,
            "v0": self.v0,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "HestonParams":
        try:
            return cls(d["kappa"], d["theta"], d["sigma"], d["rho"], d["v0"])
        except KeyError as exc:
            raise MalformedInputError(f"missing Heston field {exc.args[0]!r}") from None


@dataclass(frozen=True)
class DerivedConstants:
    """Constants derived from Heston parameters for the large-maturity smile.

    eta = sqrt(4*kappa^2 + sigma^2 - 4*kappa*rho*sigma), rho_bar = sqrt(1-rho^2),
    theta_bar = kappa*theta/(kappa - rho*sigma), and p_minus < p_plus the roots
    of (kappa - rho*sigma*p)^2 + sigma^2*p*(1-p).
    """

    eta: float
    rho_bar: float
    theta_bar: float
    p_minus: float
    p_plus: float

    def to_dict(self) -> dict:
        return {
            "eta": self.eta,
            "rho_bar": self.rho_bar,
            "theta_bar": self.theta_bar,
            "p_minus": self.p_minus,
            "p_plus": self.p_plus,
        }


@dataclass(frozen=True)
class SVIOmegaParams:
    """SVI smile in scaled log-moneyness x = k/T: (omega1, omega2, rho)."""

    omega1: float
    omega2: float
    rho: float

    def __post_init__(self):
        object.__setattr__(self, "omega1", _require_positive("omega1", self.omega1))
        object.__setattr__(self, "omega2", _require_positive("omega2", self.omega2))
        object.__setattr__(self, "rho", _require_correlation("rho", self.rho))

    def to_dict(self) -> dict:
        return {"omega1": self.omega1, "omega2": self.omega2, "rho": self.rho}

    @classmethod
    def from_dict(cls, d: dict) -> "SVIOmegaParams":
        try:
            return cls(d["omega1"], d["omega2"], d["rho"])
        except KeyError as exc:
            raise MalformedInputError(f"missing SVI omega field {exc.args[0]!r}") from None


@dataclass(frozen=True)
class SVIRawParams:
    """Raw SVI smile in log-strike k at one maturity T.

    Implied variance is a + b*(rho_tilde*(k - m) + sqrt((k - m)^2 + sigma_tilde^2)).
    """

    a: float
    b: float
    rho_tilde: float
    m: float
    sigma_tilde: float
    T: float

    def __post_init__(self):
        object.__setattr__(self, "a", _require_finite("a", self.a))
        b = _require_finite("b", self.b)
        if b < 0.0:
            raise MalformedInputError(f"b must be >= 0, got {b!r}")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "rho_tilde", _require_correlation("rho_tilde", self.rho_tilde))
        object.__setattr__(self, "m", _require_finite("m", self.m))
        object.__setattr__(self, "sigma_tilde", _require_positive("sigma_tilde", self.sigma_tilde))
        object.__setattr__(self, "T", _require_positive("T", self.T))
        min_var = self.a + self.b * self.sigma_tilde * math.sqrt(1.0 - self.rho_tilde**2)
        if min_var < 0.0:
            raise MalformedInputError(
                f"implied variance is negative at the smile minimum ({min_var!r})"
            )

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "rho_tilde": self.rho_tilde,
            "m": self.m,
            "sigma_tilde": self.sigma_tilde,
            "T": self.T,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SVIRawParams":
        try:
            return cls(d["a"], d["b"], d["rho_tilde"], d["m"], d["sigma_tilde"], d["T"])
        except KeyError as exc:
            raise MalformedInputError(f"missing raw SVI field {exc.args[0]!r}") from None


def validate_heston(p: HestonParams) -> list[str]:
    """Report which asymptotic-domain constraints ``p`` violates.

    Returns an empty list when the parameters are valid for the
    large-maturity machinery.  Total: never raises for a constructed record.
    """
    violations = []
    if not p.feller_ok:
        violations.append(
            "Feller condition violated: 2*kappa*theta = "
            f"{2 * p.kappa * p.theta:.6g} < sigma**2 = {p.sigma**2:.6g}"
        )
    if not p.assumption_ok:
        violations.append(
            "large correlation regime: kappa - rho*sigma = "
            f"{p.kappa - p.rho * p.sigma:.6g} <= 0"
        )
    return violations


def require_asymptotic_domain(p: HestonParams) -> None:
    """Raise unless ``p`` is valid for the large-maturity asymptotics."""
    if not p.assumption_ok:
        raise LargeCorrelationError(p.kappa, p.rho, p.sigma)
    if not p.feller_ok:
        raise FellerViolationError(p.kappa, p.theta, p.sigma)


def derive_constants(p: HestonParams) -> DerivedConstants:
    """Compute eta, rho_bar, theta_bar and the moment endpoints p_minus, p_plus."""
    require_asymptotic_domain(p)
    kappa, theta, sigma, rho = p.kappa, p.theta, p.sigma, p.rho
    rho_bar2 = 1.0 - rho * rho
    eta = math.sqrt(4.0 * kappa * kappa + sigma * sigma - 4.0 * kappa * rho * sigma)
    theta_bar = kappa * theta / (kappa - rho * sigma)
    p_plus = (sigma - 2.0 * kappa * rho + eta) / (2.0 * sigma * rho_bar2)
    p_minus = (sigma - 2.0 * kappa * rho - eta) / (2.0 * sigma * rho_bar2)
    return DerivedConstants(
        eta=eta,
        rho_bar=math.sqrt(rho_bar2),
        theta_bar=theta_bar,
        p_minus=p_minus,
        p_plus=p_plus,
    )


def heston_to_svi_omega(p: HestonParams) -> SVIOmegaParams:
    """Map Heston parameters to the SVI (omega1, omega2, rho) of the limit smile."""
    require_asymptotic_domain(p)
    kappa, theta, sigma, rho = p.kappa, p.theta, p.sigma, p.rho
    eta = math.sqrt(4.0 * kappa * kappa + sigma * sigma - 4.0 * kappa * rho * sigma)
    omega1 = 4.0 * kappa * theta / (eta + 2.0 * kappa - rho * sigma)
    omega2 = sigma / (kappa * theta)
    return SVIOmegaParams(omega1=omega1, omega2=omega2, rho=rho)


def svi_omega_to_raw(s: SVIOmegaParams, T: float) -> SVIRawParams:
    """Rewrite an omega-form smile as raw SVI in log-strike at maturity T.

    a = (omega1/2)(1 - rho^2), b = omega1*omega2/(2T), rho_tilde = rho,
    m = -rho*T/omega2, sigma_tilde = sqrt(1 - rho^2)*T/omega2.
    """
    T = _require_positive("T", T)
    rho_bar = math.sqrt(1.0 - s.rho * s.rho)
    return SVIRawParams(
        a=0.5 * s.omega1 * (1.0 - s.rho * s.rho),
        b=0.5 * s.omega1 * s.omega2 / T,
        rho_tilde=s.rho,
        m=-s.rho * T / s.omega2,
        sigma_tilde=rho_bar * T / s.omega2,
        T=T,
    )


def raw_omega_consistency(r: SVIRawParams) -> tuple[SVIOmegaParams, float]:
    """Invert the omega -> raw map and report the consistency residual.

    omega2 and omega1 are recovered from (sigma_tilde, T) and (a, rho_tilde);
    the remaining relation b = omega1*omega2/(2T) is then overdetermined, and
    its relative violation is returned alongside the recovered parameters.
    """
    rho_bar = math.sqrt(1.0 - r.rho_tilde * r.rho_tilde)
    omega2 = rho_bar * r.T / r.sigma_tilde
    if r.a <= 0.0:
        raise MalformedInputError(
            f"a must be > 0 to recover omega1 = 2a/(1 - rho_tilde^2), got {r.a!r}"
        )
    omega1 = 2.0 * r.a / (1.0 - r.rho_tilde * r.rho_tilde)
    b_implied = 0.5 * omega1 * omega2 / r.T
    residual = abs(r.b - b_implied) / b_implied
    return SVIOmegaParams(omega1=omega1, omega2=omega2, rho=r.rho_tilde), residual


def svi_raw_to_omega(r: SVIRawParams, consistency_tol: float = 1e-9) -> SVIOmegaParams:
    """Invert the omega -> raw map, requiring b = omega1*omega2/(2T).

    Raises :class:`ConsistencyError` carrying the relative residual when the
    slope parameter b disagrees with the one implied by (a, rho_tilde,
    sigma_tilde, T) beyond ``consistency_tol``; such a raw smile is not the
    image of any omega-form smile.
    """
    omega, residual = raw_omega_consistency(r)
    if residual > consistency_tol:
        raise ConsistencyError(
            "raw SVI parameters are not consistent with any omega-form smile: "
            f"b = {r.b:.12g} but omega1*omega2/(2T) = "
            f"{0.5 * omega.omega1 * omega.omega2 / r.T:.12g}",
            residual,
        )
    return omega
