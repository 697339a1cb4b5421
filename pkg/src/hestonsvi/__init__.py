"""Heston large-maturity smile asymptotics and their exact SVI limit.

The package computes the limiting implied-variance smile of the Heston model
in maturity-scaled log-moneyness, verifies that an SVI parameterization
matches it identically (three independent evaluation routes), checks the
saddle-point identity behind the limit, prices finite-maturity smiles by
Fourier quadrature to watch the convergence, and fits/interprets raw SVI
parameters in Heston terms.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .asymptotic import AsymptoticPipeline, EquivalenceReport
from .errors import (
    ArbitrageViolationError,
    BandBoundaryError,
    ConsistencyError,
    DomainError,
    FellerViolationError,
    FellerWarning,
    HestonSviError,
    LargeCorrelationError,
    MalformedInputError,
    NotConvergedError,
    QuadratureAccuracyError,
    UnderdeterminedError,
)
from .fit import FitResult, InterpretationReport, fit_svi, interpret_fit
from .params import (
    DerivedConstants,
    HestonParams,
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
from .pricer import (
    ConvergenceReport,
    QuadratureConfig,
    Smile,
    bs_call_price,
    convergence_study,
    heston_cf,
    heston_smile,
    implied_vol,
    price_call_fourier,
)
from .saddle import SaddleContext, SaddleReport
from .svi import (
    SmileDiagnostics,
    diagnostics,
    heston_limit_smile,
    omega1_large_vvol_approx,
    omega1_small_vvol_approx,
    smile_minimum,
    svi_omega_variance,
    svi_raw_total_variance,
    wing_slopes,
)

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "__version__",
    # parameters and maps
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
    # SVI surface
    "svi_omega_variance",
    "svi_raw_total_variance",
    "smile_minimum",
    "wing_slopes",
    "omega1_small_vvol_approx",
    "omega1_large_vvol_approx",
    "SmileDiagnostics",
    "diagnostics",
    "heston_limit_smile",
    # asymptotic pipeline
    "AsymptoticPipeline",
    "EquivalenceReport",
    # saddle point
    "SaddleContext",
    "SaddleReport",
    # finite-maturity pricing
    "QuadratureConfig",
    "Smile",
    "ConvergenceReport",
    "heston_cf",
    "price_call_fourier",
    "bs_call_price",
    "implied_vol",
    "heston_smile",
    "convergence_study",
    # fitting
    "FitResult",
    "InterpretationReport",
    "fit_svi",
    "interpret_fit",
    # errors
    "HestonSviError",
    "MalformedInputError",
    "DomainError",
    "LargeCorrelationError",
    "FellerViolationError",
    "ConsistencyError",
    "ArbitrageViolationError",
    "BandBoundaryError",
    "QuadratureAccuracyError",
    "UnderdeterminedError",
    "NotConvergedError",
    "FellerWarning",
]
