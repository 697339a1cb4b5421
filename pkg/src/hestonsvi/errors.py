"""Exception and warning types shared across the package."""


class HestonSviError(Exception):
    """Base class for all errors raised by this package."""


class MalformedInputError(HestonSviError, ValueError):
    """Input is structurally invalid: non-finite, wrong sign, wrong shape."""


class DomainError(HestonSviError, ValueError):
    """Argument lies outside the mathematical domain of the operation."""


class LargeCorrelationError(DomainError):
    """kappa - rho*sigma <= 0: the large correlation regime.

    The large-maturity asymptotics are not valid there, so every asymptotic
    operation refuses such parameters.
    """

    def __init__(self, kappa: float, rho: float, sigma: float):
        self.kappa = kappa
        self.rho = rho
        self.sigma = sigma
        super().__init__(
            "large correlation regime: kappa - rho*sigma = "
            f"{kappa - rho * sigma:.6g} <= 0 (kappa={kappa:g}, rho={rho:g}, "
            f"sigma={sigma:g}); the large-maturity asymptotics require "
            "kappa - rho*sigma > 0"
        )


class FellerViolationError(DomainError):
    """2*kappa*theta < sigma**2 where the operation requires the Feller condition."""

    def __init__(self, kappa: float, theta: float, sigma: float):
        self.kappa = kappa
        self.theta = theta
        self.sigma = sigma
        super().__init__(
            f"Feller condition violated: 2*kappa*theta = {2 * kappa * theta:.6g} "
            f"< sigma**2 = {sigma * sigma:.6g}"
        )


class ConsistencyError(HestonSviError):
    """A cross-parameter consistency relation failed; carries the residual."""

    def __init__(self, message: str, residual: float):
        self.residual = residual
        super().__init__(f"{message} (relative residual {residual:.6g})")


class ArbitrageViolationError(HestonSviError, ValueError):
    """An option price lies strictly outside the no-arbitrage band."""


class BandBoundaryError(HestonSviError, ValueError):
    """An option price sits exactly on the no-arbitrage band edge.

    Implied volatility is 0 or infinity there and cannot be inverted.
    """


class QuadratureAccuracyError(HestonSviError):
    """Adaptive quadrature could not meet the requested tolerance.

    Carries the achieved value and the error estimate so callers can decide
    whether the result is still usable.
    """

    def __init__(self, message: str, value: float, error_estimate: float):
        self.value = value
        self.error_estimate = error_estimate
        super().__init__(
            f"{message}: achieved error estimate {error_estimate:.3g}"
        )


class UnderdeterminedError(HestonSviError, ValueError):
    """Too few data points to determine the model parameters."""


class NotConvergedError(HestonSviError):
    """An iterative procedure stopped without meeting its convergence test."""


class FellerWarning(UserWarning):
    """Feller condition violated; finite-maturity pricing continues anyway."""
