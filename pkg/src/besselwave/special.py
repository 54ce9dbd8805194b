"""Scalar special functions used by every kernel in the package.

The central object is the Bessel-Clifford function

    jbar(nu, z) = Gamma(nu+1) * (z/2)**(-nu) * J_nu(z)
               = sum_k (-z^2/4)^k / ((nu+1)_k k!),

an entire function of z normalised so that jbar(nu, 0) = 1.  The power
series with term recurrence is exact-to-roundoff for small arguments,
but its alternating terms grow like (z^2/4)^k / (k!)^2 before decaying:
at |z| = 20 the largest term is ~1e7, which eats about seven digits
through cancellation.  Above a cutoff the evaluation therefore routes
through the scaled classical Bessel function instead, which keeps the
identity checks at the 1e-12 level across the documented range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import jv as _bessel_jv

from .errors import AccuracyError, DomainError

#: Largest |z| the evaluation is documented for.
MAX_ARGUMENT = 50.0

#: Below this |z| the series is used (largest term ~1e2, full accuracy).
SERIES_CUTOFF = 8.0

DEFAULT_MAX_TERMS = 200
DEFAULT_TERM_TOL = 1e-16


def gamma(x: float) -> float:
    """Euler gamma function (thin wrapper, kept as the package-wide entry
    point so kernels never import math directly for it)."""
    return math.gamma(x)


def gammaln(x: float) -> float:
    return math.lgamma(x)


def beta(a: float, b: float) -> float:
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))


@dataclass(frozen=True)
class BesselCliffordParams:
    """Evaluation parameters for the Bessel-Clifford series.

    order must satisfy order > -1 (so (order+1)_k never hits zero) and
    the series is truncated once the running term falls below
    term_tolerance relative to the partial sum.
    """

    order: float
    max_terms: int = DEFAULT_MAX_TERMS
    term_tolerance: float = DEFAULT_TERM_TOL

    def __post_init__(self):
        if self.order <= -1.0:
            raise DomainError(f"Bessel-Clifford order must be > -1, got {self.order}")
        if self.max_terms < 1:
            raise DomainError("max_terms must be a positive integer")
        if self.term_tolerance <= 0.0:
            raise DomainError("term_tolerance must be positive")


def bessel_clifford(nu: float, z, *, params: BesselCliffordParams | None = None):
    """Evaluate jbar(nu, z): series for small |z|, scaled J_nu beyond.

    Accepts a scalar or an ndarray argument.  Passing explicit params
    forces the series branch everywhere (series parameters would be
    meaningless otherwise).  Raises DomainError for nu <= -1 or
    |z| > MAX_ARGUMENT, AccuracyError if max_terms is exhausted.
    """
    force_series = params is not None
    if params is None:
        params = BesselCliffordParams(order=nu)
    elif params.order != nu:
        params = BesselCliffordParams(order=nu, max_terms=params.max_terms,
                                      term_tolerance=params.term_tolerance)
    z_arr = np.asarray(z, dtype=float)
    scalar = z_arr.ndim == 0
    z_arr = np.atleast_1d(z_arr)
    if np.any(np.abs(z_arr) > MAX_ARGUMENT):
        raise AccuracyError(
            f"|z| > {MAX_ARGUMENT} is outside the documented range")

    if not force_series and np.any(np.abs(z_arr) > SERIES_CUTOFF):
        out = np.empty_like(z_arr)
        big = np.abs(z_arr) > SERIES_CUTOFF
        za = np.abs(z_arr[big])  # jbar is even in z
        out[big] = gamma(nu + 1.0) * (za / 2.0) ** (-nu) * _bessel_jv(nu, za)
        if np.any(~big):
            out[~big] = np.atleast_1d(
                bessel_clifford(nu, z_arr[~big], params=params))
        return float(out[0]) if scalar else out

    w = -0.25 * z_arr * z_arr
    term = np.ones_like(z_arr)
    total = np.ones_like(z_arr)
    converged = False
    for k in range(params.max_terms):
        term = term * w / ((nu + k + 1.0) * (k + 1.0))
        total += term
        if np.all(np.abs(term) <= params.term_tolerance * np.maximum(np.abs(total), 1e-300)):
            converged = True
            break
    if not converged:
        raise AccuracyError(
            f"Bessel-Clifford series did not converge in {params.max_terms} terms")
    return float(total[0]) if scalar else total


def pochhammer(x: float, k: int) -> float:
    """Rising factorial (x)_k = x (x+1) ... (x+k-1); (x)_0 = 1."""
    if k < 0:
        raise DomainError("pochhammer order must be non-negative")
    result = 1.0
    for i in range(k):
        result *= x + i
    return result


def double_factorial_odd(p: int) -> int:
    """(2p-1)!! = 1*3*5*...*(2p-1), with the empty product (p = 0) equal to 1.

    Exact integer arithmetic, so there is no overflow; very large p is
    rejected only to keep downstream float conversion meaningful.
    """
    if p < 0:
        raise DomainError("p must be non-negative")
    if p > 150:
        raise DomainError("(2p-1)!! exceeds float range for p > 150")
    result = 1
    for j in range(1, 2 * p, 2):
        result *= j
    return result


def _stride_product(start: int, stop: int) -> int:
    """Product start*(start+2)*...*stop (step 2); empty product is 1."""
    result = 1
    for j in range(start, stop + 1, 2):
        result *= j
    return result


def sphere_area_const(n: int) -> float:
    """Surface area of the unit sphere in R^n: omega_n = 2 pi^(n/2) / Gamma(n/2)."""
    if n < 1:
        raise DomainError("dimension must be >= 1")
    return 2.0 * math.pi ** (n / 2.0) / gamma(n / 2.0)


def solution_consts(n: int, alpha: float) -> tuple[float, float, float]:
    """Leading constants of the explicit solution formulas for dimension n.

    Returns (gamma_n, gbar_n, gtilde_n):
      gamma_n  = 1 / (1*3*...*(n-2) * omega_n)
      gbar_n   = 1 / (1*3*...*(n-2) * omega_n * Gamma(alpha))
      gtilde_n = 1 / (omega_{n+1} * 2*4*...*(n-1))
    The odd product runs over odd integers <= n-2 and the even product
    over even integers <= n-1; both degenerate to 1 when empty.
    """
    if n < 2:
        raise DomainError("solution constants need n >= 2")
    if alpha <= 0.0:
        raise DomainError("alpha must be positive")
    odd_prod = _stride_product(1, n - 2)
    even_prod = _stride_product(2, n - 1)
    g_n = 1.0 / (odd_prod * sphere_area_const(n))
    gbar_n = g_n / gamma(alpha)
    gtilde_n = 1.0 / (sphere_area_const(n + 1) * even_prod)
    return g_n, gbar_n, gtilde_n


def odd_product_upto(k: int) -> int:
    """Product of odd integers <= k (empty product 1); helper for the
    calibrated even-dimension constants."""
    return _stride_product(1, k)
