"""Smooth spatial data fields with analytically known iterated Laplacians,
and the initial-data transformations feeding the solvers.

Verification accuracy hinges on the data being analytic: every field
family reports exact iterated Laplacians, so residual and oracle gaps
measure the solver, not the data.  Linear combinations of (possibly
Laplacian-shifted) fields are first-class, because the transformed data
sets are exactly such combinations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import CapabilityError, DomainError
from .special import gamma


class SmoothField:
    """Base interface: eval(points, lap) returns Laplacian^lap applied to
    the field, evaluated at an (N, n) array of points."""

    dimension: int
    max_laplacian_order: int | None = None  # None = unbounded

    def eval(self, points: np.ndarray, lap: int = 0) -> np.ndarray:
        raise NotImplementedError

    def _check_order(self, lap: int):
        if lap < 0:
            raise DomainError("Laplacian order must be non-negative")
        if self.max_laplacian_order is not None and lap > self.max_laplacian_order:
            raise CapabilityError(
                f"{type(self).__name__} supports Laplacian orders up to "
                f"{self.max_laplacian_order}, got {lap}")


class PlaneWaveField(SmoothField):
    """amplitude * cos(k . x + phase); Laplacian eigenfield with value -|k|^2."""

    def __init__(self, wave_vector, phase: float = 0.0, amplitude: float = 1.0):
        self.wave_vector = np.asarray(wave_vector, dtype=float)
        self.phase = float(phase)
        self.amplitude = float(amplitude)
        self.dimension = self.wave_vector.size
        self.eigenvalue = -float(np.dot(self.wave_vector, self.wave_vector))

    def eval(self, points, lap=0):
        self._check_order(lap)
        points = np.asarray(points, dtype=float)
        return (self.amplitude * self.eigenvalue ** lap
                * np.cos(points @ self.wave_vector + self.phase))


class SineProductField(SmoothField):
    """amplitude * prod_i sin(k_i x_i); eigenfield with value -sum k_i^2."""

    def __init__(self, wave_vector, amplitude: float = 1.0):
        self.wave_vector = np.asarray(wave_vector, dtype=float)
        self.amplitude = float(amplitude)
        self.dimension = self.wave_vector.size
        self.eigenvalue = -float(np.dot(self.wave_vector, self.wave_vector))

    def eval(self, points, lap=0):
        self._check_order(lap)
        points = np.asarray(points, dtype=float)
        return (self.amplitude * self.eigenvalue ** lap
                * np.prod(np.sin(points * self.wave_vector), axis=-1))


class PolynomialField(SmoothField):
    """Multivariate polynomial given as {multi-index: coefficient}."""

    def __init__(self, coefficients: dict, dimension: int):
        self.dimension = dimension
        self.coefficients = {tuple(int(a) for a in k): float(c)
                             for k, c in coefficients.items()}
        for k in self.coefficients:
            if len(k) != dimension or any(a < 0 for a in k):
                raise DomainError(f"bad multi-index {k} for dimension {dimension}")

    @staticmethod
    def _laplacian_coeffs(coeffs: dict, dimension: int) -> dict:
        out: dict = {}
        for idx, c in coeffs.items():
            for i in range(dimension):
                a = idx[i]
                if a >= 2:
                    new = list(idx)
                    new[i] = a - 2
                    key = tuple(new)
                    out[key] = out.get(key, 0.0) + c * a * (a - 1)
        return out

    def eval(self, points, lap=0):
        self._check_order(lap)
        points = np.atleast_2d(np.asarray(points, dtype=float))
        coeffs = self.coefficients
        for _ in range(lap):
            coeffs = self._laplacian_coeffs(coeffs, self.dimension)
        vals = np.zeros(points.shape[0])
        for idx, c in coeffs.items():
            term = np.full(points.shape[0], c)
            for i, a in enumerate(idx):
                if a:
                    term = term * points[:, i] ** a
            vals += term
        return vals


class GaussianField(SmoothField):
    """amplitude * exp(-a |x - center|^2), iterated Laplacians up to order 3.

    Laplacian^j has the form q_j(|x-c|^2) exp(-a|x-c|^2) with polynomial
    q_j obtained from the recurrence
        q -> 4 v (q'' - 2 a q' + a^2 q) + 2 n (q' - a q),   v = |x-c|^2.
    The order cap keeps the data provenance analytic rather than falling
    back to finite differences.
    """

    max_laplacian_order = 3

    def __init__(self, width: float, center, amplitude: float = 1.0):
        if width <= 0.0:
            raise DomainError("gaussian width parameter must be positive")
        self.width = float(width)
        self.center = np.asarray(center, dtype=float)
        self.amplitude = float(amplitude)
        self.dimension = self.center.size
        self._radial_polys = self._build_polys()

    def _build_polys(self):
        a, n = self.width, self.dimension
        polys = [np.array([1.0])]  # coefficients of q_j in v, ascending
        for _ in range(self.max_laplacian_order):
            q = polys[-1]
            dq = np.polynomial.polynomial.polyder(q)
            d2q = np.polynomial.polynomial.polyder(q, 2)
            def padd(*terms):
                size = max(len(t) for t in terms)
                out = np.zeros(size)
                for t in terms:
                    out[:len(t)] += t
                return out
            inner = padd(d2q, -2.0 * a * dq, a * a * q)
            shifted = np.concatenate([[0.0], 4.0 * inner])  # times 4 v
            polys.append(padd(shifted, 2.0 * n * dq, -2.0 * a * n * q))
        return polys

    def eval(self, points, lap=0):
        self._check_order(lap)
        points = np.atleast_2d(np.asarray(points, dtype=float))
        v = np.sum((points - self.center) ** 2, axis=-1)
        q = np.polynomial.polynomial.polyval(v, self._radial_polys[lap])
        return self.amplitude * q * np.exp(-self.width * v)


@dataclass
class FieldSum(SmoothField):
    """Linear combination sum_i c_i * Laplacian^{s_i} f_i, itself a field."""

    terms: list  # list of (coeff, lap_shift, SmoothField)
    dimension: int = 0

    def __post_init__(self):
        if self.terms and not self.dimension:
            self.dimension = self.terms[0][2].dimension

    def eval(self, points, lap=0):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        vals = np.zeros(points.shape[0])
        for coeff, shift, f in self.terms:
            vals += coeff * f.eval(points, lap + shift)
        return vals

    def scaled(self, factor: float) -> "FieldSum":
        return FieldSum([(c * factor, s, f) for c, s, f in self.terms],
                        self.dimension)


def zero_field(dimension: int) -> FieldSum:
    return FieldSum([], dimension)


def iterated_laplacian(f: SmoothField, x, j: int) -> float:
    """Exact analytic value of Laplacian^j f at a single point."""
    x = np.asarray(x, dtype=float)
    return float(f.eval(x[None, :], lap=j)[0])


def coefficient_a(j: int, alpha: float) -> float:
    """a_j = Gamma(j + 1/2 + alpha) / Gamma(j + 1/2)."""
    if alpha <= 0.0:
        raise DomainError("alpha must be positive")
    if j < 0:
        raise DomainError("index must be non-negative")
    return gamma(j + 0.5 + alpha) / gamma(j + 0.5)


@dataclass
class TransformedData:
    """Initial data after the two transformation layers.

    capital_phi[k], capital_psi[k] are the wave-problem initial values;
    f[k], g[k] the reduced-system data built from their iterated
    Laplacians.  All lists have length m; f[0] is capital_phi[0] and g[0]
    is capital_psi[0] identically.
    """

    capital_phi: list
    capital_psi: list
    f: list
    g: list
    a_coeffs: list
    warnings: list = dc_field(default_factory=list)

    @property
    def m(self) -> int:
        return len(self.f)


def _capital_transform(base: list, m: int, lam: float, alpha: float) -> list:
    out = []
    for k in range(m):
        terms = []
        for j in range(k + 1):
            c = coefficient_a(j, alpha) * math.comb(k, j) * lam ** (2 * (k - j))
            if c != 0.0:
                terms.append((c, 0, base[j]))
        out.append(FieldSum(terms, base[0].dimension))
    return out


def _reduced_data(capital: list, m: int) -> list:
    # Expanding (d^2/dt^2 - Laplacian)^k at t = 0 pairs Laplacian^{k-j}
    # with the 2j-th time derivative and the sign (-1)^{k-j}; the flat
    # single-mode solution pins the sign convention down uniquely.
    out = []
    for k in range(m):
        terms = []
        for j in range(k + 1):
            sign = -1.0 if (k - j) % 2 else 1.0
            for c, s, f in capital[j].terms:
                terms.append((sign * math.comb(k, j) * c, s + (k - j), f))
        out.append(FieldSum(terms, capital[0].dimension))
    return out


def build_transformed_data(phi: list, psi: list, m: int, lam: float,
                           alpha: float) -> TransformedData:
    """Build Phi_k, Psi_k and the reduced-system data f_k, g_k.

    Phi_k = sum_j a_j C(k,j) lam^{2(k-j)} phi_j, and
    f_k = sum_j (-1)^{k-j} C(k,j) Laplacian^{k-j} Phi_j (same for Psi -> g).
    An empty psi list means the pure even-derivative problem (g_k = 0).
    """
    if len(phi) != m and phi:
        raise DomainError(f"need {m} phi fields, got {len(phi)}")
    if psi and len(psi) != m:
        raise DomainError(f"need {m} psi fields, got {len(psi)}")
    dim = (phi or psi)[0].dimension
    if not phi:
        phi_caps = [zero_field(dim) for _ in range(m)]
    else:
        phi_caps = _capital_transform(phi, m, lam, alpha)
    if not psi:
        psi_caps = [zero_field(dim) for _ in range(m)]
    else:
        psi_caps = _capital_transform(psi, m, lam, alpha)
    return TransformedData(
        capital_phi=phi_caps,
        capital_psi=psi_caps,
        f=_reduced_data(phi_caps, m) if phi else [zero_field(dim)] * m,
        g=_reduced_data(psi_caps, m) if psi else [zero_field(dim)] * m,
        a_coeffs=[coefficient_a(j, alpha) for j in range(m)],
    )


def psi_star_from_psi(psi: list, m: int, alpha: float) -> list:
    """Invert the condition map psi_k = prod_{j=1}^k (1 - alpha/j) psi*_k."""
    out = []
    for k in range(m):
        prod = 1.0
        for j in range(1, k + 1):
            prod *= 1.0 - alpha / j
        if prod == 0.0:
            raise DomainError(f"condition map degenerate at k={k}, alpha={alpha}")
        out.append(FieldSum([(1.0 / prod, 0, psi[k])], psi[k].dimension))
    return out


def build_psi_star_data(psi_star: list, m: int, lam: float,
                        alpha: float) -> TransformedData:
    """Data combinations for the odd-initial-condition problem.

    The solution with weighted-odd data at parameter alpha is
    t^{1-2 alpha} times the even-data solution at the complementary
    parameter 1 - alpha, so all combinations here are built at
    alpha' = 1 - alpha: the Pochhammer map from Bessel-operator traces
    back to plain even derivatives, the 1/(1-2 alpha) normalisation from
    the weighted first-derivative condition, and the usual capital
    transform.  The spatial operator in the reduced data is the
    Laplacian, mirroring the even-data construction.  Outside
    0 < alpha < 1/2 the combinations remain evaluable but a warning is
    attached to the output.
    """
    warnings = []
    if not (0.0 < alpha < 0.5):
        warnings.append(
            f"alpha={alpha} outside (0, 1/2); the weighted-data route is "
            "formally outside its validity window")
    alpha_c = 1.0 - alpha
    scale = 1.0 / (1.0 - 2.0 * alpha) if alpha != 0.5 else math.inf
    phi_equiv = []
    for k in range(m):
        # (B-operator data) -> (plain even-derivative data) Pochhammer map
        # at the complementary parameter, then the weighted normalisation.
        num = 1.0
        den = 1.0
        for i in range(k):
            num *= 0.5 + i
            den *= (alpha_c + 0.5) + i
        phi_equiv.append(FieldSum([(scale * num / den, 0, psi_star[k])],
                                  psi_star[k].dimension))
    data = build_transformed_data(phi_equiv, [], m, lam, alpha_c)
    data.warnings.extend(warnings)
    return data
