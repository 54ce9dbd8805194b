"""Weighted radial and unit-sphere quadrature.

All solution formulas share one building block: integrals over the ball
|xi - x| < t of a smooth field against the kernel

    (t^2 - |xi - x|^2)^beta * jbar(nu, lam * sqrt(t^2 - |xi - x|^2)).

The substitution r = t*s turns the radial part into an integral over
(0, 1) with weight (1 - s^2)^beta, singular at s = 1 for beta in (-1, 0).
A Gauss rule with respect to that weight absorbs the singularity exactly;
its nodes come from a discretised Stieltjes procedure followed by
Golub-Welsch, with the discretisation done by a high-order Gauss-Jacobi
rule (the (1-s)^beta endpoint factor handled exactly, the analytic
(1+s)^beta factor folded into the discrete weights).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import roots_legendre

from .errors import ContractError, DomainError
from .special import bessel_clifford, sphere_area_const

# Chunk limit for batched field evaluations (number of space points).
_MAX_POINTS_PER_CHUNK = 4_000_000


@dataclass(frozen=True)
class RadialRule:
    """Gauss rule for integral_0^1 g(s) (1-s^2)^beta ds.

    Exact (to roundoff) for polynomial g of degree <= 2*order - 1,
    including odd powers; nodes lie strictly inside (0, 1).
    """

    beta: float
    order: int
    nodes: np.ndarray
    weights: np.ndarray


@dataclass(frozen=True)
class SphereRule:
    """Quadrature on the unit sphere in R^n, n in {1, 2, 3}.

    weights sum to omega_n; directions are unit vectors of shape (S, n).
    """

    dimension: int
    order: int
    directions: np.ndarray
    weights: np.ndarray


@lru_cache(maxsize=128)
def _radial_rule_cached(beta: float, order: int) -> RadialRule:
    # Recurrence coefficients of the orthogonal polynomials for the weight
    # (1-s^2)^beta on (0,1), from the exact moments
    #     mu_j = B((j+1)/2, beta+1) / 2
    # via the Chebyshev algorithm.  The raw-moment map is exponentially
    # ill-conditioned, so the algorithm runs in mpmath with precision
    # scaled to the order; the final Golub-Welsch step is float64.
    import mpmath as mp

    with mp.workdps(50 + 2 * order):
        mu = [mp.beta(mp.mpf(j + 1) / 2, mp.mpf(beta) + 1) / 2
              for j in range(2 * order)]
        alpha_mp = [mu[1] / mu[0]]
        beta_mp = [mu[0]]
        sigma_prev = {l: mp.mpf(0) for l in range(2 * order)}
        sigma_cur = {l: mu[l] for l in range(2 * order)}
        for k in range(1, order):
            sigma_new = {}
            for l in range(k, 2 * order - k):
                sigma_new[l] = (sigma_cur[l + 1]
                                - alpha_mp[k - 1] * sigma_cur[l]
                                - beta_mp[k - 1] * sigma_prev[l])
            alpha_mp.append(sigma_new[k + 1] / sigma_new[k]
                            - sigma_cur[k] / sigma_cur[k - 1])
            beta_mp.append(sigma_new[k] / sigma_cur[k - 1])
            sigma_prev, sigma_cur = sigma_cur, sigma_new
        a = np.array([float(v) for v in alpha_mp])
        b = np.array([float(v) for v in beta_mp])

    if order == 1:
        nodes = a.copy()
        weights = np.array([b[0]])
    else:
        evals, evecs = eigh_tridiagonal(a, np.sqrt(b[1:]))
        nodes = evals
        weights = b[0] * evecs[0, :] ** 2

    idx = np.argsort(nodes)
    nodes = nodes[idx]
    weights = weights[idx]
    if np.any(nodes <= 0.0) or np.any(nodes >= 1.0) or np.any(weights <= 0.0):
        raise DomainError(
            f"radial rule construction failed for beta={beta}, order={order}")
    return RadialRule(beta=beta, order=order, nodes=nodes, weights=weights)


def make_radial_rule(beta: float, order: int) -> RadialRule:
    """Gauss rule for weight (1-s^2)^beta on (0,1); cached immutably."""
    if beta <= -1.0:
        raise DomainError(f"radial weight exponent must be > -1, got {beta}")
    if order < 1:
        raise DomainError("radial order must be >= 1")
    return _radial_rule_cached(float(beta), int(order))


@lru_cache(maxsize=64)
def _sphere_rule_cached(n: int, order: int) -> SphereRule:
    if n == 1:
        directions = np.array([[-1.0], [1.0]])
        weights = np.array([1.0, 1.0])
    elif n == 2:
        m = 2 * order
        theta = 2.0 * np.pi * np.arange(m) / m
        directions = np.column_stack([np.cos(theta), np.sin(theta)])
        weights = np.full(m, 2.0 * np.pi / m)
    elif n == 3:
        # Product rule: Gauss-Legendre in the polar cosine, equispaced
        # azimuth.  Exact on spherical polynomials of degree <= 2*order-1.
        mu, wmu = roots_legendre(order)
        m_phi = 2 * order
        phi = 2.0 * np.pi * np.arange(m_phi) / m_phi
        sin_th = np.sqrt(1.0 - mu ** 2)
        dirs = np.empty((order, m_phi, 3))
        dirs[:, :, 0] = sin_th[:, None] * np.cos(phi)[None, :]
        dirs[:, :, 1] = sin_th[:, None] * np.sin(phi)[None, :]
        dirs[:, :, 2] = mu[:, None]
        directions = dirs.reshape(-1, 3)
        weights = (wmu[:, None] * (2.0 * np.pi / m_phi)).repeat(m_phi).reshape(order, m_phi).reshape(-1)
    else:
        raise DomainError(f"sphere quadrature supports n in {{1,2,3}}, got {n}")
    return SphereRule(dimension=n, order=order, directions=directions,
                      weights=weights)


def make_sphere_rule(n: int, order: int) -> SphereRule:
    if order < 1:
        raise DomainError("sphere order must be >= 1")
    return _sphere_rule_cached(int(n), int(order))


def _field_values(f, points: np.ndarray) -> np.ndarray:
    if hasattr(f, "eval"):
        return f.eval(points)
    return np.asarray(f(points), dtype=float)


def sphere_mean(f, x, r: float, rule: SphereRule) -> float:
    """Arithmetic mean of f over the sphere S(x, r); f(x) at r = 0."""
    x = np.asarray(x, dtype=float)
    if r < 0.0:
        raise DomainError("sphere radius must be non-negative")
    points = x[None, :] + r * rule.directions
    vals = _field_values(f, points)
    return float(np.dot(rule.weights, vals) / sphere_area_const(rule.dimension))


def sphere_means_many(f, x, radii: np.ndarray, rule: SphereRule) -> np.ndarray:
    """Sphere means of f about x for a whole vector of radii at once."""
    x = np.asarray(x, dtype=float)
    radii = np.asarray(radii, dtype=float)
    pts = x[None, None, :] + radii[:, None, None] * rule.directions[None, :, :]
    vals = _field_values(f, pts.reshape(-1, x.size)).reshape(radii.size, -1)
    return vals @ rule.weights / sphere_area_const(rule.dimension)


def ball_kernel_integral(f, x, t: float, beta: float, nu: float, lam: float,
                         radial: RadialRule, sphere: SphereRule) -> float:
    """Weighted ball integral

        int_{|xi-x|<t} (t^2-|xi-x|^2)^beta jbar(nu, lam*sqrt(t^2-|xi-x|^2))
                       f(xi) dxi

    via the substitution r = t*s, whose kernel the radial rule absorbs.
    """
    return float(ball_kernel_integral_many(
        f, x, np.array([t]), beta, nu, lam, radial, sphere)[0])


def ball_kernel_integral_many(f, x, tvals: np.ndarray, beta: float, nu: float,
                              lam: float, radial: RadialRule,
                              sphere: SphereRule) -> np.ndarray:
    """Vectorised ball kernel integral over a batch of radii t > 0."""
    if radial.beta != beta:
        raise ContractError(
            f"radial rule built for beta={radial.beta} used with beta={beta}")
    x = np.asarray(x, dtype=float)
    tvals = np.asarray(tvals, dtype=float)
    if np.any(tvals <= 0.0):
        raise DomainError("ball integral needs t > 0")
    n = x.size
    s = radial.nodes
    n_t, n_r, n_s = tvals.size, s.size, sphere.weights.size

    out = np.empty(n_t)
    chunk = max(1, _MAX_POINTS_PER_CHUNK // (n_r * n_s))
    root = np.sqrt(1.0 - s * s)
    radial_w = radial.weights * s ** (n - 1)
    for start in range(0, n_t, chunk):
        tc = tvals[start:start + chunk]
        pts = (x[None, None, None, :]
               + tc[:, None, None, None] * s[None, :, None, None]
               * sphere.directions[None, None, :, :])
        vals = _field_values(f, pts.reshape(-1, n)).reshape(tc.size, n_r, n_s)
        sphere_sums = vals @ sphere.weights                     # (T, R)
        if lam != 0.0:
            kern = bessel_clifford(nu, lam * tc[:, None] * root[None, :])
        else:
            kern = 1.0
        out[start:start + chunk] = (tc ** (n + 2.0 * beta)
                                    * np.sum(radial_w * kern * sphere_sums,
                                             axis=-1))
    return out
