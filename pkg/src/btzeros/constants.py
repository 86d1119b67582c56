"""The universal Planck-ball constant C_n(R) and the identities behind it.

Three independent routes are implemented and compared:
  * the closed form built from the truncated binomial series,
  * brute-force quadrature of the defining 2n-dimensional integral
    (reduced to a 2-D integral by the Wallis product, plus a plain Monte
    Carlo check over the ball),
  * the hypergeometric route through the Euler integral for
    F(1, 3/2; n+1; -R^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import dblquad, quad

from .errors import DomainError, NumericError

__all__ = [
    "ConstantsResult",
    "gen_binomial",
    "p_n_taylor",
    "c_n_closed",
    "i_n_quadrature",
    "i_n_monte_carlo",
    "hyp2f1_via_euler",
    "c_n_hypergeom",
    "constants_report",
]


@dataclass
class ConstantsResult:
    n: int
    R: float
    closed_form: float
    quadrature: float
    hypergeom: float
    max_discrepancy: float


def gen_binomial(alpha: float, ell: int) -> float:
    """Generalized binomial coefficient by the product recurrence."""
    if ell < 0:
        raise DomainError("binomial index must be non-negative")
    out = 1.0
    for j in range(ell):
        out *= (alpha - j) / (j + 1)
    return out


def p_n_taylor(n: int, x: float) -> float:
    """Taylor polynomial of order n-1 of (1+x)^(n-3/2) at 0."""
    if n < 1:
        raise DomainError("dimension n must be >= 1")
    alpha = n - 1.5
    term = 1.0
    total = 0.0
    for ell in range(n):
        total += term * x**ell
        term *= (alpha - ell) / (ell + 1)
    return total


def c_n_closed(n: int, R: float) -> float:
    """Closed form: (2^n pi^n (n-1)!/(2n-2)!) (P_n(2R^2) - (1+2R^2)^(n-3/2))."""
    if n < 1:
        raise DomainError("dimension n must be >= 1")
    if R < 0:
        raise DomainError("radius R must be >= 0")
    x = 2.0 * R * R
    pref = 2.0**n * math.pi**n * math.factorial(n - 1) / math.factorial(2 * n - 2)
    return pref * (p_n_taylor(n, x) - (1.0 + x) ** (n - 1.5))


def _j_n_dblquad(n: int, R: float) -> float:
    """J_n(R) = int_0^R int_0^pi (1 - r^2 cos^2 th)/(1 + r^2 cos^2 th)^2
    r^(2n-1) sin^(2n-2) th dr dth by adaptive 2-D quadrature."""

    def integrand(theta: float, r: float) -> float:
        c = r * math.cos(theta)
        c2 = c * c
        return (1.0 - c2) / (1.0 + c2) ** 2 * r ** (2 * n - 1) * math.sin(theta) ** (2 * n - 2)

    val, err = dblquad(integrand, 0.0, R, 0.0, math.pi, epsabs=1e-11, epsrel=1e-10)
    if err > 1e-8 * (1.0 + abs(val)):
        raise NumericError(f"J_{n}({R}) quadrature error estimate {err:.3e} too large")
    return val


def i_n_quadrature(n: int, R: float) -> float:
    """The 2n-dimensional integral of (1-2 t1^2)/(1+2 t1^2)^2 over the ball of
    radius R, via the substitution u = t sqrt(2) and the Wallis reduction
    I_n(R') = 2^(2n-1) J_n(R') pi^(n-1) (n-1)! / (2n-2)!.

    By construction this equals c_n_closed(n, R) / 2.
    """
    if n < 1 or n > 5:
        raise DomainError("quadrature route supports 1 <= n <= 5")
    if not 0.0 <= R <= 10.0:
        raise DomainError("quadrature route supports 0 <= R <= 10")
    if R == 0.0:
        return 0.0
    rp = R * math.sqrt(2.0)
    j = _j_n_dblquad(n, rp)
    i_n = 2.0 ** (2 * n - 1) * j * math.pi ** (n - 1) * math.factorial(n - 1) / math.factorial(2 * n - 2)
    return 2.0**-n * i_n


def _ball_volume_2n(n: int, R: float) -> float:
    """Volume of the Euclidean ball of radius R in dimension 2n: pi^n R^(2n)/n!."""
    return math.pi**n * R ** (2 * n) / math.factorial(n)


def i_n_monte_carlo(n: int, R: float, n_samples: int = 10**6, seed: int = 20240817):
    """Plain Monte Carlo estimate of the same 2n-ball integral.

    Returns (estimate, standard_error).
    """
    rng = np.random.default_rng(seed)
    d = 2 * n
    g = rng.standard_normal((n_samples, d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    radii = R * rng.random(n_samples) ** (1.0 / d)
    t1 = g[:, 0] * radii
    vals = (1.0 - 2.0 * t1**2) / (1.0 + 2.0 * t1**2) ** 2
    vol = _ball_volume_2n(n, R)
    est = vol * float(vals.mean())
    se = vol * float(vals.std(ddof=1)) / math.sqrt(n_samples)
    return est, se


def hyp2f1_via_euler(n: int, R: float) -> float:
    """F(1, 3/2; n+1; -R^2) through its Euler integral
    n * int_0^1 (1-t)^(n-1) (1 + R^2 t)^(-3/2) dt."""
    if n < 1:
        raise DomainError("dimension n must be >= 1")
    r2 = R * R

    def integrand(t: float) -> float:
        return (1.0 - t) ** (n - 1) * (1.0 + r2 * t) ** -1.5

    val, err = quad(integrand, 0.0, 1.0, epsabs=1e-14, epsrel=1e-12, limit=200)
    if err > 1e-10 * (1.0 + abs(val)):
        raise NumericError(f"Euler integral for n={n}, R={R} error estimate {err:.3e}")
    return n * val


def j_n_hypergeom(n: int, R: float) -> float:
    """J_n(R) = R^(2n) (2n-2)! pi / (2^(2n-1) n! (n-1)!) F(1, 3/2; n+1; -R^2)."""
    pref = (
        R ** (2 * n)
        * math.factorial(2 * n - 2)
        * math.pi
        / (2.0 ** (2 * n - 1) * math.factorial(n) * math.factorial(n - 1))
    )
    return pref * hyp2f1_via_euler(n, R)


def c_n_hypergeom(n: int, R: float) -> float:
    """C_n(R) through the hypergeometric expression for J_n at radius R sqrt(2)."""
    j = j_n_hypergeom(n, R * math.sqrt(2.0))
    return 2.0**n * math.pi ** (n - 1) * math.factorial(n - 1) / math.factorial(2 * n - 2) * j


def constants_report(n: int, R: float) -> ConstantsResult:
    """All three routes to C_n(R) plus their maximal pairwise discrepancy."""
    closed = c_n_closed(n, R)
    quadr = 2.0 * i_n_quadrature(n, R)
    hyp = c_n_hypergeom(n, R)
    disc = max(abs(closed - quadr), abs(closed - hyp), abs(quadr - hyp))
    return ConstantsResult(n=n, R=R, closed_form=closed, quadrature=quadr,
                           hypergeom=hyp, max_discrepancy=disc)
