"""Roots of twisted sections on the sphere and counting in geodesic balls.

A section with coefficients c_l corresponds to the polynomial
p(z) = sum_l c_l fac_l z^l in the affine chart; its missing degree (leading
coefficients that vanish) shows up as roots at the point at infinity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NumericError
from .geometry import ChartPoint, fs_distance
from .sections import SectionVector, log_basis_norm_factor
from .toeplitz import OperatorMatrix

__all__ = ["ZeroSet", "apply_operator", "polynomial_roots", "count_in_ball"]

# Leading coefficients below this fraction of the largest one are treated as
# zero and counted as roots at infinity (guards underflow at large k only;
# Gaussian coefficients never vanish exactly).
_TRIM_THRESHOLD = 1e-13
# Polished roots beyond this magnitude are reclassified as at infinity.
_INFINITY_RADIUS = 1e8
# Clustering radius for multiple roots after polishing.
_CLUSTER_RADIUS = 1e-7


@dataclass
class ZeroSet:
    """Roots in the chart with multiplicities, plus the count at infinity."""

    k: int
    roots: np.ndarray
    multiplicities: np.ndarray
    roots_at_infinity: int

    def total_count(self) -> int:
        return int(self.multiplicities.sum()) + self.roots_at_infinity


def apply_operator(T: OperatorMatrix, s: SectionVector) -> SectionVector:
    """Coefficientwise action of the operator matrix."""
    if T.k != s.k:
        raise DomainError(f"degree mismatch: operator k={T.k}, section k={s.k}")
    return SectionVector(s.k, T.entries @ s.coeffs)


def _scaled_coefficients(s: SectionVector) -> np.ndarray:
    """Chart-polynomial coefficients c_l * fac_l, rescaled so max |.| = 1.

    Built in log space so the binomial normalizations never overflow.
    """
    log_fac = log_basis_norm_factor(s.k)
    mag = np.abs(s.coeffs)
    with np.errstate(divide="ignore"):
        log_mag = np.where(mag > 0.0, np.log(np.where(mag > 0.0, mag, 1.0)), -np.inf) + log_fac
    top = log_mag.max()
    if top == -np.inf:
        raise DomainError("zero section has no well-defined zero set")
    phases = np.where(mag > 0.0, s.coeffs / np.where(mag > 0.0, mag, 1.0), 0.0)
    return np.exp(log_mag - top) * phases


def _polyval_pair(coeffs: np.ndarray, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """p(z) and p'(z) by Horner, coefficients in increasing degree."""
    p = np.zeros_like(z)
    dp = np.zeros_like(z)
    for c in coeffs[::-1]:
        dp = dp * z + p
        p = p * z + c
    return p, dp


def _newton_polish(coeffs: np.ndarray, roots: np.ndarray, steps: int = 2) -> np.ndarray:
    """Newton refinement; roots with |z| > 10 go through the reversed polynomial
    at w = 1/z to avoid overflow."""
    d = len(coeffs) - 1
    rev = coeffs[::-1]
    for _ in range(steps):
        big = np.abs(roots) > 10.0
        small = ~big
        if small.any():
            p, dp = _polyval_pair(coeffs, roots[small])
            step = np.where(dp != 0.0, p / np.where(dp != 0.0, dp, 1.0), 0.0)
            roots[small] = roots[small] - step
        if big.any():
            w = 1.0 / roots[big]
            qv, dqv = _polyval_pair(rev, w)
            # p(z) = z^d q(w); z - p/p' = z - z q / (d q - w q').
            den = d * qv - w * dqv
            step = np.where(den != 0.0, roots[big] * qv / np.where(den != 0.0, den, 1.0), 0.0)
            roots[big] = roots[big] - step
    return roots


def _residuals(coeffs: np.ndarray, roots: np.ndarray) -> np.ndarray:
    """Backward-error style residual |p(z)| / sum_l |c_l z^l| per root."""
    out = np.empty(len(roots))
    absc = np.abs(coeffs)
    d = len(coeffs) - 1
    big = np.abs(roots) > 1.0
    small = ~big
    if small.any():
        z = roots[small]
        p, _ = _polyval_pair(coeffs, z)
        scale, _ = _polyval_pair(absc, np.abs(z).astype(complex))
        out[small] = np.abs(p) / np.maximum(np.abs(scale), 1e-300)
    if big.any():
        w = 1.0 / roots[big]
        qv, _ = _polyval_pair(coeffs[::-1], w)
        scale, _ = _polyval_pair(absc[::-1], np.abs(w).astype(complex))
        out[big] = np.abs(qv) / np.maximum(np.abs(scale), 1e-300)
    return out


def _cluster(roots: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Group roots closer than the clustering radius into multiple roots."""
    n = len(roots)
    if n == 0:
        return roots, np.zeros(0, dtype=int)
    if n <= 1500:
        dist = np.abs(roots[:, None] - roots[None, :])
        np.fill_diagonal(dist, np.inf)
        if dist.min() >= _CLUSTER_RADIUS:
            return roots, np.ones(n, dtype=int)
    else:
        order = np.argsort(roots.real, kind="stable")
        gaps = np.abs(np.diff(roots[order]))
        if gaps.min() >= _CLUSTER_RADIUS:
            return roots, np.ones(n, dtype=int)
        dist = np.abs(roots[:, None] - roots[None, :])
        np.fill_diagonal(dist, np.inf)
    # Rare path: greedy union of near-coincident roots.
    used = np.zeros(n, dtype=bool)
    reps: list[complex] = []
    mults: list[int] = []
    for i in range(n):
        if used[i]:
            continue
        group = [i]
        used[i] = True
        for j in range(i + 1, n):
            if not used[j] and min(abs(roots[j] - roots[g]) for g in group) < _CLUSTER_RADIUS:
                used[j] = True
                group.append(j)
        reps.append(complex(np.mean(roots[group])))
        mults.append(len(group))
    return np.array(reps, dtype=complex), np.array(mults, dtype=int)


def polynomial_roots(s: SectionVector) -> ZeroSet:
    """All zeros of the section's chart polynomial, infinity included.

    Leading coefficients at or below the trim threshold are dropped and
    counted as roots at infinity; the remaining roots come from the balanced
    companion matrix and two Newton polish steps.
    """
    coeffs = _scaled_coefficients(s)
    k = s.k
    # Trim negligible leading coefficients -> roots at infinity.
    keep = len(coeffs) - 1
    while keep > 0 and abs(coeffs[keep]) <= _TRIM_THRESHOLD:
        keep -= 1
    at_infinity = k - keep
    coeffs = coeffs[: keep + 1]
    if keep == 0:
        return ZeroSet(k, np.zeros(0, dtype=complex), np.zeros(0, dtype=int), at_infinity)
    roots = np.polynomial.polynomial.polyroots(coeffs)
    if len(roots) != keep:
        raise NumericError(f"companion matrix returned {len(roots)} roots, expected {keep}")
    roots = _newton_polish(coeffs, roots.astype(complex))
    # Anything that escaped to huge modulus counts at infinity for our purposes.
    escaped = np.abs(roots) > _INFINITY_RADIUS
    at_infinity += int(escaped.sum())
    roots = roots[~escaped]
    res = _residuals(coeffs, roots)
    if res.size and res.max() > 1e-8:
        raise NumericError(
            f"root residual {res.max():.3e} exceeds 1e-8 for degree-{k} section"
        )
    reps, mults = _cluster(roots)
    return ZeroSet(k, reps, mults, at_infinity)


def count_in_ball(zs: ZeroSet, center: ChartPoint, rho: float) -> int:
    """Zeros (with multiplicity, infinity included) within FS distance rho of center.

    Boundary ties within 1e-12 count as inside.
    """
    if not 0.0 <= rho <= math.pi / 2.0 + 1e-15:
        raise DomainError(f"ball radius {rho!r} outside [0, pi/2]")
    cutoff = rho + 1e-12
    total = 0
    if len(zs.roots):
        if center.is_infinity:
            a = np.abs(zs.roots)
            d = np.where(a > 0.0, np.arctan(1.0 / np.maximum(a, 1e-300)), math.pi / 2.0)
        else:
            c = center.z
            num = np.abs(zs.roots - c)
            den = np.abs(1.0 + np.conj(c) * zs.roots)
            d = np.arctan2(num, den)
        total += int(zs.multiplicities[d < cutoff].sum())
    if zs.roots_at_infinity:
        d_inf = 0.0 if center.is_infinity else fs_distance(center, ChartPoint.at_infinity())
        if d_inf < cutoff:
            total += zs.roots_at_infinity
    return total
