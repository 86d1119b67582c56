"""Orthonormal basis of degree-k sections and Gaussian random coefficients.

The basis is e_{l,k} = sqrt((k+1) C(k,l) / (2*pi)) z0^l z1^(k-l); in the
affine chart its trivialization with the half-weight of the Hermitian metric
is ehat_l(z) = sqrt((k+1) C(k,l)/(2*pi)) z^l / (1+|z|^2)^(k/2), so that
|s(z)|_h^2 = |sum_l c_l ehat_l(z)|^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DomainError
from .geometry import ChartPoint

__all__ = [
    "SectionVector",
    "RngSpec",
    "basis_norm_factor",
    "log_basis_norm_factor",
    "sample_random_section",
    "basis_values",
    "pointwise_norm_sq",
]

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class RngSpec:
    """Seed plus per-trial stream index; (seed, stream) pins the draw."""

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        return np.random.default_rng([self.seed & 0xFFFFFFFFFFFFFFFF, self.stream])


@dataclass
class SectionVector:
    """Coefficients of a section of O(k) in the orthonormal basis e_{l,k}."""

    k: int
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.shape != (self.k + 1,):
            raise DomainError(
                f"coefficient vector has shape {self.coeffs.shape}, expected ({self.k + 1},)"
            )

    def l2_norm_sq(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))


def log_basis_norm_factor(k: int, ell=None) -> np.ndarray:
    """log of the basis normalization sqrt((k+1) C(k,l) / 2 pi), vectorized over l."""
    if ell is None:
        ell = np.arange(k + 1)
    ell = np.asarray(ell)
    if np.any(ell < 0) or np.any(ell > k):
        raise IndexError(f"basis index out of range for k={k}")
    log_binom = gammaln(k + 1) - gammaln(ell + 1) - gammaln(k - ell + 1)
    return 0.5 * (math.log(k + 1) + log_binom - _LOG_2PI)


def basis_norm_factor(k: int, ell: int) -> float:
    """sqrt((k+1) C(k,l) / (2*pi)); log-space internally, exact to rounding."""
    return float(np.exp(log_basis_norm_factor(k, ell)))


def sample_random_section(k: int, rng: RngSpec) -> SectionVector:
    """Draw i.i.d. standard complex Gaussian coefficients (E|alpha|^2 = 1)."""
    g = rng.generator()
    re = g.normal(0.0, math.sqrt(0.5), size=k + 1)
    im = g.normal(0.0, math.sqrt(0.5), size=k + 1)
    return SectionVector(k, re + 1j * im)


def basis_values(k: int, p: ChartPoint) -> np.ndarray:
    """Trivialized basis values ehat_l(z) for l = 0..k, stable for any |z|.

    At infinity only l=k survives, with value sqrt((k+1)/(2*pi)).
    """
    log_fac = log_basis_norm_factor(k)
    ell = np.arange(k + 1)
    if p.is_infinity:
        out = np.zeros(k + 1, dtype=complex)
        out[k] = math.sqrt((k + 1) / (2.0 * math.pi))
        return out
    z = p.z
    a = abs(z)
    if a == 0.0:
        out = np.zeros(k + 1, dtype=complex)
        out[0] = math.sqrt((k + 1) / (2.0 * math.pi))
        return out
    log_a = math.log(a)
    # log(1+|z|^2) without overflow for huge |z|.
    if log_a > 200.0:
        log_one_plus_t = 2.0 * log_a + math.log1p(math.exp(-2.0 * log_a))
    else:
        log_one_plus_t = math.log1p(a * a)
    log_mag = log_fac + ell * log_a - 0.5 * k * log_one_plus_t
    phase = np.exp(1j * ell * np.angle(z))
    return np.exp(log_mag) * phase


def pointwise_norm_sq(s: SectionVector, p: ChartPoint) -> float:
    """|s(z)|^2 in the Hermitian metric h^k, evaluated stably."""
    v = basis_values(s.k, p)
    return float(abs(np.dot(s.coeffs, v)) ** 2)
