"""Berezin-Toeplitz operator matrices in the orthonormal basis e_{l,k}.

The matrix convention is (T e_m) = sum_l M[l, m] e_l, so applying the operator
to a coefficient vector is the plain matrix-vector product M @ c.

Besides the closed-form operators taken from the height and x1*x2 examples,
``op_from_symbol_quadrature`` builds the matrix of T_k(f) = Pi_k (f .) for an
arbitrary bounded symbol by reducing each entry to a 1-D radial integral via
phase orthogonality; it serves as the independent oracle for the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, NumericError
from .geometry import ChartPoint, Symbol
from .sections import log_basis_norm_factor

__all__ = [
    "OperatorMatrix",
    "op_identity",
    "op_height",
    "op_x1",
    "op_x2",
    "op_xy_lambda",
    "op_from_symbol_quadrature",
    "xy_discrepancy",
]

# Angular sample count for the harmonic decomposition of a symbol; exact for
# trigonometric polynomials of degree < _N_THETA/2.
_N_THETA = 64
_HARMONIC_CUTOFF = 1e-13


@dataclass
class OperatorMatrix:
    """Dense complex (k+1) x (k+1) operator matrix; immutable after construction."""

    k: int
    entries: np.ndarray

    def __post_init__(self) -> None:
        self.entries = np.asarray(self.entries, dtype=complex)
        n = self.k + 1
        if self.entries.shape != (n, n):
            raise DomainError(
                f"matrix shape {self.entries.shape} does not match degree k={self.k}"
            )
        self.entries.setflags(write=False)


def op_identity(k: int) -> OperatorMatrix:
    """Quantization of f = 1."""
    return OperatorMatrix(k, np.eye(k + 1, dtype=complex))


def op_height(k: int) -> OperatorMatrix:
    """Quantization of the height x3: diagonal with entries (2l - k)/(k + 2).

    This is the action of (1/(k+2)) (2 z d/dz - k Id) on z^l; the Beta-integral
    oracle confirms these eigenvalues (see op_from_symbol_quadrature tests).
    """
    ell = np.arange(k + 1)
    return OperatorMatrix(k, np.diag((2.0 * ell - k) / (k + 2.0)).astype(complex))


def _evaluate_symbol_ring(f: Symbol, radius: float) -> np.ndarray:
    """Values of f on |z| = radius at _N_THETA equispaced angles."""
    theta = 2.0 * math.pi * np.arange(_N_THETA) / _N_THETA
    zs = radius * np.exp(1j * theta)
    if f.eval_complex is not None:
        return np.asarray(f.eval_complex(zs), dtype=float)
    return np.array([f(ChartPoint.of(z)) for z in zs], dtype=float)


def _angular_coefficients(f: Symbol, radius: float) -> np.ndarray:
    """A_q(r) = (1/2pi) int f(r e^{i th}) e^{-i q th} dth for q = FFT frequencies."""
    vals = _evaluate_symbol_ring(f, radius)
    return np.fft.fft(vals) / _N_THETA


def _active_harmonics(f: Symbol) -> list[int]:
    """Angular frequencies q with non-negligible content, probed at a few radii."""
    probes = [0.13, 0.41, 0.77, 1.0, 1.73, 3.14, 9.7]
    amp = np.zeros(_N_THETA)
    for r in probes:
        amp = np.maximum(amp, np.abs(_angular_coefficients(f, r)))
    peak = amp.max()
    if peak == 0.0:
        return [0]
    freqs = np.fft.fftfreq(_N_THETA, d=1.0 / _N_THETA).astype(int)
    active = [int(q) for q, a in zip(freqs, amp) if a > _HARMONIC_CUTOFF * peak]
    return sorted(active)


def _radial_entry(ang, k: int, ell: int, m: int, log_fac: np.ndarray) -> complex:
    """Matrix entry <f e_m, e_l> as a 1-D integral over u = t/(1+t), t = |z|^2.

    entry = 2 pi fac_l fac_m int_0^1 u^s (1-u)^(k-s) A_{m-l}(u/(1-u)) du
    with s = (l+m)/2 and A_q the angular coefficient of f at radius sqrt(t).
    The angular index convention follows z^m zbar^l = t^s e^{i(m-l) theta},
    whose angular integral against f is 2 pi A_{l-m} with the FFT sign of
    numpy (A_q = (1/2pi) int f e^{-i q theta} dtheta).  ``ang`` maps a radius
    to the cached FFT coefficient array A_q.
    """
    q = ell - m
    s = 0.5 * (ell + m)
    log_pref = math.log(2.0 * math.pi) + log_fac[ell] + log_fac[m]

    def integrand_part(u: float, part: str) -> float:
        if u <= 0.0 or u >= 1.0:
            return 0.0
        t = u / (1.0 - u)
        a = ang(math.sqrt(t))[q % _N_THETA]
        w = math.exp(log_pref + s * math.log(u) + (k - s) * math.log1p(-u))
        return w * (a.real if part == "re" else a.imag)

    u_star = min(max(s / max(k, 1), 1e-12), 1.0 - 1e-12)
    out = 0.0 + 0.0j
    for part in ("re", "im"):
        val, err = quad(
            integrand_part,
            0.0,
            1.0,
            args=(part,),
            points=[u_star],
            epsabs=1e-13,
            epsrel=1e-11,
            limit=300,
        )
        if err > 1e-10 * (1.0 + abs(val)):
            raise NumericError(
                f"radial quadrature for entry ({ell},{m}) of T_k({f.name}) at k={k} "
                f"did not converge: value {val}, error estimate {err}"
            )
        out += val if part == "re" else 1j * val
    return out


def op_from_symbol_quadrature(k: int, f: Symbol) -> OperatorMatrix:
    """Matrix of T_k(f) by adaptive radial quadrature; the quadrature oracle.

    Only the bands allowed by the symbol's angular harmonics are computed; the
    rest are exactly zero by phase orthogonality.
    """
    log_fac = log_basis_norm_factor(k)
    harmonics = _active_harmonics(f)
    cache: dict[float, np.ndarray] = {}

    def ang(radius: float) -> np.ndarray:
        got = cache.get(radius)
        if got is None:
            got = cache[radius] = _angular_coefficients(f, radius)
        return got

    entries = np.zeros((k + 1, k + 1), dtype=complex)
    for q in harmonics:
        for ell in range(k + 1):
            m = ell + q
            if 0 <= m <= k:
                entries[ell, m] = _radial_entry(ang, k, ell, m, log_fac)
    return OperatorMatrix(k, entries)


def _sphere_coordinate_symbol(which: int) -> Symbol:
    """x1 or x2 as chart symbols, with the x2 = -Im(2z/(1+|z|^2)) convention
    of geometry.stereo_inverse."""

    def ev(p: ChartPoint) -> float:
        if p.is_infinity:
            return 0.0
        z = p.z
        t = abs(z) ** 2
        w = 2.0 * z / (1.0 + t)
        return w.real if which == 1 else -w.imag

    def evc(zs):
        zs = np.asarray(zs, dtype=complex)
        w = 2.0 * zs / (1.0 + np.abs(zs) ** 2)
        return w.real if which == 1 else -w.imag

    return Symbol(eval=ev, name=f"x{which}", eval_complex=evc)


@lru_cache(maxsize=64)
def _cached_coordinate_matrix(k: int, which: int) -> OperatorMatrix:
    return op_from_symbol_quadrature(k, _sphere_coordinate_symbol(which))


def op_x1(k: int) -> OperatorMatrix:
    """Quantization of x1, computed by the quadrature oracle (tridiagonal, real)."""
    return _cached_coordinate_matrix(k, 1)


def op_x2(k: int) -> OperatorMatrix:
    """Quantization of x2, computed by the quadrature oracle (tridiagonal, imaginary)."""
    return _cached_coordinate_matrix(k, 2)


def _mu(p: int, q: int, k: int) -> float:
    """mu_{p,q,k} = sqrt(p(p-1)(k-q)(k-q-1)) for p, q in {2,...,k-2}, else 0."""
    if not (2 <= p <= k - 2 and 2 <= q <= k - 2):
        return 0.0
    return math.sqrt(p * (p - 1) * (k - q) * (k - q - 1))


def op_xy_lambda(k: int, lam: float) -> OperatorMatrix:
    """The composite operator with principal symbol x1*x2 - lambda.

    Pentadiagonal closed form:
    T e_l = (-i/(k+2)^2) (mu_{l,l-2,k} e_{l-2} - mu_{l+2,l,k} e_{l+2}) - lam e_l.
    """
    if not 0.0 < lam < 0.5:
        raise DomainError(f"lambda={lam!r} outside (0, 1/2); symbol would not vanish transversally")
    n = k + 1
    entries = np.zeros((n, n), dtype=complex)
    c = -1j / (k + 2.0) ** 2
    for ell in range(n):
        entries[ell, ell] = -lam
        if ell - 2 >= 0:
            entries[ell - 2, ell] += c * _mu(ell, ell - 2, k)
        if ell + 2 <= k:
            entries[ell + 2, ell] += -c * _mu(ell + 2, ell, k)
    return OperatorMatrix(k, entries)


def xy_discrepancy(k: int, lam: float) -> float:
    """Max entrywise gap between the printed pentadiagonal form and the
    quadrature-oracle product T_k(x1) T_k(x2) - lam*Id.

    A product of tridiagonal compressions differs from the printed matrix by
    lower-order terms (a skew diagonal part and edge entries, both O(1/k));
    the gap is reported, never silently removed.
    """
    printed = op_xy_lambda(k, lam).entries
    product = op_x1(k).entries @ op_x2(k).entries - lam * np.eye(k + 1)
    return float(np.max(np.abs(printed - product)))


def dump_matrix_csv(T: OperatorMatrix, path: str) -> None:
    """Debug dump: one CSV line (row, col, re, im) per nonzero entry."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("row,col,re,im\n")
        rows, cols = np.nonzero(T.entries)
        for r, c in zip(rows, cols):
            v = T.entries[r, c]
            fh.write(f"{r},{c},{v.real!r},{v.imag!r}\n")
