"""Charts, metric and volumes on the Riemann sphere with the Fubini-Study form.

Everything is expressed in the affine coordinate z of the chart {[z:1]},
with the point at infinity [1:0] kept as an explicit separate case.  The
Fubini-Study form is normalized so that the total area of the sphere is 2*pi,
i.e. omega = 2 dx dy / (1+|z|^2)^2.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import DomainError, RegimeError

__all__ = [
    "ChartPoint",
    "SpherePoint",
    "Symbol",
    "INFINITY",
    "stereo_inverse",
    "stereo_forward",
    "fs_distance",
    "ball_volume",
    "grad_norm_sq",
    "log_f2_laplacian_density",
]

# Step sizes for the finite-difference stencils (scaled by 1+|z|).
_FD_STEP_FIRST = 1e-5
_FD_STEP_LAPLACIAN = 1e-4
# |f| below this means the caller is effectively on the zero set.
_ZERO_SET_THRESHOLD = 1e-8
# Chart values beyond this magnitude are evaluated through the swap chart w = 1/z.
_SWAP_CHART_THRESHOLD = 1e8


@dataclass(frozen=True)
class ChartPoint:
    """A point of the sphere: affine coordinate z, or the point at infinity.

    Infinity is encoded as ``value=None``, never as a large float.
    """

    value: Optional[complex]

    @classmethod
    def of(cls, z: complex) -> "ChartPoint":
        return cls(complex(z))

    @classmethod
    def at_infinity(cls) -> "ChartPoint":
        return cls(None)

    @property
    def is_infinity(self) -> bool:
        return self.value is None

    @property
    def z(self) -> complex:
        if self.value is None:
            raise DomainError("point at infinity has no affine coordinate")
        return self.value

    def __repr__(self) -> str:
        if self.value is None:
            return "ChartPoint(inf)"
        return f"ChartPoint({self.value!r})"


INFINITY = ChartPoint.at_infinity()


@dataclass(frozen=True)
class SpherePoint:
    """Cartesian point of the unit sphere in R^3."""

    x1: float
    x2: float
    x3: float

    def __post_init__(self) -> None:
        r2 = self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3
        if abs(r2 - 1.0) > 1e-12:
            raise DomainError(f"not on the unit sphere: |x|^2 = {r2!r}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x1, self.x2, self.x3)


@dataclass
class Symbol:
    """A real-valued observable on the sphere, evaluated in the chart.

    ``closed_form_L1``, when provided, is the density L1 with
    i ddbar log f^2 = L1 * omega_FS away from the zero set of f.
    """

    eval: Callable[[ChartPoint], float]
    name: str = "symbol"
    closed_form_L1: Optional[Callable[[ChartPoint], float]] = None
    # Optional vectorized chart evaluation on complex numpy arrays; used by
    # quadrature code paths that would otherwise pay per-point call overhead.
    eval_complex: Optional[Callable[[object], object]] = None

    def __call__(self, p: ChartPoint) -> float:
        return self.eval(p)


def stereo_inverse(p: ChartPoint) -> SpherePoint:
    """Map a chart point to the unit sphere.

    Convention: x3(z) = (|z|^2 - 1)/(|z|^2 + 1) and x1 - i x2 = 2z/(1+|z|^2),
    so z=0 is the south pole and infinity the north pole.  The x2 orientation
    (the one free sign of the identification) is fixed so that the chart
    symbol of the composite x1*x2 operator matches its printed matrix; no
    statistic depends on it.
    """
    if p.is_infinity:
        return SpherePoint(0.0, 0.0, 1.0)
    z = p.z
    t = abs(z) ** 2
    if t > _SWAP_CHART_THRESHOLD**2:
        # Swap chart w = 1/z: 2z/(1+|z|^2) = 2 conj(w)/(1+|w|^2).
        w = 1.0 / z
        s = abs(w) ** 2
        zeta = 2.0 * w.conjugate() / (1.0 + s)
        return SpherePoint(zeta.real, -zeta.imag, (1.0 - s) / (1.0 + s))
    zeta = 2.0 * z / (1.0 + t)
    return SpherePoint(zeta.real, -zeta.imag, (t - 1.0) / (t + 1.0))


def stereo_forward(p: SpherePoint) -> ChartPoint:
    """Inverse of :func:`stereo_inverse`: sphere point to chart coordinate."""
    if 1.0 - p.x3 < 1e-15:
        return INFINITY
    im = -p.x2 if p.x2 != 0.0 else 0.0  # avoid -0.0 leaking into output
    return ChartPoint.of(complex(p.x1, im) / (1.0 - p.x3))


def fs_distance(p: ChartPoint, q: ChartPoint) -> float:
    """Geodesic distance for the Fubini-Study metric, in [0, pi/2].

    d(z, w) = arctan( |z - w| / |1 + conj(z) w| ), with d(z, infinity) =
    arctan(1/|z|).
    """
    if p.is_infinity and q.is_infinity:
        return 0.0
    if p.is_infinity or q.is_infinity:
        z = q.z if p.is_infinity else p.z
        a = abs(z)
        if a == 0.0:
            return math.pi / 2.0
        return math.atan(1.0 / a)
    z, w = p.z, q.z
    num = abs(z - w)
    den = abs(1.0 + z.conjugate() * w)
    if den == 0.0:
        return math.pi / 2.0
    return math.atan2(num, den)


def ball_volume(rho: float) -> float:
    """Area of a geodesic ball of radius rho: 2*pi*(1 - 1/(1+tan^2 rho)) = 2*pi*sin^2 rho."""
    if not 0.0 <= rho <= math.pi / 2.0 + 1e-15:
        raise DomainError(f"ball radius {rho!r} outside [0, pi/2]")
    s = math.sin(min(rho, math.pi / 2.0))
    return 2.0 * math.pi * s * s


def _holomorphic_derivative(f: Symbol, z: complex) -> complex:
    """Central finite-difference d/dz of a real symbol at a finite chart point."""
    h = _FD_STEP_FIRST * (1.0 + abs(z))
    fx = (f(ChartPoint.of(z + h)) - f(ChartPoint.of(z - h))) / (2.0 * h)
    fy = (f(ChartPoint.of(z + 1j * h)) - f(ChartPoint.of(z - 1j * h))) / (2.0 * h)
    return 0.5 * (fx - 1j * fy)


def grad_norm_sq(f: Symbol, p: ChartPoint) -> float:
    """Squared FS norm of df at a finite chart point: 2 (1+|z|^2)^2 |df/dz|^2."""
    z = p.z
    dz = _holomorphic_derivative(f, z)
    t = abs(z) ** 2
    return 2.0 * (1.0 + t) ** 2 * abs(dz) ** 2


def log_f2_laplacian_density(f: Symbol, p: ChartPoint) -> float:
    """Density L1 with i ddbar log f^2 = L1 * omega_FS, away from {f=0}.

    Uses the symbol's closed form when available, otherwise a 5-point stencil
    for the Euclidean Laplacian of log f^2 times (1+|z|^2)^2 / 4.
    """
    fv = f(p)
    if abs(fv) < _ZERO_SET_THRESHOLD:
        raise RegimeError(f"symbol {f.name!r} vanishes at {p!r}; no off-zero density")
    if f.closed_form_L1 is not None:
        return f.closed_form_L1(p)
    if p.is_infinity:
        # Evaluate in the swap chart via the antipodal-symmetric formula:
        # L1 is chart-independent, so use a large-|z| proxy through w = 1/z.
        raise DomainError("finite-difference density not supported at infinity; "
                          "provide closed_form_L1")
    z = p.z
    h = _FD_STEP_LAPLACIAN * (1.0 + abs(z))

    def g(w: complex) -> float:
        val = f(ChartPoint.of(w))
        if abs(val) < _ZERO_SET_THRESHOLD:
            raise RegimeError(f"stencil point {w!r} falls on the zero set of {f.name!r}")
        return math.log(val * val)

    lap = (g(z + h) + g(z - h) + g(z + 1j * h) + g(z - 1j * h) - 4.0 * g(z)) / (h * h)
    t = abs(z) ** 2
    return 0.25 * lap * (1.0 + t) ** 2
