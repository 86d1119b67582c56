"""Diagonal of the twisted Bergman kernel and its two-term expansion.

The diagonal of the kernel of T* T is sum_l |(T e_l)(z)|^2, which in the
trivialized basis is ||v^T M||^2 with v the vector of basis values at z.
Fitting (2 pi / k) * diagonal against b0 + b1/k + c/k^2 over a list of degrees
recovers f(z)^2 and the subleading coefficient; on the zero set of f the
latter is the convention-free value |df|^2/2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, NumericError
from .geometry import ChartPoint
from .sections import basis_values
from .toeplitz import OperatorMatrix

__all__ = ["ExpansionFit", "bergman_diag", "expansion_fit", "positivity_scan"]


@dataclass
class ExpansionFit:
    x: ChartPoint
    b0_est: float
    b1_est: float
    k_list: tuple[int, ...]
    residual: float


def bergman_diag(T: OperatorMatrix, p: ChartPoint) -> float:
    """B_k(z, z) = sum over the basis of |(T e_l)(z)|^2 in the metric h^k."""
    v = basis_values(T.k, p)
    images = v @ T.entries  # component m is (T e_m)(z)
    return float(np.sum(np.abs(images) ** 2))


def expansion_fit(
    op_factory: Callable[[int], OperatorMatrix],
    p: ChartPoint,
    k_list: Sequence[int],
) -> ExpansionFit:
    """Least-squares fit of (2 pi / k) B_k(z, z) ~ b0 + b1/k + c/k^2 over k_list."""
    ks = tuple(int(k) for k in k_list)
    if len(ks) < 3 or any(b <= a for a, b in zip(ks, ks[1:])) or ks[0] < 50:
        raise DomainError("k_list must contain at least 3 increasing degrees >= 50")
    y = np.array([2.0 * np.pi / k * bergman_diag(op_factory(k), p) for k in ks])
    kk = np.array(ks, dtype=float)
    design = np.column_stack([np.ones_like(kk), 1.0 / kk, 1.0 / kk**2])
    if np.linalg.cond(design) > 1e12:
        raise NumericError("ill-conditioned expansion fit; spread the degrees further")
    coef, _, _, _ = np.linalg.lstsq(design, y, rcond=None)
    resid = float(np.linalg.norm(design @ coef - y))
    return ExpansionFit(x=p, b0_est=float(coef[0]), b1_est=float(coef[1]),
                        k_list=ks, residual=resid)


def positivity_scan(T: OperatorMatrix, grid: Sequence[ChartPoint]) -> float:
    """Minimum of the kernel diagonal over the grid (n = 1, no rescaling needed)."""
    pts = list(grid)
    if not pts:
        raise DomainError("positivity scan needs a nonempty grid")
    return min(bergman_diag(T, p) for p in pts)
