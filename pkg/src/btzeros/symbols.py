"""The concrete symbols used throughout the experiments, with their operators."""

from __future__ import annotations

import numpy as np

from .errors import DomainError
from .geometry import ChartPoint, Symbol
from .toeplitz import OperatorMatrix, op_height, op_identity, op_xy_lambda

__all__ = ["height_symbol", "xy_symbol", "identity_symbol", "make_symbol", "operator_factory"]


def height_symbol() -> Symbol:
    """The height x3, which reads (|z|^2 - 1)/(|z|^2 + 1) in the chart."""

    def ev(p: ChartPoint) -> float:
        if p.is_infinity:
            return 1.0
        t = abs(p.z) ** 2
        return (t - 1.0) / (t + 1.0)

    def l1(p: ChartPoint) -> float:
        # i ddbar log f^2 = L1 omega_FS with L1 = -4 (1 + |z|^4) / (|z|^2 - 1)^2.
        if p.is_infinity:
            return -4.0
        t = abs(p.z) ** 2
        return -4.0 * (1.0 + t * t) / (t - 1.0) ** 2

    def evc(zs):
        t = np.abs(np.asarray(zs, dtype=complex)) ** 2
        return (t - 1.0) / (t + 1.0)

    return Symbol(eval=ev, name="height", closed_form_L1=l1, eval_complex=evc)


def xy_symbol(lam: float) -> Symbol:
    """f = x1 x2 - lambda with x1 - i x2 = 2z/(1+|z|^2) (stereo_inverse convention)."""
    if not 0.0 < lam < 0.5:
        raise DomainError(f"lambda={lam!r} outside (0, 1/2)")

    def ev(p: ChartPoint) -> float:
        if p.is_infinity:
            return -lam
        z = p.z
        t = abs(z) ** 2
        w = 2.0 * z / (1.0 + t)
        return -w.real * w.imag - lam

    def evc(zs):
        zs = np.asarray(zs, dtype=complex)
        w = 2.0 * zs / (1.0 + np.abs(zs) ** 2)
        return -w.real * w.imag - lam

    return Symbol(eval=ev, name="xy", eval_complex=evc)


def identity_symbol() -> Symbol:
    """The constant symbol 1 (baseline, T_k = Id)."""
    return Symbol(eval=lambda p: 1.0, name="identity",
                  closed_form_L1=lambda p: 0.0,
                  eval_complex=lambda zs: np.ones_like(np.asarray(zs, dtype=complex), dtype=float))


def make_symbol(name: str, lam: float | None = None) -> Symbol:
    if name == "height":
        return height_symbol()
    if name == "xy":
        if lam is None:
            raise DomainError("the xy symbol needs a lambda value")
        return xy_symbol(lam)
    if name == "identity":
        return identity_symbol()
    raise DomainError(f"unknown symbol {name!r}")


def operator_factory(name: str, lam: float | None = None):
    """Degree -> OperatorMatrix for a named symbol."""
    if name == "height":
        return op_height
    if name == "xy":
        if lam is None:
            raise DomainError("the xy operator needs a lambda value")
        return lambda k: op_xy_lambda(k, lam)
    if name == "identity":
        return op_identity
    raise DomainError(f"unknown symbol {name!r}")
