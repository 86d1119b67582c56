"""Twisted kernel diagonal and the two-term semiclassical fit."""

import math

import numpy as np
import pytest

from btzeros.errors import DomainError
from btzeros.geometry import ChartPoint
from btzeros.kernel import bergman_diag, expansion_fit, positivity_scan
from btzeros.toeplitz import op_height, op_identity


def test_identity_kernel_diagonal_is_bergman():
    # untwisted diagonal is (k+1)/(2 pi) at every point
    k = 80
    target = (k + 1) / (2 * math.pi)
    for z in (0.0, 1.0, 0.5 - 2.0j):
        val = bergman_diag(op_identity(k), ChartPoint.of(z))
        assert abs(val - target) < 1e-10 * target


def test_height_kernel_leading_term():
    # (2 pi / k) B_k -> f(z)^2; at z = 2 the height is 3/5
    k = 800
    z = ChartPoint.of(2.0)
    val = 2 * math.pi / k * bergman_diag(op_height(k), z)
    assert abs(val - 0.36) < 0.01


def test_expansion_fit_identity():
    fit = expansion_fit(op_identity, ChartPoint.of(0.7), [100, 200, 400])
    # exact relation (2 pi / k)(k+1)/(2 pi) = 1 + 1/k: b0 = b1 = 1
    assert abs(fit.b0_est - 1.0) < 1e-9
    assert abs(fit.b1_est - 1.0) < 1e-6
    assert fit.residual < 1e-10


def test_expansion_fit_validates_k_list():
    with pytest.raises(DomainError):
        expansion_fit(op_identity, ChartPoint.of(0.0), [100, 200])
    with pytest.raises(DomainError):
        expansion_fit(op_identity, ChartPoint.of(0.0), [200, 100, 400])
    with pytest.raises(DomainError):
        expansion_fit(op_identity, ChartPoint.of(0.0), [10, 20, 40])


def test_positivity_scan():
    k = 60
    rng = np.random.default_rng(1)
    grid = [ChartPoint.of(complex(a, b)) for a, b in rng.uniform(-3, 3, size=(40, 2))]
    assert positivity_scan(op_height(k), grid) > 0.0
    with pytest.raises(DomainError):
        positivity_scan(op_height(k), [])
