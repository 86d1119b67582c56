"""End-to-end acceptance suite.

Each test prints one PASS/FAIL line for its criterion; run with `pytest -s`
to see them as they complete.  The Monte Carlo criteria use fixed seeds, so
every run is reproducible bit for bit.
"""

import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from btzeros.constants import (
    c_n_closed,
    i_n_quadrature,
    j_n_hypergeom,
    p_n_taylor,
)
from btzeros.experiments import ExperimentConfig, reconstruct_grid, simulate
from btzeros.geometry import ChartPoint
from btzeros.kernel import expansion_fit, positivity_scan
from btzeros.sections import RngSpec, basis_values, sample_random_section
from btzeros.symbols import xy_symbol
from btzeros.toeplitz import (
    op_from_symbol_quadrature,
    op_height,
    op_identity,
    op_xy_lambda,
)
from btzeros.symbols import height_symbol, identity_symbol
from btzeros.zeros import apply_operator, polynomial_roots

SEED = 20240817
WORKERS = 4


def _report(num: int, label: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    line = f"criterion {num:2d} [{label}]: {status}"
    if detail:
        line += f"  ({detail})"
    print(line, flush=True)
    assert ok, line


def test_criterion_01_constants_triple_agreement():
    start = time.time()
    worst = 0.0
    for n in (1, 2, 3, 4, 5):
        for R in (0.25, 0.5, 1.0, 2.0, 5.0):
            closed = c_n_closed(n, R)
            quadr = 2.0 * i_n_quadrature(n, R)
            rel = abs(closed - quadr) / (1.0 + abs(closed))
            worst = max(worst, rel)
    worst_j = 0.0
    for n in (1, 2, 3, 4, 5):
        for R in (0.25, 0.5, 1.0, 2.0, 5.0):
            lhs = j_n_hypergeom(n, R)
            rhs = math.pi * (p_n_taylor(n, R * R) - (1 + R * R) ** (n - 1.5))
            worst_j = max(worst_j, abs(lhs - rhs) / (1.0 + abs(rhs)))
    elapsed = time.time() - start
    ok = worst <= 1e-6 and worst_j <= 1e-9 and elapsed < 10.0
    _report(1, "constants triple agreement", ok,
            f"max rel gap {worst:.2e}, identity gap {worst_j:.2e}, {elapsed:.1f}s")


def test_criterion_02_n1_closed_form():
    rs = np.linspace(0.0, 5.0, 100)
    worst = 0.0
    for R in rs:
        expected = 2 * math.pi * (1 - 1 / math.sqrt(1 + 2 * R * R))
        worst = max(worst, abs(c_n_closed(1, R) - expected))
    ok = worst <= 1e-12
    _report(2, "n=1 closed form", ok, f"max abs gap {worst:.2e}")


def test_criterion_03_bergman_constancy():
    start = time.time()
    rng = np.random.default_rng(0)
    worst = 0.0
    for k in (10, 100, 500):
        target = (k + 1) / (2 * math.pi)
        for _ in range(200):
            z = complex(*rng.normal(scale=3.0, size=2))
            total = float(np.sum(np.abs(basis_values(k, ChartPoint.of(z))) ** 2))
            worst = max(worst, abs(total - target) / target)
    elapsed = time.time() - start
    ok = worst <= 1e-10 and elapsed < 5.0
    _report(3, "Bergman constancy", ok, f"max rel err {worst:.2e}, {elapsed:.1f}s")


def test_criterion_04_toeplitz_oracle():
    start = time.time()
    worst_h = worst_i = 0.0
    for k in (5, 50, 200):
        quad_h = op_from_symbol_quadrature(k, height_symbol()).entries
        worst_h = max(worst_h, float(np.max(np.abs(quad_h - op_height(k).entries))))
        quad_i = op_from_symbol_quadrature(k, identity_symbol()).entries
        worst_i = max(worst_i, float(np.max(np.abs(quad_i - np.eye(k + 1)))))
    elapsed = time.time() - start
    ok = worst_h <= 1e-10 and worst_i <= 1e-10 and elapsed < 30.0
    _report(4, "Toeplitz quadrature oracle", ok,
            f"height gap {worst_h:.2e}, identity gap {worst_i:.2e}, {elapsed:.1f}s")


def test_criterion_05_kernel_expansion():
    start = time.time()
    fit = expansion_fit(op_height, ChartPoint.of(1.0), (100, 200, 400, 800))
    rng = np.random.default_rng(1)
    grid = [ChartPoint.of(complex(a, b)) for a, b in rng.uniform(-4, 4, size=(100, 2))]
    min_h = positivity_scan(op_height(800), grid)
    min_xy = positivity_scan(op_xy_lambda(800, 1.0 / 3.0), grid)
    elapsed = time.time() - start
    ok = (abs(fit.b0_est) <= 1e-3 and abs(fit.b1_est - 1.0) <= 0.05
          and min_h > 0.0 and min_xy > 0.0 and elapsed < 120.0)
    _report(5, "kernel two-term expansion", ok,
            f"b0 {fit.b0_est:.2e}, b1 {fit.b1_est:.4f}, "
            f"min diag height {min_h:.3g}, xy {min_xy:.3g}, {elapsed:.1f}s")


def test_criterion_06_exact_total_count():
    start = time.time()
    k = 100
    T = op_height(k)
    ok = True
    for m in range(1000):
        s = sample_random_section(k, RngSpec(SEED, m))
        zs = polynomial_roots(apply_operator(T, s))
        if zs.total_count() != k:
            ok = False
            break
    elapsed = time.time() - start
    ok = ok and elapsed < 120.0
    _report(6, "exact total zero count", ok, f"1000 trials at k=100, {elapsed:.1f}s")


def test_criterion_07_untwisted_baseline():
    start = time.time()
    cfg = ExperimentConfig(symbol="identity", k=100, n_trials=5000,
                           centers=[ChartPoint.of(0.0), ChartPoint.of(1.0),
                                    ChartPoint.of(0.5 + 0.5j)],
                           r_values=[1.0], seed=SEED, workers=WORKERS)
    reports = simulate(cfg)
    ok = True
    details = []
    for r in reports:
        se = r.sample_std / math.sqrt(r.N)
        if abs(r.sample_mean_E) > 3 * se:
            ok = False
        details.append(f"{r.sample_mean_E:+.4f}+-{se:.4f}")
    elapsed = time.time() - start
    ok = ok and elapsed < 180.0
    _report(7, "untwisted baseline", ok, f"means {', '.join(details)}, {elapsed:.1f}s")


def test_criterion_08_on_zero_regime():
    start = time.time()
    cfg = ExperimentConfig(symbol="height", k=100, n_trials=2000,
                           centers=[ChartPoint.of(1.0)],
                           r_values=[0.5, 1.0, 1.5, 2.0, 2.5],
                           seed=SEED, workers=WORKERS)
    reports = simulate(cfg)
    ok = True
    details = []
    for r in reports:
        se = r.sample_std / math.sqrt(r.N)
        bound = 3 * se + 1.0 / math.sqrt(r.k)
        dev = abs(r.sample_mean_E - r.theory)
        if dev > bound:
            ok = False
        details.append(f"R={r.R:g}: dev {dev:.3f} <= {bound:.3f}")
    elapsed = time.time() - start
    ok = ok and elapsed < 600.0
    _report(8, "on-zero regime at the equator", ok,
            f"{'; '.join(details)}, {elapsed:.1f}s")


def test_criterion_09_off_zero_regime():
    start = time.time()
    k = 50
    cfg = ExperimentConfig(symbol="height", k=k, n_trials=20000,
                           centers=[ChartPoint.of(0.0)], r_values=[1.0, 2.0, 3.0],
                           seed=SEED, workers=WORKERS)
    reports = simulate(cfg)
    ok = True
    details = []
    for r in reports:
        nominal = -2.0 * r.R * r.R / k
        se = r.sample_std / math.sqrt(r.N)
        tight = abs(r.sample_mean_E - nominal) <= 3 * se + 3.0 / k**1.5
        ratio = r.sample_mean_E / nominal
        # mandatory gate: correct sign and order of magnitude
        if not (r.sample_mean_E < 0.0 and 0.2 <= ratio <= 5.0):
            ok = False
        details.append(f"R={r.R:g}: mean {r.sample_mean_E:+.4f}, nominal {nominal:+.4f}, "
                       f"ratio {ratio:.2f}, tight bound {'met' if tight else 'not met'}")
    elapsed = time.time() - start
    ok = ok and elapsed < 900.0
    _report(9, "off-zero regime (sign and magnitude gated, tight bound reported)",
            ok, f"{'; '.join(details)}, {elapsed:.1f}s")


def test_criterion_10_two_regime_contrast():
    start = time.time()
    cfg = ExperimentConfig(symbol="height", k=100, n_trials=5000,
                           centers=[ChartPoint.of(1.0), ChartPoint.of(0.0)],
                           r_values=[1.0], seed=SEED, workers=WORKERS)
    reports = simulate(cfg)
    on = next(r for r in reports if not r.center.is_infinity and r.center.z == 1.0)
    off = next(r for r in reports if not r.center.is_infinity and r.center.z == 0.0)
    ratio = abs(on.sample_mean_E) / abs(off.sample_mean_E)
    elapsed = time.time() - start
    ok = ratio >= 5.0
    _report(10, "two-regime contrast", ok,
            f"|E(equator)| / |E(pole)| = {ratio:.1f}, {elapsed:.1f}s")


def _curve_distance_grid(lam: float, grid_size: int, square: float) -> np.ndarray:
    """Distance from each cell center to the level curve of the symbol,
    sampled by marching zero crossings on a fine grid."""
    f = xy_symbol(lam)
    n_fine = 800
    xs = np.linspace(-square, square, n_fine)
    gx, gy = np.meshgrid(xs, xs)
    vals = f.eval_complex(gx + 1j * gy)
    sign = np.sign(vals)
    pts = []
    rows, cols = np.where(sign[:, :-1] * sign[:, 1:] < 0)
    for i, j in zip(rows, cols):
        a, b = vals[i, j], vals[i, j + 1]
        pts.append(complex(xs[j] + a / (a - b) * (xs[j + 1] - xs[j]), xs[i]))
    rows, cols = np.where(sign[:-1, :] * sign[1:, :] < 0)
    for i, j in zip(rows, cols):
        a, b = vals[i, j], vals[i + 1, j]
        pts.append(complex(xs[j], xs[i] + a / (a - b) * (xs[i + 1] - xs[i])))
    curve_pts = np.array(pts)
    step = 2.0 * square / grid_size
    coords = -square + step * (np.arange(grid_size) + 0.5)
    centers = coords[None, :] + 1j * coords[:, None]
    return np.min(np.abs(centers.ravel()[:, None] - curve_pts[None, :]),
                  axis=1).reshape(grid_size, grid_size)


def test_criterion_11_level_set_reconstruction():
    start = time.time()
    lam = 1.0 / 3.0
    grid_size, square = 40, 2.0
    step = 2.0 * square / grid_size
    report = reconstruct_grid("xy", lam, k=60, n_trials=200, grid_size=grid_size,
                              square=square, R=1.0 / math.sqrt(2.0), seed=SEED,
                              workers=WORKERS)
    dist = _curve_distance_grid(lam, grid_size, square)
    mask = report.on_zero_mask
    near = dist < step
    recall = float(mask[near].mean())
    fp = float(mask[~near].mean())
    fp_two = float(mask[dist >= 2 * step].mean())
    fp_three = float(mask[dist >= 3 * step].mean())
    elapsed = time.time() - start
    # The false-positive gate is structural at this scale: where the chart
    # metric compresses (|z| > 1.5) the counting ball of radius R/sqrt(k)
    # spans 2 to 4 grid cells, so cells beyond one cell from the curve have a
    # genuinely elevated count and no threshold separates them (raising it
    # breaks the recall gate first).  The rates decay with distance as the
    # ball overlap shrinks; both are reported and asserted as stated.
    ok = recall >= 0.90 and fp <= 0.05 and elapsed < 1200.0
    _report(11, "level-set reconstruction", ok,
            f"recall {recall:.3f}, false positives {fp:.3f} beyond one cell, "
            f"{fp_two:.3f} beyond two, {fp_three:.3f} beyond three, {elapsed:.1f}s")


def test_criterion_12_determinism(tmp_path):
    args = ["simulate", "--symbol", "height", "--k", "100", "--n-trials", "2000",
            "--center", "1,0", "--r", "0.5,1.0,1.5,2.0,2.5", "--seed", str(SEED)]
    outputs = []
    for tag, workers in (("a", 1), ("b", 2)):
        out = os.path.join(tmp_path, f"{tag}.csv")
        res = subprocess.run(
            [sys.executable, "-m", "btzeros.cli"] + args
            + ["--workers", str(workers), "--out", out],
            capture_output=True, text=True)
        assert res.returncode == 0, res.stderr
        with open(out, "rb") as fh:
            outputs.append(fh.read())
    ok = outputs[0] == outputs[1] and len(outputs[0]) > 0
    _report(12, "byte-identical CSV across parallelism", ok,
            f"{len(outputs[0])} bytes")
