"""Monte Carlo estimator for Planck-ball zero counts, theory curves, grids.

The estimator of interest is

    E(x, R, k, N) = (1/N) sum_m #(zeros of T_k s^(m) in B(x, R/sqrt(k)))
                    - k Vol(B(x, R/sqrt(k))) / (2 pi)

computed over N independent Gaussian sections drawn from per-trial RNG
streams, so the whole pipeline is a pure function of the configuration.
Trials are shared across centers and radii: calling the estimator for several
(x, R) pairs with the same seed uses the very same sections, which is exactly
what per-trial streams prescribe.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .constants import c_n_closed
from .errors import DomainError, NumericError
from .geometry import ChartPoint, Symbol, ball_volume, log_f2_laplacian_density
from .sections import RngSpec, SectionVector, sample_random_section
from .symbols import make_symbol, operator_factory
from .zeros import ZeroSet, polynomial_roots

__all__ = [
    "ExperimentConfig",
    "EstimatorReport",
    "GridReport",
    "theory_value",
    "run_zero_counts",
    "simulate",
    "estimator_E",
    "reconstruct_grid",
    "write_simulate_csv",
    "write_grid_csv",
]

# A trial whose root residuals fail is retried once on this shifted stream.
_RETRY_STREAM_OFFSET = 1 << 48
# |f(x)| < 10/sqrt(k) classifies the center as on the zero set (Planck scale).
# The threshold is capped below the height symbol's extremal value so that
# desk-scale degrees (k <= 100, where 10/sqrt(k) >= 1) still classify the
# poles as off-zero.
_ON_ZERO_FACTOR = 10.0
_ON_ZERO_CAP = 0.99


@dataclass
class ExperimentConfig:
    symbol: str
    k: int
    n_trials: int
    centers: list[ChartPoint]
    r_values: list[float]
    seed: int
    lam: Optional[float] = None
    workers: int = 1
    out: Optional[str] = None

    def __post_init__(self) -> None:
        if self.n_trials < 1:
            raise DomainError("need at least one trial")
        rk = math.sqrt(self.k)
        for r in self.r_values:
            if not 0.0 <= r / rk < math.pi / 2.0:
                raise DomainError(f"R={r} gives ball radius {r / rk} outside [0, pi/2)")


@dataclass
class EstimatorReport:
    center: ChartPoint
    R: float
    k: int
    N: int
    sample_mean_E: float
    sample_std: float
    theory: float
    regime: str
    z_score: float


@dataclass
class GridReport:
    grid_size: int
    square: float
    R: float
    k: int
    N: int
    threshold: float
    xs: np.ndarray
    ys: np.ndarray
    mean_E: np.ndarray  # shape (grid_size, grid_size), row = Im, col = Re
    on_zero_mask: np.ndarray


def theory_value(f: Symbol, center: ChartPoint, R: float, k: int) -> tuple[float, str]:
    """Predicted estimator value and regime at a center.

    On the zero set (|f| below the Planck threshold): C_1(R)/(2 pi).  Off it:
    R^2 L1(x) / (2 k) with L1 the density of i ddbar log f^2.
    """
    if abs(f(center)) < min(_ON_ZERO_FACTOR / math.sqrt(k), _ON_ZERO_CAP):
        return c_n_closed(1, R) / (2.0 * math.pi), "on_zero"
    return R * R * log_f2_laplacian_density(f, center) / (2.0 * k), "off_zero"


def _counts_for_trial(zs: ZeroSet, centers: Sequence[Optional[complex]],
                      rhos: np.ndarray) -> np.ndarray:
    """Zero counts per (center, rho); centers given as complex or None (infinity)."""
    finite_idx = [i for i, c in enumerate(centers) if c is not None]
    out = np.zeros((len(centers), len(rhos)), dtype=np.int64)
    cutoff = rhos[None, :] + 1e-12
    if finite_idx and len(zs.roots):
        cs = np.array([centers[i] for i in finite_idx], dtype=complex)
        num = np.abs(zs.roots[:, None] - cs[None, :])
        den = np.abs(1.0 + np.conj(cs)[None, :] * zs.roots[:, None])
        d = np.arctan2(num, den)  # (n_roots, n_centers)
        inside = d[:, :, None] < cutoff[None, :, :]
        counts = np.einsum("r,rcj->cj", zs.multiplicities.astype(np.int64), inside)
        out[finite_idx, :] += counts
    if zs.roots_at_infinity:
        for i, c in enumerate(centers):
            d_inf = 0.0 if c is None else math.atan2(1.0, abs(c))
            out[i, :] += np.where(d_inf < rhos + 1e-12, zs.roots_at_infinity, 0)
    for i, c in enumerate(centers):
        if c is None and len(zs.roots):
            a = np.abs(zs.roots)
            d = np.arctan2(1.0, a)
            inside = d[:, None] < rhos[None, :] + 1e-12
            out[i, :] += zs.multiplicities.astype(np.int64) @ inside
    return out


def _trial_zero_set(op_entries: np.ndarray, k: int, seed: int, stream: int) -> ZeroSet:
    s = sample_random_section(k, RngSpec(seed, stream))
    return polynomial_roots(SectionVector(k, op_entries @ s.coeffs))


def _run_chunk(args) -> np.ndarray:
    symbol, lam, k, seed, trial_indices, centers, rhos = args
    factory = operator_factory(symbol, lam)
    entries = factory(k).entries
    rhos = np.asarray(rhos, dtype=float)
    out = np.zeros((len(trial_indices), len(centers), len(rhos)), dtype=np.int64)
    for i, m in enumerate(trial_indices):
        try:
            zs = _trial_zero_set(entries, k, seed, m)
        except NumericError:
            zs = _trial_zero_set(entries, k, seed, m + _RETRY_STREAM_OFFSET)
        if zs.total_count() != k:
            raise NumericError(f"trial {m}: total zero count {zs.total_count()} != {k}")
        out[i] = _counts_for_trial(zs, centers, rhos)
    return out


def run_zero_counts(cfg: ExperimentConfig) -> np.ndarray:
    """Counts array of shape (N, n_centers, n_R); deterministic in (seed, trial)."""
    centers = [None if c.is_infinity else c.z for c in cfg.centers]
    rhos = [r / math.sqrt(cfg.k) for r in cfg.r_values]
    indices = list(range(cfg.n_trials))
    workers = max(1, cfg.workers)
    if workers == 1:
        return _run_chunk((cfg.symbol, cfg.lam, cfg.k, cfg.seed, indices, centers, rhos))
    n_chunks = min(workers * 4, cfg.n_trials)
    chunks = [indices[i::n_chunks] for i in range(n_chunks)]
    args = [(cfg.symbol, cfg.lam, cfg.k, cfg.seed, ch, centers, rhos) for ch in chunks if ch]
    out = np.zeros((cfg.n_trials, len(centers), len(rhos)), dtype=np.int64)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for ch, res in zip([c for c in chunks if c], pool.map(_run_chunk, args)):
            out[ch] = res
    return out


def _reports_from_counts(cfg: ExperimentConfig, counts: np.ndarray,
                         f: Symbol) -> list[EstimatorReport]:
    reports = []
    for i, center in enumerate(cfg.centers):
        for j, r in enumerate(cfg.r_values):
            rho = r / math.sqrt(cfg.k)
            baseline = cfg.k * ball_volume(rho) / (2.0 * math.pi)
            sample = counts[:, i, j].astype(float) - baseline
            mean = float(sample.mean())
            std = float(sample.std(ddof=1)) if cfg.n_trials > 1 else 0.0
            theory, regime = theory_value(f, center, r, cfg.k)
            se = std / math.sqrt(cfg.n_trials) if std > 0 else 0.0
            z = (mean - theory) / se if se > 0 else math.inf if mean != theory else 0.0
            reports.append(EstimatorReport(center=center, R=r, k=cfg.k, N=cfg.n_trials,
                                           sample_mean_E=mean, sample_std=std,
                                           theory=theory, regime=regime, z_score=z))
    return reports


def simulate(cfg: ExperimentConfig) -> list[EstimatorReport]:
    """Full estimator run over every (center, R) pair of the configuration."""
    counts = run_zero_counts(cfg)
    f = make_symbol(cfg.symbol, cfg.lam)
    return _reports_from_counts(cfg, counts, f)


def estimator_E(cfg: ExperimentConfig, center: ChartPoint, R: float) -> EstimatorReport:
    """Single-(x, R) estimator; same trials as any other call with this seed."""
    sub = ExperimentConfig(symbol=cfg.symbol, k=cfg.k, n_trials=cfg.n_trials,
                           centers=[center], r_values=[R], seed=cfg.seed,
                           lam=cfg.lam, workers=cfg.workers)
    return simulate(sub)[0]


def reconstruct_grid(symbol: str, lam: Optional[float], k: int, n_trials: int,
                     grid_size: int, square: float, R: float, seed: int,
                     workers: int = 1) -> GridReport:
    """Estimator values on a grid of chart points, with the on-zero mask.

    The classification threshold is half the on-zero theory value,
    tau = C_1(R)/(4 pi), the midpoint between the two regimes' leading orders.
    """
    step = 2.0 * square / grid_size
    coords = -square + step * (np.arange(grid_size) + 0.5)
    centers = [ChartPoint.of(complex(x, y)) for y in coords for x in coords]
    cfg = ExperimentConfig(symbol=symbol, k=k, n_trials=n_trials, centers=centers,
                           r_values=[R], seed=seed, lam=lam, workers=workers)
    counts = run_zero_counts(cfg)
    rho = R / math.sqrt(k)
    baseline = k * ball_volume(rho) / (2.0 * math.pi)
    means = counts[:, :, 0].mean(axis=0) - baseline
    mean_grid = means.reshape(grid_size, grid_size)
    tau = 0.5 * c_n_closed(1, R) / (2.0 * math.pi)
    return GridReport(grid_size=grid_size, square=square, R=R, k=k, N=n_trials,
                      threshold=tau, xs=coords, ys=coords, mean_E=mean_grid,
                      on_zero_mask=mean_grid > tau)


def _fmt(x: float) -> str:
    return repr(float(x))


def write_simulate_csv(reports: Sequence[EstimatorReport], symbol: str, path: str) -> None:
    """CSV schema: symbol,k,N,center_re,center_im,R,sample_mean,sample_std,theory,regime,z_score."""
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("symbol,k,N,center_re,center_im,R,sample_mean,sample_std,theory,regime,z_score\n")
            for r in reports:
                if r.center.is_infinity:
                    cre, cim = "inf", "0.0"
                else:
                    cre, cim = _fmt(r.center.z.real), _fmt(r.center.z.imag)
                fh.write(",".join([
                    symbol, str(r.k), str(r.N), cre, cim, _fmt(r.R),
                    _fmt(r.sample_mean_E), _fmt(r.sample_std), _fmt(r.theory),
                    r.regime, _fmt(r.z_score),
                ]) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write estimator CSV to {path!r}: {exc}") from exc


def write_grid_csv(report: GridReport, path: str) -> None:
    """Matrix CSV of mean estimator values, one grid row per line."""
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"# grid={report.grid_size} square={_fmt(report.square)} "
                     f"R={_fmt(report.R)} k={report.k} N={report.N} "
                     f"threshold={_fmt(report.threshold)}\n")
            for row in report.mean_E:
                fh.write(",".join(_fmt(v) for v in row) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write grid CSV to {path!r}: {exc}") from exc


def plot_estimator(reports: Sequence[EstimatorReport], symbol_name: str, path: str) -> None:
    """Optional vector plot of the estimator against R with the theory curve."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rs = [r.R for r in reports]
    means = [r.sample_mean_E for r in reports]
    ses = [r.sample_std / math.sqrt(r.N) for r in reports]
    theory = [r.theory for r in reports]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.errorbar(rs, means, yerr=ses, fmt="D", color="tab:blue", label="sample mean")
    order = np.argsort(rs)
    ax.plot(np.array(rs)[order], np.array(theory)[order], "-", color="tab:red", label="theory")
    ax.set_xlabel("R")
    ax.set_ylabel("estimator")
    ax.set_title(f"{symbol_name}, k={reports[0].k}, N={reports[0].N}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def load_config_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise OSError(f"cannot read config {path!r}: {exc}") from exc
