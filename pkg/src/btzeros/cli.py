"""Command line interface: bt-zeros {simulate, reconstruct, constants, kernel-check, verify-toeplitz}."""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .constants import constants_report
from .errors import DomainError
from .experiments import (
    ExperimentConfig,
    load_config_json,
    plot_estimator,
    reconstruct_grid,
    simulate,
    write_grid_csv,
    write_simulate_csv,
)
from .geometry import ChartPoint, SpherePoint, stereo_forward
from .kernel import bergman_diag, expansion_fit, positivity_scan
from .symbols import operator_factory
from .toeplitz import (
    dump_matrix_csv,
    op_from_symbol_quadrature,
    op_height,
    op_identity,
    xy_discrepancy,
)
from .symbols import height_symbol, identity_symbol


def _parse_range(spec: str) -> list[float]:
    """'r0:r1:steps' inclusive linear grid, or a comma list, or a single value."""
    if ":" in spec:
        r0, r1, steps = spec.split(":")
        return [float(x) for x in np.linspace(float(r0), float(r1), int(steps))]
    return [float(x) for x in spec.split(",")]


def _parse_center_sphere(spec: str) -> ChartPoint:
    x1, x2, x3 = (float(v) for v in spec.split(","))
    return stereo_forward(SpherePoint(x1, x2, x3))


def _parse_center_chart(spec: str) -> ChartPoint:
    if spec.strip().lower() in ("inf", "infinity"):
        return ChartPoint.at_infinity()
    re, im = (float(v) for v in spec.split(","))
    return ChartPoint.of(complex(re, im))


def _merged(args: argparse.Namespace, key: str, default):
    """CLI value if given, else config-file value, else the default."""
    val = getattr(args, key.replace("-", "_"), None)
    if val is not None:
        return val
    cfg = getattr(args, "_config_data", {})
    return cfg.get(key, default)


def _attach_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with defaults; flags override")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", default=None)


def cmd_simulate(args: argparse.Namespace) -> int:
    symbol = _merged(args, "symbol", "height")
    k = int(_merged(args, "k", 100))
    n_trials = int(_merged(args, "n-trials", 1000))
    seed = int(_merged(args, "seed", 7))
    workers = int(_merged(args, "workers", 1))
    lam = _merged(args, "lambda", None)
    lam = float(lam) if lam is not None else None
    r_spec = _merged(args, "r", "1.0")
    r_values = _parse_range(r_spec) if isinstance(r_spec, str) else [float(v) for v in r_spec]
    centers = []
    for spec in args.center_sphere or []:
        centers.append(_parse_center_sphere(spec))
    for spec in args.center or []:
        centers.append(_parse_center_chart(spec))
    if not centers:
        for spec in getattr(args, "_config_data", {}).get("centers", []):
            centers.append(_parse_center_chart(spec))
    if not centers:
        raise DomainError("give at least one --center or --center-sphere")
    cfg = ExperimentConfig(symbol=symbol, k=k, n_trials=n_trials, centers=centers,
                           r_values=r_values, seed=seed, lam=lam, workers=workers)
    reports = simulate(cfg)
    out = _merged(args, "out", "results.csv")
    write_simulate_csv(reports, symbol, out)
    if args.plot:
        plot_estimator(reports, symbol, args.plot)
    for r in reports:
        c = "inf" if r.center.is_infinity else f"{r.center.z:.4g}"
        print(f"center={c} R={r.R:.4g} mean={r.sample_mean_E:.6g} "
              f"theory={r.theory:.6g} regime={r.regime} z={r.z_score:.3g}")
    return 0


def cmd_reconstruct(args: argparse.Namespace) -> int:
    symbol = _merged(args, "symbol", "xy")
    lam = _merged(args, "lambda", 1.0 / 3.0)
    lam = float(lam) if lam is not None else None
    k = int(_merged(args, "k", 100))
    n_trials = int(_merged(args, "n-trials", 1000))
    grid = int(_merged(args, "grid", 40))
    square = float(_merged(args, "square", 2.0))
    r_value = float(_merged(args, "r", 1.0 / math.sqrt(2.0)))
    seed = int(_merged(args, "seed", 7))
    workers = int(_merged(args, "workers", 1))
    report = reconstruct_grid(symbol=symbol, lam=lam, k=k, n_trials=n_trials,
                              grid_size=grid, square=square, R=r_value, seed=seed,
                              workers=workers)
    out = _merged(args, "out", "grid.csv")
    write_grid_csv(report, out)
    n_on = int(report.on_zero_mask.sum())
    print(f"grid {grid}x{grid}: {n_on} cells classified on-zero "
          f"(threshold {report.threshold:.4g}); wrote {out}")
    return 0


def cmd_constants(args: argparse.Namespace) -> int:
    n = int(_merged(args, "n", 1))
    if args.grid:
        rs = _parse_range(args.grid)
    else:
        rs = [float(_merged(args, "r", 1.0))]
    lines = ["n,R,closed_form,quadrature,hypergeom,discrepancy"]
    for r in rs:
        c = constants_report(n, r)
        lines.append(f"{c.n},{c.R!r},{c.closed_form!r},{c.quadrature!r},"
                     f"{c.hypergeom!r},{c.max_discrepancy!r}")
    text = "\n".join(lines) + "\n"
    out = _merged(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_kernel_check(args: argparse.Namespace) -> int:
    symbol = _merged(args, "symbol", "height")
    lam = _merged(args, "lambda", 1.0 / 3.0)
    lam = float(lam) if lam is not None else None
    k_list = [int(v) for v in str(_merged(args, "k-list", "100,200,400,800")).split(",")]
    grid_n = int(_merged(args, "grid", 0))
    factory = operator_factory(symbol, lam)
    lines = ["point_re,point_im,b0_est,b1_est,residual"]
    pts = [ChartPoint.of(1.0), ChartPoint.of(0.0), ChartPoint.of(1j)]
    for p in pts:
        fit = expansion_fit(factory, p, k_list)
        lines.append(f"{p.z.real!r},{p.z.imag!r},{fit.b0_est!r},{fit.b1_est!r},{fit.residual!r}")
    text = "\n".join(lines) + "\n"
    out = _merged(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if grid_n:
        rng = np.random.default_rng(0)
        grid = [ChartPoint.of(complex(a, b))
                for a, b in rng.uniform(-3, 3, size=(grid_n, 2))]
        k = k_list[-1]
        m = positivity_scan(factory(k), grid)
        print(f"positivity scan at k={k} over {grid_n} points: min diagonal = {m:.6g}")
    return 0


def cmd_verify_toeplitz(args: argparse.Namespace) -> int:
    k = int(_merged(args, "k", 50))
    quad_height = op_from_symbol_quadrature(k, height_symbol())
    gap_height = float(np.max(np.abs(quad_height.entries - op_height(k).entries)))
    quad_id = op_from_symbol_quadrature(k, identity_symbol())
    gap_id = float(np.max(np.abs(quad_id.entries - op_identity(k).entries)))
    lam = float(_merged(args, "lambda", 1.0 / 3.0))
    gap_xy = xy_discrepancy(k, lam)
    print(f"k={k}: |quadrature(height) - diag((2l-k)/(k+2))|_max = {gap_height:.3e}")
    print(f"k={k}: |quadrature(1) - Id|_max = {gap_id:.3e}")
    print(f"k={k}, lambda={lam:g}: |pentadiagonal - (T(x1)T(x2) - lambda Id)|_max = {gap_xy:.3e}")
    if args.dump_matrix:
        dump_matrix_csv(quad_height, args.dump_matrix)
        print(f"wrote quadrature height matrix to {args.dump_matrix}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bt-zeros",
                                     description="Zeros of random sections twisted by "
                                                 "Berezin-Toeplitz operators on the sphere")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="Monte Carlo estimator at chosen centers and radii")
    p.add_argument("--symbol", choices=["height", "xy", "identity"], default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--n-trials", type=int, default=None)
    p.add_argument("--center-sphere", action="append", metavar="x1,x2,x3")
    p.add_argument("--center", action="append", metavar="re,im")
    p.add_argument("--r", default=None, metavar="r0:r1:steps|list")
    p.add_argument("--lambda", dest="lambda_", type=float, default=None)
    p.add_argument("--plot", default=None, metavar="FILE.svg")
    _attach_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reconstruct", help="estimator values on a chart grid (level-set recovery)")
    p.add_argument("--symbol", choices=["height", "xy", "identity"], default=None)
    p.add_argument("--lambda", dest="lambda_", type=float, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--n-trials", type=int, default=None)
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--square", type=float, default=None)
    p.add_argument("--r", type=float, default=None)
    _attach_common(p)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("constants", help="C_n(R) by closed form, quadrature and hypergeometric route")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--r", type=float, default=None)
    p.add_argument("--grid", default=None, metavar="r0:r1:steps")
    _attach_common(p)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("kernel-check", help="two-term kernel expansion fits and positivity scan")
    p.add_argument("--symbol", choices=["height", "xy", "identity"], default=None)
    p.add_argument("--lambda", dest="lambda_", type=float, default=None)
    p.add_argument("--k-list", default=None, metavar="k1,k2,...")
    p.add_argument("--grid", type=int, default=None)
    _attach_common(p)
    p.set_defaults(func=cmd_kernel_check)

    p = sub.add_parser("verify-toeplitz", help="quadrature oracle vs closed-form matrices")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--lambda", dest="lambda_", type=float, default=None)
    p.add_argument("--dump-matrix", default=None, metavar="FILE.csv")
    _attach_common(p)
    p.set_defaults(func=cmd_verify_toeplitz)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args._config_data = load_config_json(args.config) if getattr(args, "config", None) else {}
    # expose --lambda under the merge key
    if hasattr(args, "lambda_"):
        setattr(args, "lambda", args.lambda_)
    try:
        return args.func(args)
    except (DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
