"""
Command-line front end: every figure as a CSV table plus a gnuplot script.

Exit status: 0 success, 1 computation failure, 2 usage error.
"""

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import acceptance
from .average import (
    ORIGINAL,
    VARIANTS,
    AverageConfig,
    SampledMode,
    run_average,
    swapped,
    theta_halving,
    tolerance_scan,
)
from .config import (
    DEFAULT_LAMBDA_POINTS,
    DEFAULT_SEED,
    REFERENCE_THETA,
    REFERENCE_VALUES,
    RESULTS_DIR,
)
from .csvtable import CsvTable, write_plot_script
from .distributed import ChannelConfig, StarNetwork
from .entanglement import NEGATIVITY_MODES, negativity_scan, white_noise_contrast
from .errors import DomainError, QResilienceError, UsageError
from .grover import grover_scan_rows, normalized_probability_table, period_invariance_scan
from .noise import StaticNoiseSpec

logger = logging.getLogger(__name__)


# Parameter parsing

def parse_values(text):
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise UsageError(f"cannot parse values {text!r}")
    if not values:
        raise UsageError("empty value list")
    return values


def parse_grid(text, lower=0.0, upper=1.0, name="grid"):
    """'start:stop:points' or a comma-separated list."""
    try:
        if ":" in text:
            start, stop, points = text.split(":")
            points = int(points)
            if points < 1:
                raise UsageError(f"{name} needs at least one point")
            grid = np.linspace(float(start), float(stop), points)
        else:
            grid = np.array([float(v) for v in text.split(",") if v.strip()])
    except ValueError:
        raise UsageError(f"cannot parse {name} {text!r}")
    if grid.size == 0:
        raise UsageError(f"empty {name}")
    if np.any(grid < lower) or np.any(grid > upper):
        raise UsageError(f"{name} must lie in [{lower}, {upper}]")
    return grid


def parse_range(text):
    """'3-8' or '3,5,7'."""
    try:
        if "-" in text:
            lo, hi = (int(v) for v in text.split("-"))
            return list(range(lo, hi + 1))
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse range {text!r}")


def _metadata(command, seed=None, **parameters):
    # exact-mode commands draw no randomness
    metadata = {"command": command, "seed": "none" if seed is None else seed}
    for key, value in parameters.items():
        if value is None:
            continue
        if isinstance(value, np.ndarray):
            value = ",".join(f"{v:.12g}" for v in value)
        elif isinstance(value, (list, tuple)):
            value = ",".join(str(v) for v in value)
        metadata[key] = value
    return metadata


# Commands

def cmd_grover_scan(n, searched, lambda_grid, max_iter=None):
    """Returns (surface table, normalized-probability table, period table)."""
    if n < 1:
        raise UsageError("n must be >= 1")
    if not 0 <= searched < 2 ** n:
        raise UsageError(f"searched index must lie in [0, {2 ** n})")
    meta = _metadata("grover-scan", n=n, searched=searched, lambda_grid=lambda_grid, max_iter=max_iter)
    surface = CsvTable(["lambda", "m", "P"], grover_scan_rows(n, searched, lambda_grid, max_iter), meta)
    norm = CsvTable(
        ["lambda", "P_norm", "lambda_pow_n"], normalized_probability_table(n, lambda_grid, searched), meta
    )
    positive = [lam for lam in lambda_grid if lam > 0]
    period = CsvTable(["lambda", "argmax_m"], period_invariance_scan(n, searched, positive), meta)
    return surface, norm, period


def cmd_average_run(values, theta, variant, lambda_grid, mode=None, swap=False):
    """Returns the (lambda, F, ratio, D, p_zero) table, plus the swapped companion if asked."""
    if variant not in VARIANTS:
        raise UsageError(f"variant must be one of {VARIANTS}")

    def table_for(vals):
        rows = []
        for lam in lambda_grid:
            noise = StaticNoiseSpec.symmetric(float(lam), len(vals))
            report = run_average(AverageConfig(vals, theta, variant, noise, mode))
            rows.append((float(lam), report.fidelity, report.ratio_estimate,
                         report.distance_ratio, report.p_zero))
        seed = mode.seed if mode else None
        meta = _metadata("average-run", seed, values=vals, theta=theta, variant=variant,
                         mode="sampled" if mode else "exact", alpha=mode.alpha if mode else None)
        return CsvTable(["lambda", "F", "ratio", "D", "p_zero"], rows, meta)

    main = table_for(tuple(values))
    companion = table_for(swapped(values)) if swap else None
    return main, companion


def cmd_tolerance_scan(n_range, tau_grid):
    rows = []
    curves = tolerance_scan(n_range, tau_grid)
    for curve in curves:
        for tau, distance, argument in zip(curve.taus, curve.max_distance, curve.arguments):
            rows.append((curve.n, float(tau), float(distance), float(argument)))
    meta = _metadata("tolerance-scan", n_range=n_range, tau_grid=tau_grid)
    for curve in curves:
        meta[f"threshold_N{curve.n}"] = "none" if curve.threshold is None else f"{curve.threshold:.12g}"
    return CsvTable(["N", "tau", "max_abs_D", "worst_argument"], rows, meta), curves


def cmd_negativity_scan(mode, tau_grid, n=2):
    if mode not in NEGATIVITY_MODES:
        raise UsageError(f"mode must be one of {NEGATIVITY_MODES}")
    meta = _metadata("negativity-scan", mode=mode, n=n, tau_grid=tau_grid)
    return CsvTable(["tau", "bipartition", "negativity"], negativity_scan(n, tau_grid, mode), meta)


def cmd_white_noise(values, theta, tau_grid):
    meta = _metadata("white-noise", values=values, theta=theta, tau_grid=tau_grid)
    rows = white_noise_contrast(values, theta, tau_grid)
    return CsvTable(["tau_tilde", "D_white", "decomposable", "D_static"], rows, meta)


def cmd_theta_halving(values, mode=None, noise=None):
    result = theta_halving(values, mode=mode, noise=noise)
    meta = _metadata("theta-halving", mode.seed if mode else None, values=values)
    row = (result.theta, result.applications, result.estimate, result.converged)
    return CsvTable(["theta", "applications", "estimate", "converged"], [row], meta)


def cmd_distributed(values, theta, lam, alpha, seed, drop_probability=0.0):
    noise = StaticNoiseSpec.symmetric(lam, len(values))
    channel = ChannelConfig(drop_probability, seed + 1)
    network = StarNetwork(values, theta, noise, seed, channel)
    report = network.run_experiment(alpha)
    meta = _metadata("distributed", seed, values=values, theta=theta, lam=lam, alpha=alpha,
                     drop_probability=drop_probability)
    row = (report.p_zero, report.ratio_estimate, report.distance_ratio,
           report.byproduct_parity_histogram[0], report.byproduct_parity_histogram[1],
           network.bits_transmitted)
    header = ["p_zero", "ratio", "D", "even_parity", "odd_parity", "bits_transmitted"]
    return CsvTable(header, [row], meta)


def cmd_acceptance():
    return acceptance.main()


# argparse plumbing

def _mode(args):
    if args.mode == "sampled":
        if args.alpha < 1:
            raise UsageError("--alpha must be >= 1")
        return SampledMode(args.alpha, args.seed)
    return None


def _out(args, default):
    return Path(args.out) if args.out else RESULTS_DIR / default


def _banner(title):
    print("=" * 60)
    print(title)
    print("=" * 60)


def _handle_grover(args):
    grid = parse_grid(args.lambda_grid, name="lambda grid")
    surface, norm, period = cmd_grover_scan(args.n, args.searched, grid, args.max_iter)
    out = _out(args, f"grover_n{args.n}.csv")
    surface.write(out)
    norm.write(out.with_name(out.stem + "_norm.csv"))
    period.write(out.with_name(out.stem + "_period.csv"))
    write_plot_script(out.with_suffix(".gp"), out.name, f"Grover search, n={args.n}",
                      "iterations m", "P", [(2, 3, "P(m)")])
    write_plot_script(out.with_name(out.stem + "_norm.gp"), out.stem + "_norm.csv",
                      f"normalized probability, n={args.n}", "lambda", "P_norm",
                      [(1, 2, "P_norm"), (1, 3, "lambda^n")])
    _banner(f"Grover scan n={args.n}")
    print(f"[+] {len(surface.rows)} rows -> {out}")
    return 0


def _handle_average(args):
    values = parse_values(args.values)
    grid = parse_grid(args.lambda_grid if args.lam is None else str(args.lam), name="lambda grid")
    main, companion = cmd_average_run(values, args.theta, args.variant, grid, _mode(args), args.swap)
    out = _out(args, f"average_{args.variant}.csv")
    main.write(out)
    series = [(1, 2, "F"), (1, 4, "D")]
    write_plot_script(out.with_suffix(".gp"), out.name, f"average algorithm ({args.variant})",
                      "lambda", "F, D", series)
    _banner(f"Average algorithm, {args.variant} variant")
    for row in main.rows[:: max(1, len(main.rows) // 10)]:
        print(f"  lambda={row[0]:.3f}  F={row[1]:.4f}  ratio={row[2]:.4f}  D={row[3]:+.4f}")
    if companion is not None:
        swapped_out = out.with_name(out.stem + "_swapped.csv")
        companion.write(swapped_out)
        write_plot_script(swapped_out.with_suffix(".gp"), swapped_out.name,
                          f"average algorithm ({args.variant}), nu1<->nu2", "lambda", "D", [(1, 4, "D")])
        print(f"[+] swapped companion -> {swapped_out}")
    print(f"[+] {out}")
    return 0


def _handle_tolerance(args):
    table, curves = cmd_tolerance_scan(parse_range(args.n_range),
                                       parse_grid(args.tau_grid, name="tau grid"))
    out = _out(args, "tolerance.csv")
    table.write(out)
    series = [(2, 3, f"N={c.n}", f"$1=={c.n}") for c in curves]
    write_plot_script(out.with_suffix(".gp"), out.name, "maximum |D| against purity",
                      "tau", "max |D|", series)
    _banner("Resilience threshold")
    for curve in curves:
        marker = "[+]" if curve.monotone else "[!]"
        threshold = "none" if curve.threshold is None else f"{curve.threshold:.4f}"
        print(f"{marker} N={curve.n}: tau* = {threshold}")
    return 0


def _handle_negativity(args):
    table = cmd_negativity_scan(args.mode, parse_grid(args.tau_grid, name="tau grid"), args.n)
    out = _out(args, f"negativity_{args.mode}.csv")
    table.write(out)
    _banner(f"Negativity scan ({args.mode})")
    print(f"[+] max negativity {max(r[2] for r in table.rows):.6g} -> {out}")
    return 0


def _handle_white(args):
    table = cmd_white_noise(parse_values(args.values), args.theta,
                            parse_grid(args.tau_grid, name="tau grid"))
    out = _out(args, "white_noise.csv")
    table.write(out)
    _banner("White noise contrast")
    for tau, d_white, decomposable, d_static in table.rows:
        print(f"  tau={tau:.3f}  D_white={d_white:+.4f}  D_static={d_static:+.4f}  "
              f"ensemble={'yes' if decomposable else 'no'}")
    return 0


def _handle_halving(args):
    table = cmd_theta_halving(parse_values(args.values), _mode(args))
    out = _out(args, "theta_halving.csv")
    table.write(out)
    theta, applications, estimate, converged = table.rows[0]
    _banner("Theta halving")
    if converged:
        print(f"[+] theta={theta:g} after {applications} applications, |mu| ~ {estimate:.6g}")
    else:
        print(f"[!] no O(1) ratio after {applications} applications; average is zero")
    return 0


def _handle_distributed(args):
    values = parse_values(args.values)
    table = cmd_distributed(values, args.theta, args.lam, args.alpha, args.seed, args.drop_probability)
    out = _out(args, "distributed.csv")
    table.write(out)
    p_zero, ratio, distance, even, odd, bits = table.rows[0]
    _banner("Distributed run")
    print(f"[+] {args.alpha} rounds, {bits} classical bits, ratio={ratio:.4f}, D={distance:+.4f}")
    return 0


def _handle_acceptance(args):
    return cmd_acceptance()


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qresilience",
        description="Noise resilience of Grover search and the quantum average algorithm",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python3 -m qresilience grover-scan --n 3 --lambda-grid 0:1:101
  python3 -m qresilience average-run --variant original --swap
  python3 -m qresilience tolerance-scan --n-range 3-8 --tau-grid 0:1:51
  python3 -m qresilience negativity-scan --mode nontraced
  python3 -m qresilience acceptance
        """,
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    sub = parser.add_subparsers(dest="command", required=True)
    default_grid = f"0:1:{DEFAULT_LAMBDA_POINTS}"
    reference_values = ",".join(str(v) for v in REFERENCE_VALUES)

    def common(p):
        p.add_argument("--out", help="Output CSV (default: results/<name>.csv)")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Random seed")
        return p

    p = common(sub.add_parser("grover-scan", help="P(m) surface and P_norm table"))
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--searched", type=int, default=0)
    p.add_argument("--lambda-grid", default=default_grid)
    p.add_argument("--max-iter", type=int, default=None)
    p.set_defaults(handler=_handle_grover)

    p = common(sub.add_parser("average-run", help="F, ratio and D against lambda"))
    p.add_argument("--values", default=reference_values)
    p.add_argument("--theta", type=float, default=REFERENCE_THETA)
    p.add_argument("--variant", choices=VARIANTS, default=ORIGINAL)
    p.add_argument("--lambda", dest="lam", type=float, default=None, help="Single lambda")
    p.add_argument("--lambda-grid", default=default_grid)
    p.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    p.add_argument("--alpha", type=int, default=10000)
    p.add_argument("--swap", action="store_true", help="Also emit the nu1<->nu2 table")
    p.set_defaults(handler=_handle_average)

    p = common(sub.add_parser("tolerance-scan", help="max |D| against tau per N"))
    p.add_argument("--n-range", default="3-8")
    p.add_argument("--tau-grid", default="0:1:51")
    p.set_defaults(handler=_handle_tolerance)

    p = common(sub.add_parser("negativity-scan", help="PPT negativities of the resource"))
    p.add_argument("--mode", choices=NEGATIVITY_MODES, default="nontraced")
    p.add_argument("--n", type=int, default=2, help="Register qubits besides the ruler")
    p.add_argument("--tau-grid", default="0:1:21")
    p.set_defaults(handler=_handle_negativity)

    p = common(sub.add_parser("white-noise", help="White against static noise"))
    p.add_argument("--values", default=reference_values)
    p.add_argument("--theta", type=float, default=REFERENCE_THETA)
    p.add_argument("--tau-grid", default="0:1:21")
    p.set_defaults(handler=_handle_white)

    p = common(sub.add_parser("theta-halving", help="Order-of-magnitude search for mu"))
    p.add_argument("--values", required=True)
    p.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    p.add_argument("--alpha", type=int, default=10000)
    p.set_defaults(handler=_handle_halving)

    p = common(sub.add_parser("distributed", help="Star-graph run with one-bit messages"))
    p.add_argument("--values", default=reference_values)
    p.add_argument("--theta", type=float, default=REFERENCE_THETA)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--alpha", type=int, default=10000)
    p.add_argument("--drop-probability", type=float, default=0.0)
    p.set_defaults(handler=_handle_distributed)

    p = sub.add_parser("acceptance", help="Run the acceptance suite")
    p.set_defaults(handler=_handle_acceptance)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    logger.debug("command %s, arguments %s", args.command, vars(args))
    try:
        return args.handler(args)
    except (UsageError, DomainError) as e:
        print(f"[-] usage error: {e}", file=sys.stderr)
        return 2
    except QResilienceError as e:
        print(f"[-] {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
