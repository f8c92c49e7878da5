"""Command-line front end.

    papr-pts simulate --config FILE [--preset NAME] [--K ... --out ...]
    papr-pts solve    --K 32 --P 6 --L 2 --J 4 --seed 7 [--objective papr|upper]
    papr-pts ccdf-merge out.csv in1.csv in2.csv [--counts 2000,2000]

Exit codes: 0 success, 2 configuration error, 3 numeric failure.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import experiment
from .experiment import (ConfigError, ExperimentConfig, PRESETS, config_from_strings,
                         emit_csv, load_config_file, load_csv, merge_tables,
                         run_experiment, summarize)
from .ofdm import ensemble_average_power, generate_symbols, qam16
from .pts import make_partition, papr_of_rotation, peak_matrices, symbol_matrix
from .randomization import derive_seed
from .relaxation import build_relaxation, rank1_approximation
from .solver import SolverConfig, solve_minmax, solve_quartic
from .upper_bound import quartic_spec

_OVERRIDE_FLAGS = ("K", "P", "L", "J", "trials", "seed", "methods", "out",
                   "n-candidates", "partition", "brute-force-trials",
                   "solver-max-iters")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="papr-pts",
        description="PTS-based OFDM PAPR reduction via semidefinite relaxation "
                    "and Gaussian randomization",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a Monte-Carlo CCDF experiment")
    sim.add_argument("--config", help="flat key = value config file")
    sim.add_argument("--preset", choices=sorted(PRESETS),
                     help="start from a named preset instead of the defaults")
    for flag in _OVERRIDE_FLAGS:
        sim.add_argument(f"--{flag}")
    sim.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                     help="generic config override, repeatable")

    solve = sub.add_parser("solve", help="solve one relaxed instance and report")
    solve.add_argument("--K", type=int, default=32)
    solve.add_argument("--P", type=int, default=6)
    solve.add_argument("--L", type=int, default=2)
    solve.add_argument("--J", type=int, default=4)
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--objective", choices=("papr", "upper"), default="papr")
    solve.add_argument("--max-iters", type=int, default=None)

    merge = sub.add_parser("ccdf-merge", help="pool CCDF tables column-wise")
    merge.add_argument("out", help="output CSV path")
    merge.add_argument("inputs", nargs="+", help="input CSV paths")
    merge.add_argument("--counts", help="comma-separated trial counts, one per input")
    return parser


def _simulate(args) -> int:
    base = PRESETS[args.preset] if args.preset else ExperimentConfig()
    overrides = {}
    if args.config:
        overrides.update(load_config_file(args.config))
    for flag in _OVERRIDE_FLAGS:
        value = getattr(args, flag.replace("-", "_"))
        if value is not None:
            overrides[flag] = value
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value.strip()
    config = config_from_strings(overrides, base)

    table = run_experiment(config)
    for level in (0.1, 0.01):
        marks = summarize(table, level)
        pretty = "  ".join(f"{k}={v:.2f}" for k, v in marks.items() if v == v)
        print(f"PAPR[dB] at CCDF {level:g}: {pretty}")
    if config.out:
        emit_csv(table, config.out)
        print(f"wrote {config.out}")
    return 0


def _solve(args) -> int:
    constellation = qam16()
    p_av = ensemble_average_power(constellation, args.K)
    symbols = generate_symbols(args.K, constellation, derive_seed(args.seed, 0, 0))
    partition = make_partition(args.K, args.P, "adjacent")
    matrix = symbol_matrix(symbols, partition)
    cfg = SolverConfig(seed=args.seed) if args.max_iters is None \
        else SolverConfig(seed=args.seed, max_iters=args.max_iters)

    if args.objective == "papr":
        problem = build_relaxation(peak_matrices(matrix, args.J), args.L)
        solution, report = solve_minmax(problem, cfg)
        rot = rank1_approximation(solution, args.L)
        papr = papr_of_rotation(matrix, rot, args.J, p_av)
        print(f"lambda* = {solution.lambda_star:.6g} "
              f"(PMEPR bound {solution.lambda_star / p_av:.6g} linear)")
        print(f"rank-1 rounded PMEPR = {papr.linear:.6g} ({papr.db:.3f} dB)")
    else:
        point, report = solve_quartic(quartic_spec(matrix), cfg,
                                      experiment._quartic_kind(args.L))
        print(f"quartic objective = {report.final_objective:.6g}")
        print(f"leading eigenvalues = "
              f"{np.round(np.linalg.eigvalsh(point.matrix)[::-1][:4], 4)}")
    print(f"iterations = {report.iterations}, converged = {report.converged}, "
          f"residuals psd/diag = {report.psd_violation:.2e}/{report.diag_violation:.2e}")
    return 0


def _merge(args) -> int:
    tables = [load_csv(p) for p in args.inputs]
    weights = None
    if args.counts:
        weights = [float(c) for c in args.counts.split(",")]
        if len(weights) != len(tables):
            raise ConfigError("--counts must list one value per input file")
    merged = merge_tables(tables, weights)
    emit_csv(merged, args.out)
    print(f"wrote {args.out}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            return _simulate(args)
        if args.command == "solve":
            return _solve(args)
        return _merge(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:                  # numeric or I/O failure
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
