"""CLI command estimating power curves by Monte-Carlo replication."""
from __future__ import annotations

import argparse
import sys
from argparse import _SubParsersAction
from typing import Optional, Sequence

from tqdm import tqdm

from ..distributions import STANDARD_NORMAL, ContinuousDist
from ..errors import InvalidInputError
from ..simulation import (
    MIN_REPLICATIONS,
    SimulationConfig,
    default_mu_grid,
    default_rate_grid,
    estimate_power,
    power_gap,
    write_power_csv,
)
from .common import (
    EXIT_OK,
    KsArgumentParser,
    add_common_options,
    dispatch,
    float_list,
    make_log,
    resolve_seed,
    seed_value,
    settings,
    split_list,
)


class _ProgressBar:
    """tqdm bar on stderr driven by the simulation progress callback."""

    def __init__(self, enabled: bool) -> None:
        self.enabled = enabled
        self.bar: Optional[tqdm] = None

    def __call__(self, phase: str, done: int, total: int, message: str) -> None:
        if not self.enabled or phase != "simulate":
            return
        if self.bar is None:
            self.bar = tqdm(total=total, unit="trial", desc="simulate", file=sys.stderr, dynamic_ncols=True)
        self.bar.update(done - self.bar.n)

    def close(self) -> None:
        if self.bar is not None:
            self.bar.close()
            self.bar = None


def _config_from_args(args: argparse.Namespace) -> SimulationConfig:
    defaults = settings(args).simulation
    reps = args.reps if args.reps is not None else defaults.replications
    if reps < MIN_REPLICATIONS:
        raise InvalidInputError(
            f"--reps {reps} is too small: at least {MIN_REPLICATIONS} replications are needed for a usable rejection rate"
        )
    null_name = args.null or defaults.null
    null: ContinuousDist = STANDARD_NORMAL if null_name == "normal" else ContinuousDist.exponential(1.0)
    if args.mu_grid is not None:
        grid = float_list(args.mu_grid, "--mu-grid")
    elif defaults.mu_grid is not None:
        grid = list(defaults.mu_grid)
    else:
        grid = default_mu_grid() if null_name == "normal" else default_rate_grid()
    methods = split_list(args.methods, "--methods") if args.methods else list(defaults.methods)
    threads = args.threads if args.threads is not None else defaults.max_workers
    if threads is not None and threads < 1:
        raise InvalidInputError("--threads must be >= 1")
    return SimulationConfig.create(
        n_reference=args.n if args.n is not None else defaults.n_reference,
        m_comparison=args.m if args.m is not None else defaults.m_comparison,
        replications=reps,
        alpha=args.alpha if args.alpha is not None else defaults.alpha,
        mu_grid=grid,
        null_family=null,
        methods=methods,
        master_seed=resolve_seed(args, needed=True),
        dither=args.dither,
        shared_reference=args.shared_reference,
        effective_size=args.effective_size or settings(args).testing.effective_size,
        max_workers=threads,
    )


def run_from_args(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    log = make_log(args)
    progress = _ProgressBar(enabled=not args.quiet)
    try:
        curves = estimate_power(config, progress_cb=progress, log_cb=log)
    finally:
        progress.close()
    target = write_power_csv(curves, args.out)

    for curve in curves:
        rates = [p.rejection_rate for p in curve.points]
        print(
            f"{curve.method}: {len(curve.points)} points, rate min={min(rates):.4f} max={max(rates):.4f}, "
            f"n={config.n_reference} m={config.m_comparison} reps={config.replications} seed={config.master_seed}"
        )
    by_method = {c.method: c for c in curves}
    if log and len(by_method) == 2:
        gaps = power_gap(by_method["two_sample"], by_method["transform"])
        widest = max(gaps, key=lambda g: abs(g.gap))
        log(f"[SIM] largest power gap two_sample - transform: {widest.gap:+.4f} at {widest.mu} (se {widest.joint_stderr:.4f})")
    if log:
        log(f"[SIM] wrote {target}")
    return EXIT_OK


def _configure_parser(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", required=True, help="Destination CSV for the power curves")
    parser.add_argument("--n", type=int, help="Reference sample size (default 2000)")
    parser.add_argument("--m", type=int, help="Comparison sample size (default 200)")
    parser.add_argument("--reps", type=int, help=f"Replications per grid point (minimum {MIN_REPLICATIONS})")
    parser.add_argument("--alpha", type=float, help="Significance level (default 0.05)")
    parser.add_argument("--mu-grid", help="Comma-separated shifts (normal) or rate multipliers (exponential)")
    parser.add_argument("--methods", help="Comma-separated methods: two_sample,transform")
    parser.add_argument("--null", choices=("normal", "exponential"), help="Null family (default normal)")
    parser.add_argument("--seed", type=seed_value, help="Master seed; generated and printed when omitted")
    parser.add_argument("--dither", action="store_true", help="Dither transformed values in the transform method")
    parser.add_argument("--shared-reference", action="store_true", help="Draw one reference sample per method, reused by all trials")
    parser.add_argument("--effective-size", choices=("comparison", "pooled"), help="Transform test scaling (default comparison)")
    add_common_options(parser)


def add_parser(subparsers: _SubParsersAction[argparse.ArgumentParser]) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(
        "simulate",
        help="Estimate power curves by Monte-Carlo simulation",
        description="Compare the two-sample and transform tests over a grid of alternatives; writes a CSV.",
    )
    _configure_parser(parser)
    parser.set_defaults(handler=run_from_args)
    return parser


def build_parser(prog: Optional[str] = None) -> argparse.ArgumentParser:
    parser = KsArgumentParser(prog=prog or "ksdrift simulate", description="Estimate power curves by Monte-Carlo simulation")
    _configure_parser(parser)
    parser.set_defaults(handler=run_from_args)
    return parser


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    return dispatch(build_parser(), argv)


__all__ = ["add_parser", "build_parser", "run_cli", "run_from_args"]
