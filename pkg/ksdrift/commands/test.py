"""CLI commands running Kolmogorov-Smirnov tests on partitioned data files."""
from __future__ import annotations

import argparse
from argparse import _SubParsersAction
from typing import Optional, Sequence

from ..distributions import parse_dist
from ..ecdf import load_ecdf
from ..errors import InvalidInputError
from ..ingest import load_dataset
from ..kstests import check_alpha, ks_one_sample, ks_transform_batch, ks_transform_test, ks_two_sample
from ..report import RunReport, ratio_warning_text, render_document
from ..util import LogCallback, PhaseTimer
from .common import (
    EXIT_OK,
    EXIT_REJECT,
    KsArgumentParser,
    add_common_options,
    add_dataset_options,
    add_test_options,
    dataset_spec,
    dispatch,
    emit_document,
    make_log,
    resolve_seed,
    settings,
    workers,
)


def _alpha(args: argparse.Namespace) -> float:
    return check_alpha(args.alpha if args.alpha is not None else settings(args).testing.alpha)


def _dither(args: argparse.Namespace) -> bool:
    return bool(args.dither) if args.dither is not None else settings(args).testing.dither


def _effective_size(args: argparse.Namespace) -> str:
    return args.effective_size or settings(args).testing.effective_size


def _load_ecdf_arg(args: argparse.Namespace, paths: Sequence[str], timer: PhaseTimer, log: Optional[LogCallback]):
    spec = dataset_spec(args, paths)
    with timer.phase("ingest"):
        load = load_dataset(spec, max_workers=workers(args), log_cb=log)
    with timer.phase("build"):
        ecdf = load.to_ecdf()
    return ecdf, load, spec


def _reference(args: argparse.Namespace, timer: PhaseTimer, log: Optional[LogCallback]):
    """Reference ecdf, its input echo and ingest warnings."""
    if args.reference_ecdf:
        with timer.phase("ingest"):
            ecdf = load_ecdf(args.reference_ecdf)
        if log:
            log(f"[ECDF] loaded {args.reference_ecdf}: n={ecdf.n}")
        return ecdf, {"ecdf": str(args.reference_ecdf)}, []
    ecdf, load, spec = _load_ecdf_arg(args, args.reference, timer, log)
    return ecdf, spec.echo(), load.warnings()


def _finish(args: argparse.Namespace, report: RunReport, log: Optional[LogCallback]) -> int:
    verdict = report.verdict
    if log:
        outcome = "reject H0" if verdict.reject else "fail to reject H0"
        log(f"[TEST] {outcome}: D={verdict.d_stat:.6g} T={verdict.t_stat:.6g} p={verdict.p_value:.6g} alpha={verdict.alpha}")
        for text in report.warnings:
            log(f"[WARN] {text}")
    emit_document(report.render(include_timing=not args.no_timing))
    return EXIT_REJECT if verdict.reject else EXIT_OK


def _run_one_sample(args: argparse.Namespace) -> int:
    log = make_log(args)
    timer = PhaseTimer()
    alpha = _alpha(args)
    f0 = parse_dist(args.f0)
    ecdf, load, spec = _load_ecdf_arg(args, args.data, timer, log)
    with timer.phase("test"):
        result = ks_one_sample(ecdf, f0, alpha=alpha)
    report = RunReport(
        command="test one-sample",
        verdict=result,
        inputs={"data": spec.echo(), "f0": f0.describe()},
        timing=timer.as_dict(),
        warnings=load.warnings(),
    )
    return _finish(args, report, log)


def _run_two_sample(args: argparse.Namespace) -> int:
    log = make_log(args)
    timer = PhaseTimer()
    alpha = _alpha(args)
    ecdf_x, load_x, spec_x = _load_ecdf_arg(args, args.x, timer, log)
    ecdf_y, load_y, spec_y = _load_ecdf_arg(args, args.y, timer, log)
    with timer.phase("test"):
        result = ks_two_sample(ecdf_x, ecdf_y, alpha=alpha)
    report = RunReport(
        command="test two-sample",
        verdict=result,
        inputs={"x": spec_x.echo(), "y": spec_y.echo()},
        timing=timer.as_dict(),
        warnings=load_x.warnings() + load_y.warnings(),
        extra={"n_x": ecdf_x.n, "n_y": ecdf_y.n},
    )
    return _finish(args, report, log)


def _run_transform(args: argparse.Namespace) -> int:
    log = make_log(args)
    timer = PhaseTimer()
    alpha = _alpha(args)
    dither = _dither(args)
    seed = resolve_seed(args, needed=dither)
    reference, ref_echo, warnings = _reference(args, timer, log)
    # the merged sort fixes element order, so dithering is partition-count independent
    comparison, load, spec = _load_ecdf_arg(args, args.comparison, timer, log)
    with timer.phase("transform"):
        result, transform = ks_transform_test(
            reference,
            comparison.values,
            alpha=alpha,
            dither=dither,
            seed=seed,
            effective_size=_effective_size(args),
            max_workers=workers(args),
        )
    report = RunReport(
        command="test transform",
        verdict=result,
        transform=transform,
        inputs={"reference": ref_echo, "comparison": spec.echo()},
        timing=timer.as_dict(),
        warnings=warnings + load.warnings(),
        seed=transform.seed_used,
        extra={"effective_size": _effective_size(args)},
    )
    return _finish(args, report, log)


def _run_batch(args: argparse.Namespace) -> int:
    log = make_log(args)
    timer = PhaseTimer()
    alpha = _alpha(args)
    dither = _dither(args)
    seed = resolve_seed(args, needed=dither)
    reference, ref_echo, warnings = _reference(args, timer, log)
    spec = dataset_spec(args, args.window)
    with timer.phase("ingest"):
        load = load_dataset(spec, max_workers=workers(args), log_cb=log)
    warnings = warnings + load.warnings()
    effective_size = _effective_size(args)
    with timer.phase("transform"):
        results, master = ks_transform_batch(
            reference,
            [p.partition.values for p in load.partitions],
            alpha=alpha,
            dither=dither,
            seed=seed,
            effective_size=effective_size,
            max_workers=workers(args),
            log_cb=log,
        )

    rows = []
    for part, (result, transform) in zip(load.partitions, results):
        row = {"path": str(part.path)}
        row.update(result.as_dict())
        row.update({"ratio": transform.ratio, "ratio_warning": transform.ratio_warning})
        rows.append(row)
        if transform.ratio_warning:
            warnings.append(f"{part.path}: {ratio_warning_text(transform)}")
    rejected = sum(1 for result, _ in results if result.reject)
    doc = {
        "command": "test batch",
        "alpha": alpha,
        "seed": master,
        "effective_size": effective_size,
        "rejected": rejected,
        "windows": rows,
        "reference": {"n": reference.n, "source": ref_echo},
        "warnings": warnings,
    }
    if not args.no_timing:
        doc["timing_ms"] = timer.as_dict()
    if log:
        for text in warnings:
            log(f"[WARN] {text}")
    emit_document(render_document(doc))
    return EXIT_REJECT if rejected else EXIT_OK


def _add_reference_options(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--reference", action="append", help="Reference partition file (may repeat)")
    group.add_argument("--reference-ecdf", help="Persisted reference ecdf from 'ksdrift ecdf build'")
    parser.add_argument(
        "--effective-size",
        choices=("comparison", "pooled"),
        help="Scale the statistic by m (default) or by n*m/(n+m)",
    )


def _add_shared(parser: argparse.ArgumentParser) -> None:
    add_test_options(parser)
    add_dataset_options(parser)
    add_common_options(parser)


def _configure_parser(parser: argparse.ArgumentParser) -> None:
    actions = parser.add_subparsers(dest="test_command", metavar="kind")

    one = actions.add_parser("one-sample", help="Sample against a fully specified continuous F_0")
    one.add_argument("--data", action="append", required=True, help="Sample partition file (may repeat)")
    one.add_argument("--f0", required=True, help="Null distribution: uniform, normal[:mu,sigma] or exponential[:rate]")
    _add_shared(one)
    one.set_defaults(run=_run_one_sample)

    two = actions.add_parser("two-sample", help="Classic two-sample test on merged sorted samples")
    two.add_argument("--x", action="append", required=True, help="First sample partition file (may repeat)")
    two.add_argument("--y", action="append", required=True, help="Second sample partition file (may repeat)")
    _add_shared(two)
    two.set_defaults(run=_run_two_sample)

    transform = actions.add_parser("transform", help="Comparison sample through the reference ecdf, tested for uniformity")
    _add_reference_options(transform)
    transform.add_argument("--comparison", action="append", required=True, help="Comparison partition file (may repeat)")
    _add_shared(transform)
    transform.set_defaults(run=_run_transform)

    batch = actions.add_parser("batch", help="Transform test of many comparison windows against one reference")
    _add_reference_options(batch)
    batch.add_argument("--window", action="append", required=True, help="Comparison window file; each file is one window")
    _add_shared(batch)
    batch.set_defaults(run=_run_batch)


def add_parser(subparsers: _SubParsersAction[argparse.ArgumentParser]) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(
        "test",
        help="Run a Kolmogorov-Smirnov test",
        description="One-sample, two-sample or reference-ecdf transform test; exit 1 when H0 is rejected.",
    )
    _configure_parser(parser)
    parser.set_defaults(handler=run_from_args)
    return parser


def build_parser(prog: Optional[str] = None) -> argparse.ArgumentParser:
    parser = KsArgumentParser(prog=prog or "ksdrift test", description="Run a Kolmogorov-Smirnov test")
    _configure_parser(parser)
    parser.set_defaults(handler=run_from_args)
    return parser


def run_from_args(args: argparse.Namespace) -> int:
    kind = getattr(args, "run", None)
    if kind is None:
        raise InvalidInputError("choose a test: one-sample, two-sample, transform or batch")
    return kind(args)


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    return dispatch(build_parser(), argv)


__all__ = ["add_parser", "build_parser", "run_cli", "run_from_args"]
