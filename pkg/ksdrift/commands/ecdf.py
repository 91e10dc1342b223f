"""CLI commands for building, merging and inspecting persisted reference ecdfs."""
from __future__ import annotations

import argparse
from argparse import _SubParsersAction
from typing import Optional, Sequence

from ..ecdf import EcdfPartition, ecdf_quantile, load_ecdf, merge_partitions, save_ecdf
from ..errors import InvalidInputError
from ..ingest import load_dataset
from ..kstests import ks_confidence_band
from ..report import render_document
from ..util import PhaseTimer
from .common import (
    EXIT_OK,
    KsArgumentParser,
    add_common_options,
    add_dataset_options,
    dataset_spec,
    dispatch,
    emit_document,
    make_log,
    settings,
    workers,
)

QUANTILES = (0.25, 0.5, 0.75)


def _run_build(args: argparse.Namespace) -> int:
    log = make_log(args)
    timer = PhaseTimer()
    spec = dataset_spec(args, args.paths)
    with timer.phase("ingest"):
        load = load_dataset(spec, max_workers=workers(args), log_cb=log)
    with timer.phase("build"):
        ecdf = load.to_ecdf()
    with timer.phase("save"):
        target = save_ecdf(ecdf, args.out)
    if log:
        log(f"[ECDF] wrote n={ecdf.n} from {len(load.partitions)} partition(s) to {target}")

    warnings = load.warnings()
    doc = {
        "command": "ecdf build",
        "out": str(target),
        "n": ecdf.n,
        "partitions": len(load.partitions),
        "skipped": load.skipped,
        "warning_count": len(warnings),
        "warnings": warnings,
        "inputs": spec.echo(),
    }
    if not args.no_timing:
        doc["timing_ms"] = timer.as_dict()
    emit_document(render_document(doc))
    return EXIT_OK


def _run_merge(args: argparse.Namespace) -> int:
    log = make_log(args)
    parts = []
    for path in args.files:
        ecdf = load_ecdf(path)
        parts.append(EcdfPartition(values=ecdf.values, provenance=str(path)))
        if log:
            log(f"[ECDF] loaded {path}: n={ecdf.n}")
    merged = merge_partitions(parts)
    target = save_ecdf(merged, args.out)
    if log:
        log(f"[ECDF] merged {len(parts)} ecdf(s) into {target}: n={merged.n}")
    emit_document(render_document({
        "command": "ecdf merge",
        "out": str(target),
        "n": merged.n,
        "sources": [str(p) for p in args.files],
    }))
    return EXIT_OK


def _run_show(args: argparse.Namespace) -> int:
    ecdf = load_ecdf(args.file)
    level = args.level if args.level is not None else settings(args).testing.band_level
    band = ks_confidence_band(ecdf, level)
    emit_document(render_document({
        "command": "ecdf show",
        "file": str(args.file),
        "n": ecdf.n,
        "minimum": ecdf.minimum,
        "maximum": ecdf.maximum,
        "quantiles": {str(p): ecdf_quantile(ecdf, p) for p in QUANTILES},
        "band": {"level": band.level, "half_width": band.half_width},
    }))
    return EXIT_OK


def _configure_parser(parser: argparse.ArgumentParser) -> None:
    actions = parser.add_subparsers(dest="ecdf_command", metavar="action")

    build = actions.add_parser("build", help="Build a reference ecdf from partition files and persist it")
    build.add_argument("paths", nargs="+", help="Partition files; each file is one partition")
    build.add_argument("--out", required=True, help="Destination of the persisted ecdf")
    build.add_argument("--no-timing", action="store_true", help="Omit wall-clock timings from the summary")
    add_dataset_options(build)
    add_common_options(build)
    build.set_defaults(run=_run_build)

    merge = actions.add_parser("merge", help="Merge persisted ecdfs into one without re-reading raw data")
    merge.add_argument("files", nargs="+", help="Persisted ecdf files")
    merge.add_argument("--out", required=True, help="Destination of the merged ecdf")
    add_common_options(merge)
    merge.set_defaults(run=_run_merge)

    show = actions.add_parser("show", help="Summarize a persisted ecdf")
    show.add_argument("file", help="Persisted ecdf file")
    show.add_argument("--level", type=float, help="Confidence level for the reported band half-width")
    add_common_options(show)
    show.set_defaults(run=_run_show)


def add_parser(subparsers: _SubParsersAction[argparse.ArgumentParser]) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(
        "ecdf",
        help="Build, merge or inspect reference ecdfs",
        description="Read partitioned numeric data into a sorted reference ecdf and persist it.",
    )
    _configure_parser(parser)
    parser.set_defaults(handler=run_from_args)
    return parser


def build_parser(prog: Optional[str] = None) -> argparse.ArgumentParser:
    parser = KsArgumentParser(prog=prog or "ksdrift ecdf", description="Build, merge or inspect reference ecdfs")
    _configure_parser(parser)
    parser.set_defaults(handler=run_from_args)
    return parser


def run_from_args(args: argparse.Namespace) -> int:
    action = getattr(args, "run", None)
    if action is None:
        raise InvalidInputError("choose an action: build, merge or show")
    return action(args)


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    return dispatch(build_parser(), argv)


__all__ = ["add_parser", "build_parser", "run_cli", "run_from_args"]
