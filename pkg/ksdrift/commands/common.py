"""Options and helpers shared by the ksdrift subcommands."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from rich.console import Console

from ..config import KsDriftConfig, load_config
from ..distributions import fresh_seed
from ..errors import DataFormatError, DataSourceError, EmptySampleError, InvalidInputError
from ..ingest import DatasetSpec
from ..util import LogCallback

EXIT_OK = 0
EXIT_REJECT = 1
EXIT_IO = 2
EXIT_PARSE = 3
EXIT_USAGE = 64

SEED_MAX = 2**63 - 1


class KsArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 64."""

    def error(self, message: str):  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def dispatch(parser: argparse.ArgumentParser, argv: Optional[Sequence[str]] = None) -> int:
    """Parse, run the selected handler and map failures onto exit codes."""
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except SystemExit as exc:
        if exc.code is None or isinstance(exc.code, int):
            return exc.code or 0
        return EXIT_USAGE

    handler = getattr(args, "handler", None)
    if handler is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE

    console = make_console()
    try:
        return handler(args)
    except DataSourceError as exc:
        console.print(f"[ERROR] {exc}", markup=False)
        return EXIT_IO
    except (DataFormatError, EmptySampleError) as exc:
        console.print(f"[ERROR] {exc}", markup=False)
        return EXIT_PARSE
    except InvalidInputError as exc:
        console.print(f"[ERROR] {exc}", markup=False)
        return EXIT_USAGE
    except OSError as exc:
        # an unexpected I/O failure must never surface as exit 1 (reject)
        console.print(f"[ERROR] {exc}", markup=False)
        return EXIT_IO
    except KeyboardInterrupt:
        console.print("[CANCEL] interrupted by user", markup=False)
        return 130


def seed_value(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from exc
    if not (0 <= value <= SEED_MAX):
        raise argparse.ArgumentTypeError(f"seed must lie in [0, {SEED_MAX}]")
    return value


def add_common_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="Optional YAML file supplying defaults for unset flags")
    parser.add_argument("--threads", type=int, help="Worker thread bound (default: available parallelism)")
    parser.add_argument("--quiet", action="store_true", help="Suppress progress and log lines on stderr")


def add_dataset_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("lines", "csv"), help="Input format: one float per line, or CSV")
    parser.add_argument("--column", help="CSV column selector: header name or 0-based index")
    parser.add_argument("--missing", choices=("error", "skip"), help="Non-numeric tokens: fail (exit 3) or skip and count")


def add_test_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--alpha", type=float, help="Significance level (default 0.05)")
    parser.add_argument("--seed", type=seed_value, help="Master seed for dithering; generated and printed when omitted")
    parser.add_argument("--dither", action="store_true", default=None, help="Dither transformed values within their ecdf step")
    parser.add_argument("--no-timing", action="store_true", help="Omit wall-clock timings so reports are byte-stable")


def settings(args: argparse.Namespace) -> KsDriftConfig:
    cached = getattr(args, "_settings", None)
    if cached is None:
        cached = load_config(args.config)
        args._settings = cached
    return cached


def workers(args: argparse.Namespace) -> Optional[int]:
    if args.threads is not None:
        if args.threads < 1:
            raise InvalidInputError("--threads must be >= 1")
        return args.threads
    return settings(args).ingest.max_workers


def dataset_spec(args: argparse.Namespace, paths: Sequence[str]) -> DatasetSpec:
    cfg = settings(args).ingest
    return DatasetSpec.create(
        paths=[Path(p) for p in paths],
        format=args.format or cfg.format,
        column=args.column,
        missing_policy=args.missing or cfg.missing_policy,
    )


def make_console() -> Console:
    return Console(stderr=True, highlight=False, soft_wrap=True)


def make_log(args: argparse.Namespace) -> Optional[LogCallback]:
    if args.quiet:
        return None
    console = make_console()

    def log(message: str) -> None:
        console.print(message, markup=False)

    return log


def resolve_seed(args: argparse.Namespace, needed: bool) -> Optional[int]:
    """The --seed value, or a generated one that is announced on stderr."""
    if args.seed is not None:
        return args.seed
    if not needed:
        return None
    seed = fresh_seed()
    make_console().print(f"[SEED] no --seed given; using generated seed {seed}", markup=False)
    return seed


def emit_document(text: str) -> None:
    sys.stdout.write(text)
    sys.stdout.flush()


def split_list(text: str, what: str) -> List[str]:
    items = [item.strip() for item in text.split(",") if item.strip()]
    if not items:
        raise InvalidInputError(f"{what} must not be empty")
    return items


def float_list(text: str, what: str) -> List[float]:
    try:
        return [float(item) for item in split_list(text, what)]
    except ValueError as exc:
        raise InvalidInputError(f"{what} must be comma-separated numbers, got {text!r}") from exc
