"""Unified command-line interface for ksdrift.

Exit codes: 0 = fail to reject, 1 = reject, 2 = input not readable,
3 = input not parseable, 64 = usage error.
"""
from __future__ import annotations

import argparse
from typing import Optional, Sequence

from .commands import COMMAND_MODULES
from .commands.common import KsArgumentParser, dispatch


def build_parser() -> argparse.ArgumentParser:
    parser = KsArgumentParser(
        prog="ksdrift",
        description="Kolmogorov-Smirnov goodness-of-fit on partitioned data via the reference-ecdf transform",
    )
    subparsers = parser.add_subparsers(dest="command", metavar="command")
    for module in COMMAND_MODULES:
        module.add_parser(subparsers)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    return dispatch(build_parser(), argv)


if __name__ == "__main__":
    raise SystemExit(main())
