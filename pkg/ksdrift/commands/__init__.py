"""Command registration for the ksdrift CLI."""
from __future__ import annotations

from typing import Iterable

from . import ecdf, simulate, test

COMMAND_MODULES: Iterable = (ecdf, test, simulate)

__all__ = ["COMMAND_MODULES"]
