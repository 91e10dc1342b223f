from __future__ import annotations

import os
import time
from contextlib import contextmanager
from typing import Callable, Dict, Iterator, Optional

ProgressCallback = Callable[[str, int, int, str], None]
LogCallback = Callable[[str], None]


def _emit(cb: Optional[Callable[..., None]], *args, **kwargs) -> None:
    if not cb:
        return
    try:
        cb(*args, **kwargs)
    except Exception:
        pass


def resolve_workers(max_workers: Optional[int]) -> int:
    if max_workers is not None and max_workers > 0:
        return int(max_workers)
    return os.cpu_count() or 1


class PhaseTimer:
    """Wall-clock milliseconds per named phase, in first-seen order."""

    def __init__(self) -> None:
        self.phases: Dict[str, float] = {}

    @contextmanager
    def phase(self, name: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            elapsed = (time.perf_counter() - start) * 1000.0
            self.phases[name] = round(self.phases.get(name, 0.0) + elapsed, 3)

    def as_dict(self) -> Dict[str, float]:
        return dict(self.phases)
