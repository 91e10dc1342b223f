from __future__ import annotations

from pathlib import Path
from typing import Callable, Iterable

import numpy as np
import pytest


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def write_lines(tmp_path: Path) -> Callable[[str, Iterable[object]], Path]:
    """Write one token per line into tmp_path/name."""

    def _write(name: str, values: Iterable[object]) -> Path:
        path = tmp_path / name
        path.write_text("".join(f"{v}\n" for v in values), encoding="utf-8")
        return path

    return _write
