from __future__ import annotations
from pathlib import Path
from typing import List, Literal, Optional, Union
from pydantic import BaseModel, Field, ValidationError
import yaml

from .errors import DataSourceError, InvalidInputError
from .kstests import EffectiveSize
from .simulation import DEFAULT_REPLICATIONS, MIN_REPLICATIONS, MethodName

class IngestConfig(BaseModel):
    max_workers: Optional[int] = Field(default=None, ge=1)  # None = all cores
    format: Literal["lines", "csv"] = "lines"
    missing_policy: Literal["error", "skip"] = "error"

class TestingConfig(BaseModel):
    alpha: float = Field(default=0.05, gt=0.0, lt=1.0)
    dither: bool = False
    effective_size: EffectiveSize = "comparison"
    band_level: float = Field(default=0.95, gt=0.0, lt=1.0)

class SimulationDefaults(BaseModel):
    n_reference: int = Field(default=2000, ge=1)
    m_comparison: int = Field(default=200, ge=1)
    replications: int = Field(default=DEFAULT_REPLICATIONS, ge=MIN_REPLICATIONS)
    alpha: float = Field(default=0.05, gt=0.0, lt=1.0)
    mu_grid: Optional[List[float]] = None  # None = family default grid
    methods: List[MethodName] = Field(default_factory=lambda: ["two_sample", "transform"])
    null: Literal["normal", "exponential"] = "normal"
    max_workers: Optional[int] = Field(default=None, ge=1)

class KsDriftConfig(BaseModel):
    ingest: IngestConfig = IngestConfig()
    testing: TestingConfig = TestingConfig()
    simulation: SimulationDefaults = SimulationDefaults()

def load_config(path: Optional[Union[str, Path]]) -> KsDriftConfig:
    if path is None:
        return KsDriftConfig()
    source = Path(path)
    try:
        data = yaml.safe_load(source.read_text(encoding="utf-8")) or {}
    except OSError as exc:
        raise DataSourceError(source, exc.strerror or str(exc)) from exc
    except yaml.YAMLError as exc:
        raise InvalidInputError(f"invalid config {source}: {exc}") from exc
    try:
        return KsDriftConfig(**data)
    except (TypeError, ValidationError) as exc:
        raise InvalidInputError(f"invalid config {source}: {exc}") from exc
