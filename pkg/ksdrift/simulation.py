"""
Monte-Carlo power functions for the two-sample KS test and the transform test.

For each method and each alternative parameter on the grid, ``replications``
independent trials draw a reference sample from the null family and a
comparison sample from the alternative, run the test at ``alpha`` and count
rejections. Trial t of method k at grid point g always uses the random stream
(master_seed; 0, k, g, t), so curves are bit-identical for any worker count.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Literal, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import pyarrow as pa
from pyarrow import csv as pa_csv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .distributions import STANDARD_NORMAL, ContinuousDist, SeededRng, dist_sample
from .ecdf import EmpiricalCdf, build_ecdf
from .errors import DataSourceError, InvalidInputError
from .kstests import EffectiveSize, ks_transform_test, ks_two_sample
from .util import LogCallback, ProgressCallback, _emit, resolve_workers

MethodName = Literal["two_sample", "transform"]
METHOD_ORDER: Tuple[MethodName, ...] = ("two_sample", "transform")

MIN_REPLICATIONS = 100
DEFAULT_REPLICATIONS = 10_000
TRIAL_BLOCK = 250

CSV_COLUMNS = ("method", "mu", "rejection_rate", "mc_stderr", "n", "m", "replications", "alpha", "seed")

# stream roots: per-trial draws and shared references never overlap
_TRIAL_ROOT = 0
_SHARED_ROOT = 1


def default_mu_grid() -> List[float]:
    """41 equally spaced mean shifts on [-1, 1]."""
    return [round(float(v), 10) for v in np.linspace(-1.0, 1.0, 41)]


def default_rate_grid() -> List[float]:
    """Rate multipliers for the exponential null; 1 is the null itself."""
    return [0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 3.0]


def default_panels() -> Dict[str, List[Tuple[int, int]]]:
    """(n, m) settings: growing reference at fixed m, and growing sizes at fixed ratio."""
    return {
        "reference_size": [(500, 200), (2000, 200), (10000, 200)],
        "fixed_ratio": [(250, 50), (1000, 200), (4000, 800)],
    }


class SimulationConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_reference: int = Field(ge=1)
    m_comparison: int = Field(ge=1)
    replications: int = Field(default=DEFAULT_REPLICATIONS, ge=MIN_REPLICATIONS)
    alpha: float = Field(default=0.05, gt=0.0, lt=1.0)
    mu_grid: List[float] = Field(default_factory=default_mu_grid, min_length=1)
    null_family: ContinuousDist = STANDARD_NORMAL
    methods: List[MethodName] = Field(default_factory=lambda: list(METHOD_ORDER), min_length=1)
    master_seed: int = Field(default=0, ge=0, lt=2**63)
    dither: bool = False
    shared_reference: bool = False
    effective_size: EffectiveSize = "comparison"
    max_workers: Optional[int] = Field(default=None, ge=1)

    @field_validator("mu_grid")
    @classmethod
    def _finite_grid(cls, grid: List[float]) -> List[float]:
        if not all(math.isfinite(v) for v in grid):
            raise ValueError("mu_grid values must be finite")
        return grid

    @field_validator("methods")
    @classmethod
    def _unique_methods(cls, methods: List[MethodName]) -> List[MethodName]:
        if len(set(methods)) != len(methods):
            raise ValueError("methods must not repeat")
        return methods

    @model_validator(mode="after")
    def _grid_matches_family(self) -> "SimulationConfig":
        family = self.null_family.family
        if family == "uniform01":
            raise ValueError("null_family must be normal or exponential")
        if family == "exponential" and any(v <= 0 for v in self.mu_grid):
            raise ValueError("exponential alternatives are rate multipliers and must be > 0")
        return self

    @classmethod
    def create(cls, **fields) -> "SimulationConfig":
        """Validate and build, reporting problems as InvalidInputError."""
        try:
            return cls(**fields)
        except ValidationError as exc:
            raise InvalidInputError(_validation_message(exc)) from exc

    def alternative(self, param: float) -> ContinuousDist:
        if self.null_family.family == "normal":
            return self.null_family.shifted(param)
        return self.null_family.rate_scaled(param)

    def echo(self) -> dict:
        return self.model_dump(mode="json")


def _validation_message(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err.get("loc", ())) or "config"
        parts.append(f"{loc}: {err.get('msg')}")
    return "invalid simulation config: " + "; ".join(parts)


class PowerPoint(NamedTuple):
    mu: float
    rejection_rate: float
    mc_stderr: float
    rejections: int


class GapPoint(NamedTuple):
    mu: float
    gap: float
    joint_stderr: float


@dataclass
class PowerCurve:
    method: MethodName
    points: List[PowerPoint]
    config_echo: SimulationConfig

    @property
    def mu_grid(self) -> List[float]:
        return [p.mu for p in self.points]

    def rate_at(self, mu: float) -> PowerPoint:
        for p in self.points:
            if p.mu == mu:
                return p
        raise KeyError(mu)


def mc_stderr(rate: float, replications: int) -> float:
    return math.sqrt(rate * (1.0 - rate) / replications)


def _revalidate(config: SimulationConfig) -> SimulationConfig:
    # configs built with model_construct or copied with update= skip validation
    try:
        return SimulationConfig.model_validate(config.model_dump())
    except ValidationError as exc:
        raise InvalidInputError(_validation_message(exc)) from exc


def _shared_reference(config: SimulationConfig, method_index: int) -> EmpiricalCdf:
    stream = SeededRng(config.master_seed, _SHARED_ROOT).child(method_index)
    return build_ecdf(dist_sample(config.null_family, config.n_reference, stream))


def _run_block(
    config: SimulationConfig,
    method: MethodName,
    grid_index: int,
    start: int,
    stop: int,
    shared: Optional[EmpiricalCdf],
) -> int:
    method_index = METHOD_ORDER.index(method)
    alternative = config.alternative(config.mu_grid[grid_index])
    base = SeededRng(config.master_seed, _TRIAL_ROOT).child(method_index).child(grid_index)
    rejections = 0
    for trial in range(start, stop):
        gen = base.child(trial).generator()
        if shared is None:
            reference: Union[EmpiricalCdf, np.ndarray] = dist_sample(config.null_family, config.n_reference, gen)
        else:
            reference = shared
        comparison = dist_sample(alternative, config.m_comparison, gen)
        if method == "two_sample":
            result = ks_two_sample(reference, comparison, config.alpha)
        else:
            ecdf = reference if isinstance(reference, EmpiricalCdf) else build_ecdf(reference)
            dither_seed = int(gen.integers(0, 2**63)) if config.dither else None
            result, _ = ks_transform_test(
                ecdf,
                comparison,
                alpha=config.alpha,
                dither=config.dither,
                seed=dither_seed,
                effective_size=config.effective_size,
            )
        rejections += int(result.reject)
    return rejections


def estimate_power(
    config: SimulationConfig,
    progress_cb: Optional[ProgressCallback] = None,
    log_cb: Optional[LogCallback] = None,
) -> List[PowerCurve]:
    config = _revalidate(config)
    workers = resolve_workers(config.max_workers)
    reps = config.replications
    grid = config.mu_grid

    tasks: List[Tuple[MethodName, int, int, int]] = [
        (method, g, start, min(start + TRIAL_BLOCK, reps))
        for method in config.methods
        for g in range(len(grid))
        for start in range(0, reps, TRIAL_BLOCK)
    ]
    total_trials = reps * len(grid) * len(config.methods)
    _emit(
        log_cb,
        f"[SIM] n={config.n_reference} m={config.m_comparison} reps={reps} grid={len(grid)} "
        f"methods={','.join(config.methods)} null={config.null_family.describe()} workers={workers} "
        f"seed={config.master_seed}",
    )
    _emit(progress_cb, "simulate", 0, total_trials, "Starting replications")

    shared: Dict[MethodName, Optional[EmpiricalCdf]] = {m: None for m in config.methods}
    if config.shared_reference:
        for method in config.methods:
            shared[method] = _shared_reference(config, METHOD_ORDER.index(method))
        _emit(log_cb, "[SIM] shared-reference variant: one reference sample per method")

    counts: Dict[Tuple[MethodName, int], int] = {(m, g): 0 for m in config.methods for g in range(len(grid))}
    done = 0
    started = time.perf_counter()
    with ThreadPoolExecutor(max_workers=workers) as ex:
        futures = {
            ex.submit(_run_block, config, method, g, start, stop, shared[method]): (method, g, stop - start)
            for method, g, start, stop in tasks
        }
        for fut in as_completed(futures):
            method, g, size = futures[fut]
            counts[(method, g)] += fut.result()
            done += size
            _emit(progress_cb, "simulate", done, total_trials, f"{done:,}/{total_trials:,} trials")

    elapsed = time.perf_counter() - started
    _emit(log_cb, f"[SIM] {total_trials:,} trials in {elapsed:.1f}s")

    curves: List[PowerCurve] = []
    for method in config.methods:
        points = []
        for g, mu in enumerate(grid):
            hits = counts[(method, g)]
            rate = hits / reps
            points.append(PowerPoint(mu=mu, rejection_rate=rate, mc_stderr=mc_stderr(rate, reps), rejections=hits))
        curves.append(PowerCurve(method=method, points=points, config_echo=config))
    _emit(progress_cb, "done", total_trials, total_trials, "Simulation complete")
    return curves


def exponential_variant(
    config: SimulationConfig,
    progress_cb: Optional[ProgressCallback] = None,
    log_cb: Optional[LogCallback] = None,
) -> List[PowerCurve]:
    """Power under an exponential null; the grid holds rate multipliers."""
    if config.null_family.family != "exponential":
        raise InvalidInputError("exponential_variant needs an exponential null_family")
    return estimate_power(config, progress_cb=progress_cb, log_cb=log_cb)


def power_gap(curve_a: PowerCurve, curve_b: PowerCurve) -> List[GapPoint]:
    """Pointwise rate_a - rate_b with the combined Monte-Carlo standard error."""
    if curve_a.mu_grid != curve_b.mu_grid:
        raise InvalidInputError("power curves must share the same grid")
    return [
        GapPoint(mu=a.mu, gap=a.rejection_rate - b.rejection_rate, joint_stderr=math.hypot(a.mc_stderr, b.mc_stderr))
        for a, b in zip(curve_a.points, curve_b.points)
    ]


def type_ii_error(curve: PowerCurve) -> List[Tuple[float, float]]:
    return [(p.mu, 1.0 - p.rejection_rate) for p in curve.points]


def curves_table(curves: Sequence[PowerCurve]) -> pa.Table:
    rows: Dict[str, list] = {name: [] for name in CSV_COLUMNS}
    for curve in curves:
        cfg = curve.config_echo
        for p in curve.points:
            rows["method"].append(curve.method)
            rows["mu"].append(float(p.mu))
            rows["rejection_rate"].append(float(p.rejection_rate))
            rows["mc_stderr"].append(float(p.mc_stderr))
            rows["n"].append(cfg.n_reference)
            rows["m"].append(cfg.m_comparison)
            rows["replications"].append(cfg.replications)
            rows["alpha"].append(float(cfg.alpha))
            rows["seed"].append(cfg.master_seed)
    schema = pa.schema(
        [
            ("method", pa.string()),
            ("mu", pa.float64()),
            ("rejection_rate", pa.float64()),
            ("mc_stderr", pa.float64()),
            ("n", pa.int64()),
            ("m", pa.int64()),
            ("replications", pa.int64()),
            ("alpha", pa.float64()),
            ("seed", pa.int64()),
        ]
    )
    return pa.table(rows, schema=schema)


def write_power_csv(curves: Sequence[PowerCurve], path: Union[str, Path]) -> Path:
    target = Path(path)
    table = curves_table(curves)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        pa_csv.write_csv(table, str(target), write_options=pa_csv.WriteOptions(quoting_style="none"))
    except OSError as exc:
        raise DataSourceError(target, exc.strerror or str(exc), action="write") from exc
    return target


def read_power_csv(path: Union[str, Path]) -> List[dict]:
    return pa_csv.read_csv(str(path)).to_pylist()


__all__ = [
    "CSV_COLUMNS",
    "GapPoint",
    "METHOD_ORDER",
    "MIN_REPLICATIONS",
    "PowerCurve",
    "PowerPoint",
    "SimulationConfig",
    "default_mu_grid",
    "default_panels",
    "default_rate_grid",
    "estimate_power",
    "exponential_variant",
    "mc_stderr",
    "power_gap",
    "read_power_csv",
    "type_ii_error",
    "write_power_csv",
]
