"""
Kolmogorov-Smirnov tests.

- ``ks_one_sample``: sample against a fully specified continuous F_0.
- ``ks_two_sample``: classic two-sample test on the merged sorted samples.
- ``ks_transform_test``: the comparison sample is pushed through the reference
  ecdf and tested for uniformity, turning the two-sample problem into a
  one-sample one that needs no joint sort.
- ``ks_confidence_band``: simultaneous band F_n(x) +/- k_level / sqrt(n).

All p-values come from the asymptotic Kolmogorov distribution.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .distributions import UNIFORM01, ContinuousDist, derive_seed, fresh_seed
from .ecdf import EmpiricalCdf, TransformReport, as_finite_array, ecdf_eval_many, transform_sample
from .errors import InvalidInputError
from .kolmogorov import DEFAULT as KOLMOGOROV
from .util import LogCallback, _emit, resolve_workers

DEFAULT_ALPHA = 0.05

Method = Literal["one-sample", "two-sample", "transform"]
EffectiveSize = Literal["comparison", "pooled"]
SampleLike = Union[ArrayLike, EmpiricalCdf]


@dataclass(frozen=True)
class KsResult:
    d_stat: float
    t_stat: float
    p_value: float
    n_effective: float
    alpha: float
    reject: bool
    method: Method = "one-sample"

    @property
    def critical_value(self) -> float:
        return KOLMOGOROV.critical_value(self.alpha)

    def as_dict(self) -> dict:
        out = asdict(self)
        out["critical_value"] = self.critical_value
        return out


@dataclass(frozen=True)
class ConfidenceBand:
    """Simultaneous asymptotic band around an ecdf."""

    level: float
    half_width: float
    n: int
    ecdf: EmpiricalCdf

    def bounds(self, x: ArrayLike) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
        centre = ecdf_eval_many(self.ecdf, x)
        return np.maximum(0.0, centre - self.half_width), np.minimum(1.0, centre + self.half_width)

    def covers(self, cdf: Callable[[NDArray[np.float64]], NDArray[np.float64]], grid: ArrayLike) -> bool:
        points = np.asarray(grid, dtype=np.float64)
        lower, upper = self.bounds(points)
        truth = np.asarray(cdf(points), dtype=np.float64)
        return bool(np.all((lower <= truth) & (truth <= upper)))


def check_alpha(alpha: float, name: str = "alpha") -> float:
    try:
        value = float(alpha)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"{name} must be a probability, got {alpha!r}") from exc
    if not (0.0 < value < 1.0):
        raise InvalidInputError(f"{name} must lie in the open interval (0, 1), got {alpha!r}")
    return value


def _sorted_sample(sample: SampleLike, what: str) -> NDArray[np.float64]:
    if isinstance(sample, EmpiricalCdf):
        return sample.values
    return np.sort(as_finite_array(sample, what=what), kind="stable")


def _result(d_stat: float, n_effective: float, alpha: float, method: Method) -> KsResult:
    d = min(1.0, max(0.0, float(d_stat)))
    t = math.sqrt(n_effective) * d
    p = KOLMOGOROV.sf(t)
    return KsResult(
        d_stat=d,
        t_stat=t,
        p_value=p,
        n_effective=float(n_effective),
        alpha=alpha,
        reject=p < alpha,
        method=method,
    )


def one_sample_statistic(sorted_x: NDArray[np.float64], f0: ContinuousDist) -> float:
    """Exact sup |F_n - F_0|, attained at a jump point from above or below."""
    n = sorted_x.size
    f = f0.cdf(sorted_x)
    i = np.arange(1, n + 1)
    upper = i / n - f
    lower = f - (i - 1) / n
    return float(max(upper.max(), lower.max()))


def two_sample_statistic(sorted_x: NDArray[np.float64], sorted_y: NDArray[np.float64]) -> float:
    """sup |F_n - G_m| over the pooled jump points."""
    pooled = np.concatenate([sorted_x, sorted_y])
    fx = np.searchsorted(sorted_x, pooled, side="right") / sorted_x.size
    gy = np.searchsorted(sorted_y, pooled, side="right") / sorted_y.size
    return float(np.abs(fx - gy).max())


def ks_one_sample(sample: SampleLike, f0: ContinuousDist, alpha: float = DEFAULT_ALPHA) -> KsResult:
    alpha = check_alpha(alpha)
    x = _sorted_sample(sample, "sample")
    return _result(one_sample_statistic(x, f0), x.size, alpha, "one-sample")


def ks_one_sample_uniform(sample: SampleLike, alpha: float = DEFAULT_ALPHA) -> KsResult:
    alpha = check_alpha(alpha)
    x = _sorted_sample(sample, "sample")
    if x[0] < 0.0 or x[-1] > 1.0:
        raise InvalidInputError("uniformity test needs values in [0, 1]")
    return _result(one_sample_statistic(x, UNIFORM01), x.size, alpha, "one-sample")


def ks_two_sample(x: SampleLike, y: SampleLike, alpha: float = DEFAULT_ALPHA) -> KsResult:
    alpha = check_alpha(alpha)
    xs = _sorted_sample(x, "first sample")
    ys = _sorted_sample(y, "second sample")
    n, m = xs.size, ys.size
    return _result(two_sample_statistic(xs, ys), n * m / (n + m), alpha, "two-sample")


def ks_transform_test(
    reference: EmpiricalCdf,
    comparison: ArrayLike,
    alpha: float = DEFAULT_ALPHA,
    dither: bool = False,
    seed: Optional[int] = None,
    effective_size: EffectiveSize = "comparison",
    max_workers: Optional[int] = 1,
) -> Tuple[KsResult, TransformReport]:
    """
    Test ``comparison`` against the reference ecdf via its uniformity after
    transformation. The critical value depends on m only; n sets how well
    the reference ecdf approximates the unknown F_0. ``effective_size="pooled"``
    scales by n*m/(n+m) instead, which absorbs the reference's own sampling
    error when m/n is not small.
    """
    alpha = check_alpha(alpha)
    if effective_size not in ("comparison", "pooled"):
        raise InvalidInputError(f"effective_size must be 'comparison' or 'pooled', got {effective_size!r}")
    report = transform_sample(reference, comparison, dither=dither, seed=seed, max_workers=max_workers)
    d = one_sample_statistic(np.sort(report.transformed, kind="stable"), UNIFORM01)
    m, n = report.m, report.n_reference
    n_eff = m if effective_size == "comparison" else n * m / (n + m)
    return _result(d, n_eff, alpha, "transform"), report


def ks_transform_batch(
    reference: EmpiricalCdf,
    windows: Sequence[ArrayLike],
    alpha: float = DEFAULT_ALPHA,
    dither: bool = False,
    seed: Optional[int] = None,
    effective_size: EffectiveSize = "comparison",
    max_workers: Optional[int] = None,
    log_cb: Optional[LogCallback] = None,
) -> Tuple[List[Tuple[KsResult, TransformReport]], Optional[int]]:
    """
    Run the transform test for many comparison windows against one shared
    reference. Window w dithers with ``derive_seed(seed, w)``. Returns the
    per-window results in input order and the master seed actually used.
    """
    alpha = check_alpha(alpha)
    if not windows:
        raise InvalidInputError("at least one comparison window is required")
    master: Optional[int] = None
    if dither:
        master = fresh_seed() if seed is None else int(seed)

    def run(index: int) -> Tuple[KsResult, TransformReport]:
        window_seed = derive_seed(master, index) if master is not None else None
        return ks_transform_test(
            reference, windows[index], alpha=alpha, dither=dither, seed=window_seed, effective_size=effective_size
        )

    workers = min(resolve_workers(max_workers), len(windows))
    _emit(log_cb, f"[TEST] {len(windows)} windows against n={reference.n} with {workers} workers")
    with ThreadPoolExecutor(max_workers=workers) as ex:
        results = list(ex.map(run, range(len(windows))))
    rejected = sum(1 for res, _ in results if res.reject)
    _emit(log_cb, f"[TEST] {rejected}/{len(windows)} windows rejected at alpha={alpha}")
    return results, master


def ks_confidence_band(ecdf: EmpiricalCdf, level: float = 0.95) -> ConfidenceBand:
    level = check_alpha(level, name="level")
    half_width = KOLMOGOROV.quantile(level) / math.sqrt(ecdf.n)
    return ConfidenceBand(level=level, half_width=half_width, n=ecdf.n, ecdf=ecdf)


__all__ = [
    "ConfidenceBand",
    "DEFAULT_ALPHA",
    "KsResult",
    "check_alpha",
    "ks_confidence_band",
    "ks_one_sample",
    "ks_one_sample_uniform",
    "ks_transform_batch",
    "ks_transform_test",
    "ks_two_sample",
    "one_sample_statistic",
    "two_sample_statistic",
]
