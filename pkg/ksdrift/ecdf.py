"""
Empirical distribution functions built from one or many data partitions.

A reference sample is stored in full, sorted. Partitions are sorted
independently (on whatever worker or node holds them) and combined by merging
sorted runs, never by re-sorting the union. The reference ecdf then serves as
the probability-integral transform for a comparison sample.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .distributions import SeededRng, fresh_seed
from .errors import DataFormatError, DataSourceError, EmptySampleError, InvalidDataError, InvalidInputError
from .util import resolve_workers

FloatArray = NDArray[np.float64]

RATIO_THRESHOLD = 0.2
DITHER_BLOCK = 4096
FORMAT_TAG = "ecdf v1"


def as_finite_array(data: ArrayLike, what: str = "sample") -> FloatArray:
    """Validate a 1-D sample: non-empty, every entry finite."""
    try:
        arr = np.asarray(data, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"{what} must be a sequence of real numbers") from exc
    if arr.ndim != 1:
        arr = arr.reshape(-1)
    if arr.size == 0:
        raise EmptySampleError(f"{what} is empty")
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        idx = int(bad[0])
        raise InvalidDataError(idx, float(arr[idx]), f"{what} has non-finite value {arr[idx]!r} at index {idx}")
    return arr


def _frozen(arr: FloatArray) -> FloatArray:
    arr.flags.writeable = False
    return arr


class EmpiricalCdf:
    """The step function F_n(x) = #{x_i <= x} / n over a sorted sample."""

    __slots__ = ("_values",)

    def __init__(self, sorted_values: ArrayLike) -> None:
        arr = np.ascontiguousarray(sorted_values, dtype=np.float64)
        if arr.ndim != 1:
            raise InvalidInputError(f"ecdf values must be one-dimensional, got shape {arr.shape}")
        arr = as_finite_array(arr, what="ecdf values")
        unsorted = np.flatnonzero(np.diff(arr) < 0)
        if unsorted.size:
            raise InvalidInputError(f"ecdf values must be ascending; index {int(unsorted[0]) + 1} breaks the order")
        self._values = _frozen(arr)

    @property
    def values(self) -> FloatArray:
        return self._values

    @property
    def n(self) -> int:
        return int(self._values.size)

    @property
    def minimum(self) -> float:
        return float(self._values[0])

    @property
    def maximum(self) -> float:
        return float(self._values[-1])

    def counts(self, xs: ArrayLike) -> NDArray[np.int64]:
        """#{values <= x} for each x."""
        return np.searchsorted(self._values, np.asarray(xs, dtype=np.float64), side="right")

    def __call__(self, x: float) -> float:
        return ecdf_eval(self, x)

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EmpiricalCdf):
            return NotImplemented
        return bool(np.array_equal(self._values, other._values))

    def __hash__(self) -> int:
        return hash((self.n, self._values.tobytes()))

    def __repr__(self) -> str:
        if self.n <= 6:
            return f"EmpiricalCdf(values={self._values.tolist()}, n={self.n})"
        return f"EmpiricalCdf(n={self.n}, min={self.minimum!r}, max={self.maximum!r})"


@dataclass(frozen=True, eq=False)
class EcdfPartition:
    """One locally sorted run of a partitioned sample."""

    values: FloatArray
    provenance: str = ""

    @property
    def count(self) -> int:
        return int(self.values.size)


@dataclass(eq=False)
class TransformReport:
    """Comparison sample pushed through the reference ecdf."""

    transformed: FloatArray
    m: int
    n_reference: int
    dithered: bool
    seed_used: Optional[int] = None
    ratio: float = field(init=False)
    ratio_warning: bool = field(init=False)

    def __post_init__(self) -> None:
        self.ratio = self.m / self.n_reference
        self.ratio_warning = self.ratio >= RATIO_THRESHOLD

    def summary(self) -> dict:
        return {
            "m": self.m,
            "n_reference": self.n_reference,
            "ratio": self.ratio,
            "ratio_warning": self.ratio_warning,
            "dithered": self.dithered,
            "seed_used": self.seed_used,
        }


def build_ecdf(data: ArrayLike) -> EmpiricalCdf:
    arr = as_finite_array(data)
    return EmpiricalCdf(np.sort(arr, kind="stable"))


def build_partition(data: ArrayLike, provenance: str = "") -> EcdfPartition:
    """Validate and sort one partition; an empty partition is allowed."""
    arr = np.asarray(data, dtype=np.float64).reshape(-1)
    if arr.size:
        arr = as_finite_array(arr, what=f"partition {provenance}".strip())
    return EcdfPartition(_frozen(np.sort(arr, kind="stable")), provenance)


def ecdf_eval(ecdf: EmpiricalCdf, x: float) -> float:
    value = float(x)
    if not math.isfinite(value):
        raise InvalidInputError(f"x must be finite, got {x!r}")
    return int(np.searchsorted(ecdf.values, value, side="right")) / ecdf.n


def ecdf_eval_many(ecdf: EmpiricalCdf, xs: ArrayLike) -> FloatArray:
    arr = np.asarray(xs, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("evaluation points must be finite")
    return ecdf.counts(arr) / ecdf.n


def ecdf_quantile(ecdf: EmpiricalCdf, p: float) -> float:
    """Generalized inverse inf{x : F_n(x) >= p}."""
    if not (0.0 < p <= 1.0):
        raise InvalidInputError(f"p must lie in (0, 1], got {p!r}")
    k = max(1, math.ceil(p * ecdf.n - 1e-12))
    return float(ecdf.values[min(k, ecdf.n) - 1])


def _merge_two(a: FloatArray, b: FloatArray) -> FloatArray:
    """Merge two sorted runs by computing each element's final rank."""
    if a.size == 0:
        return b
    if b.size == 0:
        return a
    out = np.empty(a.size + b.size, dtype=np.float64)
    # ties: elements of a precede equal elements of b
    pos_a = np.arange(a.size) + np.searchsorted(b, a, side="left")
    pos_b = np.arange(b.size) + np.searchsorted(a, b, side="right")
    out[pos_a] = a
    out[pos_b] = b
    return out


def merge_sorted_runs(runs: Sequence[FloatArray]) -> FloatArray:
    """k-way merge as a balanced tree of pairwise merges."""
    level: List[FloatArray] = [r for r in runs if r.size]
    if not level:
        return np.empty(0, dtype=np.float64)
    while len(level) > 1:
        merged = [_merge_two(level[i], level[i + 1]) for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            merged.append(level[-1])
        level = merged
    return level[0]


def merge_partitions(parts: Iterable[EcdfPartition]) -> EmpiricalCdf:
    runs = [p.values for p in parts]
    if sum(r.size for r in runs) == 0:
        raise EmptySampleError("every partition is empty")
    return EmpiricalCdf(merge_sorted_runs(runs).copy())


def max_comparison_size(n_reference: int, threshold: float = RATIO_THRESHOLD) -> int:
    """Largest m with m / n_reference < threshold."""
    if n_reference < 1:
        raise InvalidInputError(f"n_reference must be >= 1, got {n_reference!r}")
    m = max(0, math.ceil(threshold * n_reference) - 1)
    # settle float rounding at the boundary against the exact ratio test
    while (m + 1) / n_reference < threshold:
        m += 1
    while m > 0 and m / n_reference >= threshold:
        m -= 1
    return m


def _dither_block(
    counts: NDArray[np.int64], n: int, stream: SeededRng, start: int, stop: int, out: FloatArray
) -> None:
    k = counts[start:stop]
    u = stream.child(start // DITHER_BLOCK).uniforms(stop - start)
    out[start:stop] = np.where(k >= 1, (k - u) / n, 0.0)


def transform_sample(
    reference: EmpiricalCdf,
    comparison: ArrayLike,
    dither: bool = False,
    seed: Optional[int] = None,
    max_workers: Optional[int] = 1,
) -> TransformReport:
    """
    Map each comparison value y_j to F_n(y_j) on the reference ecdf.

    With ``dither`` the value lands uniformly inside its ecdf step,
    (k_j - U_j) / n with k_j = #{x_i <= y_j}, which keeps it in
    ((k_j - 1)/n, k_j/n] and breaks ties. Values below the reference support
    (k_j = 0) map to exactly 0 either way. Element j always consumes draw
    j mod DITHER_BLOCK of block stream j div DITHER_BLOCK, so results do not
    depend on ``max_workers``.
    """
    y = as_finite_array(comparison, what="comparison sample")
    n = reference.n
    counts = reference.counts(y)
    seed_used: Optional[int] = None
    if not dither:
        transformed = counts / n
    else:
        seed_used = fresh_seed() if seed is None else int(seed)
        stream = SeededRng(seed_used)
        transformed = np.empty(y.size, dtype=np.float64)
        bounds = [(s, min(s + DITHER_BLOCK, y.size)) for s in range(0, y.size, DITHER_BLOCK)]
        workers = min(resolve_workers(max_workers), len(bounds))
        if workers <= 1:
            for start, stop in bounds:
                _dither_block(counts, n, stream, start, stop, transformed)
        else:
            with ThreadPoolExecutor(max_workers=workers) as ex:
                futures = [ex.submit(_dither_block, counts, n, stream, s, e, transformed) for s, e in bounds]
                for fut in futures:
                    fut.result()
    return TransformReport(
        transformed=_frozen(np.asarray(transformed, dtype=np.float64)),
        m=int(y.size),
        n_reference=n,
        dithered=bool(dither),
        seed_used=seed_used,
    )


def save_ecdf(ecdf: EmpiricalCdf, path: Union[str, Path]) -> Path:
    """Write the ``ecdf v1`` text format: header, then one value per line."""
    target = Path(path)
    lines = [f"{FORMAT_TAG} n={ecdf.n}"]
    lines.extend(repr(v) for v in ecdf.values.tolist())
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    except OSError as exc:
        raise DataSourceError(target, exc.strerror or str(exc), action="write") from exc
    return target


def load_ecdf(path: Union[str, Path]) -> EmpiricalCdf:
    source = Path(path)
    try:
        text = source.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataSourceError(source, exc.strerror or str(exc)) from exc
    lines = text.splitlines()
    if not lines:
        raise DataFormatError(source, 1, "empty file, expected an 'ecdf v1 n=<count>' header")
    header = lines[0].strip()
    prefix = f"{FORMAT_TAG} n="
    if not header.startswith(prefix):
        raise DataFormatError(source, 1, f"bad header {header!r}, expected '{prefix}<count>'")
    try:
        n = int(header[len(prefix):])
    except ValueError as exc:
        raise DataFormatError(source, 1, f"bad count in header {header!r}") from exc
    body = [ln.strip() for ln in lines[1:]]
    while body and not body[-1]:
        body.pop()
    if len(body) != n:
        raise DataFormatError(source, 1, f"header declares n={n} but file holds {len(body)} values")
    if n < 1:
        raise DataFormatError(source, 1, "an ecdf needs at least one value")
    values = np.empty(n, dtype=np.float64)
    for i, token in enumerate(body):
        try:
            v = float(token)
        except ValueError as exc:
            raise DataFormatError(source, i + 2, f"not a number: {token!r}") from exc
        if not math.isfinite(v):
            raise DataFormatError(source, i + 2, f"non-finite value {token!r}")
        values[i] = v
    unsorted = np.flatnonzero(np.diff(values) < 0)
    if unsorted.size:
        raise DataFormatError(source, int(unsorted[0]) + 3, "values are not in ascending order")
    return EmpiricalCdf(values)


__all__ = [
    "DITHER_BLOCK",
    "EcdfPartition",
    "EmpiricalCdf",
    "RATIO_THRESHOLD",
    "TransformReport",
    "as_finite_array",
    "build_ecdf",
    "build_partition",
    "ecdf_eval",
    "ecdf_eval_many",
    "ecdf_quantile",
    "load_ecdf",
    "max_comparison_size",
    "merge_partitions",
    "merge_sorted_runs",
    "save_ecdf",
    "transform_sample",
]
