"""
Numeric data ingestion from partition files.

Each path of a DatasetSpec is one partition. Partitions are parsed, validated
and sorted independently on a thread pool, then k-way merged into one
EmpiricalCdf. Tokens follow a locale-independent grammar: decimal or
scientific notation with a dot separator; anything else (including nan/inf)
is a missing value.
"""
from __future__ import annotations

import re
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, List, Literal, Optional, Tuple, Union

import numpy as np
import pyarrow as pa
from pyarrow import csv as pa_csv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .ecdf import EcdfPartition, EmpiricalCdf, build_partition, merge_partitions
from .errors import DataFormatError, DataSourceError, EmptySampleError, InvalidInputError
from .util import LogCallback, ProgressCallback, _emit, resolve_workers

NUMBER_RE = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")

MissingPolicy = Literal["error", "skip"]


class DatasetSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    paths: List[Path] = Field(min_length=1)
    format: Literal["lines", "csv"] = "lines"
    column: Optional[Union[int, str]] = None
    missing_policy: MissingPolicy = "error"

    @model_validator(mode="after")
    def _column_iff_csv(self) -> "DatasetSpec":
        if self.format == "csv" and self.column is None:
            raise ValueError("csv format needs a column selector (name or 0-based index)")
        if self.format == "lines" and self.column is not None:
            raise ValueError("a column selector is only valid with csv format")
        return self

    @classmethod
    def create(cls, **fields) -> "DatasetSpec":
        try:
            return cls(**fields)
        except ValidationError as exc:
            msgs = "; ".join(str(err.get("msg")) for err in exc.errors())
            raise InvalidInputError(f"invalid dataset: {msgs}") from exc

    def echo(self) -> dict:
        return {
            "paths": [str(p) for p in self.paths],
            "format": self.format,
            "column": self.column,
            "missing_policy": self.missing_policy,
        }


@dataclass
class PartitionLoad:
    path: Path
    partition: EcdfPartition
    skipped: int = 0


@dataclass
class DatasetLoad:
    spec: DatasetSpec
    partitions: List[PartitionLoad] = field(default_factory=list)

    @property
    def skipped(self) -> int:
        return sum(p.skipped for p in self.partitions)

    @property
    def count(self) -> int:
        return sum(p.partition.count for p in self.partitions)

    def to_ecdf(self) -> EmpiricalCdf:
        return merge_partitions(p.partition for p in self.partitions)

    def warnings(self) -> List[str]:
        out = []
        for p in self.partitions:
            if p.skipped:
                out.append(f"skipped {p.skipped} non-numeric value(s) in {p.path}")
        return out


def parse_token(token: str) -> Optional[float]:
    """A finite float, or None when the token is not a number in the accepted grammar."""
    text = token.strip()
    if not NUMBER_RE.fullmatch(text):
        return None
    value = float(text)
    # overflow like 1e999 parses to inf
    return value if np.isfinite(value) else None


def _parse_tokens(
    path: Path, tokens: Iterable[Tuple[int, str]], policy: MissingPolicy
) -> Tuple[List[float], int]:
    values: List[float] = []
    skipped = 0
    for line_number, token in tokens:
        value = parse_token(token)
        if value is None:
            if policy == "error":
                raise DataFormatError(path, line_number, f"not a number: {token.strip()!r}")
            skipped += 1
            continue
        values.append(value)
    return values, skipped


def _line_tokens(path: Path) -> List[Tuple[int, str]]:
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise DataSourceError(path, getattr(exc, "strerror", None) or str(exc)) from exc
    return [(i, line) for i, line in enumerate(text.splitlines(), start=1) if line.strip()]


def _csv_tokens(path: Path, column: Union[int, str]) -> List[Tuple[int, str]]:
    if not path.is_file():
        raise DataSourceError(path, "no such file")
    try:
        if path.stat().st_size == 0:
            # no header and no rows: an empty partition, as for the lines format
            return []
        names = pa_csv.open_csv(str(path)).schema.names
    except OSError as exc:
        raise DataSourceError(path, exc.strerror or str(exc)) from exc
    except pa.ArrowInvalid as exc:
        raise DataFormatError(path, 1, str(exc)) from exc
    if isinstance(column, int) or (isinstance(column, str) and column.isdigit() and column not in names):
        idx = int(column)
        if idx < 0 or idx >= len(names):
            raise DataFormatError(path, 1, f"column index {idx} out of range ({len(names)} columns)")
        name = names[idx]
    else:
        if column not in names:
            raise DataFormatError(path, 1, f"no column named {column!r}")
        name = column
    try:
        table = pa_csv.read_csv(
            str(path),
            convert_options=pa_csv.ConvertOptions(
                include_columns=[name],
                column_types={name: pa.string()},
                strings_can_be_null=False,
                quoted_strings_can_be_null=False,
            ),
        )
    except (OSError, pa.ArrowInvalid) as exc:
        raise DataFormatError(path, 1, str(exc)) from exc
    # header is line 1
    return [(i, cell or "") for i, cell in enumerate(table.column(name).to_pylist(), start=2)]


def read_partition(path: Union[str, Path], spec: DatasetSpec) -> PartitionLoad:
    source = Path(path)
    if spec.format == "csv":
        assert spec.column is not None
        tokens = _csv_tokens(source, spec.column)
    else:
        tokens = _line_tokens(source)
    values, skipped = _parse_tokens(source, tokens, spec.missing_policy)
    return PartitionLoad(path=source, partition=build_partition(values, provenance=str(source)), skipped=skipped)


def load_dataset(
    spec: DatasetSpec,
    max_workers: Optional[int] = None,
    progress_cb: Optional[ProgressCallback] = None,
    log_cb: Optional[LogCallback] = None,
) -> DatasetLoad:
    """Read every partition concurrently; results keep the order of ``spec.paths``."""
    total = len(spec.paths)
    workers = min(resolve_workers(max_workers), total)
    _emit(log_cb, f"[INGEST] {total} partition(s), format={spec.format}, workers={workers}")
    _emit(progress_cb, "ingest", 0, total, "Reading partitions")

    slots: List[Optional[PartitionLoad]] = [None] * total
    with ThreadPoolExecutor(max_workers=workers) as ex:
        futures = {ex.submit(read_partition, p, spec): i for i, p in enumerate(spec.paths)}
        done = 0
        for fut in as_completed(futures):
            # the first failure cancels the rest and propagates
            try:
                load = fut.result()
            except Exception:
                for other in futures:
                    other.cancel()
                raise
            slots[futures[fut]] = load
            done += 1
            _emit(progress_cb, "ingest", done, total, f"Read {done}/{total} partitions")
            _emit(log_cb, f"[INGEST] {load.path}: {load.partition.count} values, {load.skipped} skipped")

    result = DatasetLoad(spec=spec, partitions=[s for s in slots if s is not None])
    if result.count == 0:
        raise EmptySampleError(f"no numeric values in {', '.join(str(p) for p in spec.paths)}")
    return result


__all__ = [
    "DatasetLoad",
    "DatasetSpec",
    "PartitionLoad",
    "load_dataset",
    "parse_token",
    "read_partition",
]
