"""Machine-readable run reports emitted by the command-line front end."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import yaml

from .ecdf import RATIO_THRESHOLD, TransformReport
from .kstests import KsResult


def ratio_warning_text(report: TransformReport) -> str:
    return (
        f"ratio m/n = {report.ratio:.6g} (m={report.m}, n={report.n_reference}) is not below "
        f"the recommended threshold {RATIO_THRESHOLD}; the reference ecdf may be too coarse for this comparison size"
    )


@dataclass
class RunReport:
    command: str
    verdict: KsResult
    transform: Optional[TransformReport] = None
    inputs: Dict[str, Any] = field(default_factory=dict)
    timing: Dict[str, float] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)
    seed: Optional[int] = None
    extra: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.transform is not None and self.transform.ratio_warning:
            text = ratio_warning_text(self.transform)
            if text not in self.warnings:
                self.warnings.append(text)

    def as_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        doc: Dict[str, Any] = {"command": self.command}
        doc.update(_plain(self.verdict.as_dict()))
        doc["seed"] = self.seed
        if self.transform is not None:
            doc["transform"] = _plain(self.transform.summary())
        doc.update(_plain(self.extra))
        doc["inputs"] = _plain(self.inputs)
        doc["warnings"] = list(self.warnings)
        if include_timing:
            doc["timing_ms"] = _plain(self.timing)
        return doc

    def render(self, include_timing: bool = True) -> str:
        return render_document(self.as_dict(include_timing=include_timing))


def _plain(value: Any) -> Any:
    """numpy scalars and tuples to plain YAML-safe types."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if hasattr(value, "item") and callable(value.item):
        return value.item()
    return value


def render_document(doc: Dict[str, Any]) -> str:
    return yaml.safe_dump(_plain(doc), sort_keys=False, default_flow_style=False, allow_unicode=False)
