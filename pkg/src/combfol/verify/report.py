"""Check records and the JSON verification report."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

import numpy as np

__all__ = ["CheckResult", "write_report", "read_report", "slope"]


@dataclass
class CheckResult:
    """Outcome of one executable check.

    ``claim`` names the analytic statement the check instantiates, ``lhs`` and
    ``rhs`` are the compared quantities and ``value`` the headline number
    (ratio, residual or fitted exponent).
    """

    name: str
    claim: str
    passed: bool
    value: Optional[float] = None
    lhs: Optional[float] = None
    rhs: Optional[float] = None
    tolerance: Optional[float] = None
    details: Dict[str, Any] = field(default_factory=dict)

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        val = "" if self.value is None else f" value={self.value:.6g}"
        return f"[{verdict}] {self.name}:{val} ({self.claim})"


def _clean(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else repr(obj)
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item"):
        return _clean(obj.item())
    return obj


def write_report(path, results: Iterable[CheckResult]) -> Dict[str, Any]:
    """Write ``{"checks": [...], "all_passed": bool}``; output is byte-stable for equal input."""
    records = [_clean(asdict(r)) for r in results]
    doc = {"all_passed": all(r["passed"] for r in records), "checks": records}
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return doc


def read_report(path) -> Dict[str, Any]:
    return json.loads(Path(path).read_text())


def slope(hs: List[float], errs: List[float]) -> float:
    """Least-squares slope of ``log err`` against ``log h``."""
    lh = np.log(np.asarray(hs, dtype=float))
    le = np.log(np.asarray(errs, dtype=float))
    return float(np.polyfit(lh, le, 1)[0])
