"""Named groups of checks and a runner that assembles them in a fixed order."""
from __future__ import annotations

from typing import Callable, Dict, List, Optional, Sequence

from ..solver import RunConfig, RunRecord
from .bootstrap import bootstrap_check, bootstrap_monitor
from .convergence import (energy_identity_check, kg_transform_check, linear_oracle_check,
                          manufactured_order_check)
from .decay import decay_check
from .geometry import geometry_checks
from .identities import commutator_suite, hessian_identity_check, null_structure_check
from .report import CheckResult
from .sobolev import sobolev_check

__all__ = ["GROUPS", "RUN_GROUPS", "RunRequired", "run_checks", "parse_groups"]


class RunRequired(ValueError):
    """A selected group needs the record of a prior run."""


def _bootstrap(record: RunRecord, config: RunConfig) -> List[CheckResult]:
    ledger = bootstrap_monitor(record, s_values=config.s_list)
    return [bootstrap_check(ledger), kg_transform_check(config)]


GROUPS: Dict[str, Callable[..., List[CheckResult]]] = {
    "geometry": lambda: geometry_checks(),
    "identities": lambda: [commutator_suite(), hessian_identity_check(), null_structure_check()],
    "sobolev": lambda: [sobolev_check()],
    "decay": lambda: [decay_check()],
    "solver": lambda: [manufactured_order_check(), linear_oracle_check()],
    "energy": lambda: [energy_identity_check()],
    "bootstrap": _bootstrap,
}
RUN_GROUPS = frozenset({"bootstrap"})


def parse_groups(selector: str) -> List[str]:
    """``"all"`` or a comma-separated subset of :data:`GROUPS`, returned in canonical order."""
    names = [s.strip() for s in selector.split(",") if s.strip()]
    if not names or names == ["all"]:
        return list(GROUPS)
    unknown = [n for n in names if n not in GROUPS]
    if unknown:
        raise KeyError(f"unknown check group(s) {unknown}; expected 'all' or any of {list(GROUPS)}")
    return [g for g in GROUPS if g in names]


def run_checks(groups: Sequence[str], record: Optional[RunRecord] = None,
               config: Optional[RunConfig] = None) -> List[CheckResult]:
    missing = [g for g in groups if g in RUN_GROUPS]
    if missing and (record is None or config is None):
        raise RunRequired(f"group(s) {missing} need a run directory (run the 'run' subcommand first)")
    results: List[CheckResult] = []
    for g in groups:
        fn = GROUPS[g]
        results.extend(fn(record, config) if g in RUN_GROUPS else fn())
    return results
