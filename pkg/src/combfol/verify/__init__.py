"""Executable checks of the geometric identities, energy estimates, Sobolev bounds,
decay rates and the bootstrap hierarchy."""
from .bootstrap import BootstrapLedger, LedgerRow, bootstrap_check, bootstrap_monitor, measure_C0
from .convergence import (energy_identity_check, kg_transform_check, linear_oracle_check,
                          manufactured_order_check)
from .decay import DecayFit, InsufficientRange, decay_check, decay_probe
from .geometry import geometry_checks, jacobian_envelope
from .identities import commutator_suite, hessian_identity_check, null_structure_check
from .report import CheckResult, read_report, write_report
from .sobolev import sobolev_check, sobolev_suite
from .suite import GROUPS, RUN_GROUPS, RunRequired, parse_groups, run_checks

__all__ = [
    "BootstrapLedger", "LedgerRow", "bootstrap_check", "bootstrap_monitor", "measure_C0",
    "energy_identity_check", "kg_transform_check", "linear_oracle_check", "manufactured_order_check",
    "DecayFit", "InsufficientRange", "decay_check", "decay_probe",
    "geometry_checks", "jacobian_envelope",
    "commutator_suite", "hessian_identity_check", "null_structure_check",
    "CheckResult", "read_report", "write_report",
    "sobolev_check", "sobolev_suite",
    "GROUPS", "RUN_GROUPS", "RunRequired", "parse_groups", "run_checks",
]
