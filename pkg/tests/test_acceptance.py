"""Acceptance criteria, each at its stated tolerance and runtime budget.

A one-line verdict per criterion is printed in the pytest terminal summary.
"""
import filecmp
import time

import pytest

from combfol.cli import cmd_run
from combfol.solver import RunConfig, run
from combfol.verify.bootstrap import bootstrap_check, bootstrap_monitor
from combfol.verify.convergence import (energy_identity_check, kg_transform_check,
                                        linear_oracle_check, manufactured_order_check)
from combfol.verify.decay import decay_check
from combfol.verify.geometry import frame_algebra_check, geometry_exactness, inverse_check, jacobian_check
from combfol.verify.identities import commutator_suite, hessian_identity_check, null_structure_check
from combfol.verify.sobolev import sobolev_check

from .conftest import ACCEPTANCE_LINES


def _record(number, title, budget, checks, elapsed):
    ok = all(c.passed for c in checks) and elapsed < budget
    summary = "; ".join(f"{c.name}={c.value:.4g}" if c.value is not None else c.name for c in checks)
    ACCEPTANCE_LINES.append(
        f"{'PASS' if ok else 'FAIL'}  {number:>2}. {title}: {summary} ({elapsed:.1f} s / {budget:g} s)")
    for c in checks:
        assert c.passed, c.details
    assert elapsed < budget


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def test_01_geometry_exactness():
    res, dt = _timed(lambda: [geometry_exactness()])
    _record(1, "geometry exactness", 1.0, res, dt)


def test_02_jacobian_envelope():
    res, dt = _timed(lambda: [jacobian_check()])
    _record(2, "Jacobian envelope and finite differences", 10.0, res, dt)


def test_03_inverse_consistency():
    res, dt = _timed(lambda: [inverse_check()])
    _record(3, "inverse consistency", 10.0, res, dt)


def test_04_frame_algebra():
    def both():
        good = frame_algebra_check()
        control = null_structure_check(((1.0, 0.0), (0.0, 0.0)))
        # the non-null control must be rejected
        control.passed = not control.passed
        control.name = "non_null_control_rejected"
        return [good, control]

    res, dt = _timed(both)
    _record(4, "frame algebra", 1.0, res, dt)


def test_05_commutator_hessian():
    res, dt = _timed(lambda: [commutator_suite(), hessian_identity_check()])
    _record(5, "commutator and Hessian identities", 60.0, res, dt)


def test_06_solver_order():
    res, dt = _timed(lambda: [manufactured_order_check(), linear_oracle_check()])
    _record(6, "solver order and linear oracles", 300.0, res, dt)


def test_07_energy_identities():
    res, dt = _timed(lambda: [energy_identity_check()])
    _record(7, "energy identities", 300.0, res, dt)


def test_08_sobolev_suite():
    res, dt = _timed(lambda: [sobolev_check()])
    _record(8, "Sobolev suite", 120.0, res, dt)


def test_09_kg_decay():
    res, dt = _timed(lambda: [decay_check()])
    _record(9, "Klein-Gordon interior decay", 300.0, res, dt)


def test_10_bootstrap():
    def experiment():
        config = RunConfig()
        ledger = bootstrap_monitor(run(config), s_values=config.s_list)
        return [bootstrap_check(ledger), kg_transform_check(config)]

    res, dt = _timed(experiment)
    assert res[0].details["violations"] == 0
    _record(10, "bootstrap experiment", 900.0, res, dt)


def test_11_determinism(tmp_path):
    def twice():
        paths = []
        for name in ("a", "b"):
            d = tmp_path / name
            d.mkdir()
            cfg = d / "run.cfg"
            cfg.write_text("[output]\ndir = out\n")
            assert cmd_run(cfg) == 0
            paths.append(d / "out" / "energies.csv")
        same = filecmp.cmp(paths[0], paths[1], shallow=False) and paths[0].read_bytes() == paths[1].read_bytes()
        from combfol.verify.report import CheckResult
        return [CheckResult("byte_identical_energies", "identical runs give identical energies.csv", same)]

    res, dt = _timed(twice)
    _record(11, "determinism", 60.0, res, dt)
