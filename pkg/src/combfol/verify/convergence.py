"""Grid-refinement studies of the solver and of the integrated energy identities.

* manufactured solution: the full nonlinear system with exact forcing;
* free wave: d'Alembert's formula for Gaussian data;
* free Klein-Gordon: a travelling plane wave on a periodic grid;
* energy identities: interior and exterior balances on runs at three
  resolutions, with the exterior dissipation checked on every slice step;
* Klein-Gordon normal form: the ``w = v - Q / c^2`` equation residual.
"""
from __future__ import annotations

import math
from typing import Dict, List, Sequence, Tuple

import numpy as np
import sympy as sp

from ..energy import energy_identity_residual
from ..solver import ModelParams, RunConfig, RunRecord, kg_transform, manufactured_forcing, run
from .report import CheckResult, slope

__all__ = [
    "MMS_U",
    "MMS_V",
    "manufactured_errors",
    "manufactured_order_check",
    "free_wave_errors",
    "free_kg_errors",
    "linear_oracle_check",
    "energy_identity_table",
    "energy_identity_check",
    "kg_transform_check",
]

_t, _x = sp.symbols("t x", real=True)
MMS_U = sp.exp(-(_x - sp.Rational(1, 2)) ** 2 / 4) * sp.cos(_t - _x / 3)
MMS_V = sp.exp(-(_x + sp.Rational(1, 2)) ** 2 / 3) * sp.sin(sp.Rational(6, 5) * _t + _x / 2)

_FREE = ModelParams(N=((0.0, 0.0), (0.0, 0.0)), cubic=False)


def _order_result(name, claim, hs, errs, target, width, extra=None) -> CheckResult:
    p = slope(hs, errs)
    return CheckResult(name, claim, bool(abs(p - target) <= width), value=p, tolerance=width,
                       details={"h": list(hs), "errors": list(errs), **(extra or {})})


def manufactured_errors(dx: float, params: ModelParams = ModelParams(), t_end: float = 4.0,
                        halfwidth: float = 12.0) -> float:
    """Max error of ``(u, v)`` over all stored levels up to ``t_end``."""
    prob = manufactured_forcing(MMS_U, MMS_V, params)
    cfg = RunConfig(params=params, dx=dx, halfwidth=halfwidth, t_max=t_end, forcing=prob.forcing,
                    initial=lambda x: prob.initial(x))
    rec = run(cfg)
    err = 0.0
    for n, t in enumerate(rec.times):
        if t < 2.0 - 1e-12 or t > t_end + 1e-12:
            continue
        u, _, v, _ = prob.exact(float(t), rec.x)
        err = max(err, float(np.max(np.abs(rec.U[n] - u))), float(np.max(np.abs(rec.V[n] - v))))
    return err


def manufactured_order_check(hs: Sequence[float] = (0.08, 0.04, 0.02), target: float = 2.0,
                             width: float = 0.3) -> CheckResult:
    errs = [manufactured_errors(h) for h in hs]
    return _order_result("solver_order", "second-order convergence to a manufactured solution",
                         hs, errs, target, width)


def free_wave_errors(dx: float, t_end: float = 6.0) -> float:
    """Max error of ``u`` against ``(f(x - t') + f(x + t')) / 2``, ``f = exp(-x^2)``, ``t' = t - 2``."""
    def data(x):
        z = np.zeros_like(x)
        return np.exp(-x * x), z, z, z

    rec = run(RunConfig(params=_FREE, dx=dx, halfwidth=16.0, t_max=t_end, initial=data))
    err = 0.0
    for n, t in enumerate(rec.times):
        if t < 2.0 - 1e-12 or t > t_end + 1e-12:
            continue
        tau = t - 2.0
        exact = 0.5 * (np.exp(-(rec.x - tau) ** 2) + np.exp(-(rec.x + tau) ** 2))
        err = max(err, float(np.max(np.abs(rec.U[n] - exact))))
    return err


def free_kg_errors(cells: int, t_end: float = 6.0, k: float = 1.0) -> float:
    """Max error of ``v`` against ``cos(k x - omega t')`` on a periodic grid of ``2 cells`` points."""
    c = _FREE.c
    omega = math.sqrt(k * k + c * c)
    half = 4.0 * math.pi / k
    dx = half / cells

    def data(x):
        z = np.zeros_like(x)
        return z, z, np.cos(k * x), omega * np.sin(k * x)

    rec = run(RunConfig(params=_FREE, dx=dx, halfwidth=half - 1e-9 * dx, t_max=t_end, initial=data,
                        boundary="periodic"))
    err = 0.0
    for n, t in enumerate(rec.times):
        if t < 2.0 - 1e-12 or t > t_end + 1e-12:
            continue
        exact = np.cos(k * rec.x - omega * (t - 2.0))
        err = max(err, float(np.max(np.abs(rec.V[n] - exact))))
    return err


def linear_oracle_check(hs: Sequence[float] = (0.08, 0.04, 0.02), cells: Sequence[int] = (160, 320, 640),
                        target: float = 2.0, width: float = 0.3) -> CheckResult:
    wave = [free_wave_errors(h) for h in hs]
    kg_h = [4.0 * math.pi / n for n in cells]
    kg = [free_kg_errors(n) for n in cells]
    pw, pk = slope(hs, wave), slope(kg_h, kg)
    ok = abs(pw - target) <= width and abs(pk - target) <= width
    return CheckResult("linear_oracles", "free wave and free Klein-Gordon solutions at second order",
                       bool(ok), value=min(pw, pk), tolerance=width,
                       details={"wave_h": list(hs), "wave_errors": wave, "wave_slope": pw,
                                "kg_h": kg_h, "kg_errors": kg, "kg_slope": pk})


_IDENTITY_CASES = (
    # (label, run kind, field, which, mass)
    ("free wave, interior", "free", "u", "Interior", 0.0),
    ("free Klein-Gordon, interior", "free", "v", "Interior", 1.0),
    ("free wave, exterior", "free", "u", "Exterior", 0.0),
    ("free Klein-Gordon, exterior", "free", "v", "Exterior", 1.0),
    ("coupled wave, exterior", "coupled", "u", "Exterior", 0.0),
    ("coupled Klein-Gordon, exterior", "coupled", "v", "Exterior", 1.0),
)


def energy_identity_table(dx: float, s_list: Sequence[float] = (2.0, 2.4, 2.8, 3.2, 3.6, 4.0)
                          ) -> Dict[str, Dict[str, object]]:
    """Whole-range residuals and per-step dissipations for each case at spacing ``dx``."""
    runs = {
        "free": run(RunConfig(params=_FREE, dx=dx, s_list=tuple(s_list))),
        "coupled": run(RunConfig(dx=dx, s_list=tuple(s_list))),
    }
    out = {}
    for label, kind, fld, which, mass in _IDENTITY_CASES:
        rec = runs[kind]
        c = mass * rec.params.c
        hist, src = rec.history(fld), rec.history("f" + fld)
        total = energy_identity_residual(hist, src, s_list[0], s_list[-1], which, rec.params.gamma, c)
        diss = []
        if which == "Exterior":
            for a, b in zip(s_list[:-1], s_list[1:]):
                diss.append(energy_identity_residual(hist, src, a, b, which, rec.params.gamma, c).dissipation)
        out[label] = {"residual": total.residual, "lhs": total.lhs, "rhs": total.rhs,
                      "step_dissipation": diss}
    return out


def energy_identity_check(hs: Sequence[float] = (0.04, 0.02, 0.01), target: float = 2.0,
                          width: float = 0.3) -> CheckResult:
    tables = [energy_identity_table(h) for h in hs]
    slopes, dissipative = {}, True
    for label in tables[0]:
        slopes[label] = slope(hs, [tab[label]["residual"] for tab in tables])
        for tab in tables:
            dissipative &= all(d >= 0.0 for d in tab[label]["step_dissipation"])
    ok = dissipative and all(abs(p - target) <= width for p in slopes.values())
    return CheckResult(
        "energy_identities", "interior flux balance and exterior weighted identity",
        bool(ok), value=min(slopes.values()), tolerance=width,
        details={"h": list(hs), "slopes": slopes, "dissipation_nonnegative": bool(dissipative),
                 "residuals": {k: [tab[k]["residual"] for tab in tables] for k in tables[0]}},
    )


def kg_transform_check(config: RunConfig = None, hs: Sequence[float] = (0.04, 0.02, 0.01),
                       t_range: Tuple[float, float] = None, target: float = 2.0,
                       width: float = 0.3) -> CheckResult:
    """Max residual of the normal-form equation for ``w`` over ``t_range`` at each spacing."""
    config = config or RunConfig()
    errs: List[float] = []
    for h in hs:
        cfg = RunConfig(**{**config.__dict__, "dx": h})
        rec = run(cfg)
        lo, hi = t_range or (2.5, rec.t_end - 0.5)
        _, _, res = kg_transform(rec, (lo, hi), order=2)
        errs.append(float(np.max(np.abs(res))))
    return _order_result("kg_transform", "residual of the Klein-Gordon normal-form equation",
                         hs, errs, target, width)
