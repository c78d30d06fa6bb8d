"""Fitted decay exponents of sup-norms along a stored run.

``interior``
    ``sup_{|x| <= t - 1} |v|`` against ``t`` (claimed rate ``t^{-1/2}``).
``exterior``
    On each slice ``F_s``, ``sup (1 + r) |null_d1 u|`` over ``|x| >= (s^2 - 1)/2``
    against ``s`` (claimed bounded, exponent ``<= 0``).

Fits are ordinary least squares of ``log sup`` on ``log`` of the scale
variable with the standard error of the slope; an identically zero field
is reported as "no signal" instead of a fit.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import linregress

from ..energy import SliceSample
from ..foliation import cone_radius
from ..solver import ModelParams, RunConfig, RunRecord, run
from .report import CheckResult

__all__ = ["InsufficientRange", "DecayFit", "decay_probe", "free_kg_record", "decay_check"]

_SILENT = 1e-300


class InsufficientRange(ValueError):
    """The sampled scale variable does not span a factor of two."""


@dataclass(frozen=True)
class DecayFit:
    quantity: str
    variable: str
    claim: str
    claimed: float
    exponent: Optional[float]
    stderr: Optional[float]
    samples: int
    signal: bool

    def describe(self) -> str:
        if not self.signal:
            return f"{self.quantity}: no signal"
        return (f"{self.quantity} ~ {self.variable}^({self.exponent:.4f} +- {self.stderr:.4f}) "
                f"[claimed {self.claimed:g}]")


def _fit(quantity, variable, claim, claimed, scale, sup) -> DecayFit:
    scale = np.asarray(scale, dtype=float)
    sup = np.asarray(sup, dtype=float)
    if not np.all(sup > _SILENT):
        return DecayFit(quantity, variable, claim, claimed, None, None, int(scale.size), False)
    fit = linregress(np.log(scale), np.log(sup))
    return DecayFit(quantity, variable, claim, claimed, float(fit.slope), float(fit.stderr),
                    int(scale.size), True)


def _require_range(lo: float, hi: float) -> None:
    if hi < 2.0 * lo:
        raise InsufficientRange(f"range [{lo:g}, {hi:g}] spans less than a factor of 2")


def decay_probe(record: RunRecord, mode: str = "interior", t_range: Tuple[float, float] = (4.0, 40.0),
                s_values: Optional[Sequence[float]] = None, samples: int = 60) -> List[DecayFit]:
    """Sup-norm fits for ``mode`` in ``{"interior", "exterior"}``."""
    if mode == "interior":
        lo, hi = t_range
        _require_range(lo, hi)
        if hi > record.t_end or lo < record.t_start:
            raise InsufficientRange(f"run covers t <= {record.t_end:g}, need [{lo:g}, {hi:g}]")
        ts = np.geomspace(lo, hi, samples)
        levels = [record.level(t) for t in ts]
        ts = record.times[levels]
        sup = [float(np.max(np.abs(record.V[n][np.abs(record.x) <= t - 1.0]))) for n, t in zip(levels, ts)]
        return [_fit("sup |v|, |x| <= t - 1", "t", "interior Klein-Gordon rate t^(-1/2)", -0.5, ts, sup)]
    if mode == "exterior":
        if s_values is None:
            raise ValueError("exterior mode needs the slice parameters s_values")
        s_values = np.asarray(sorted(s_values), dtype=float)
        _require_range(float(s_values[0]), float(s_values[-1]))
        sup = []
        for s in s_values:
            smp = SliceSample(record.u, float(s), 1)
            keep = np.abs(smp.x) >= float(cone_radius(s))
            null = np.sign(smp.x) * smp.partials[(1, 0)] + smp.partials[(0, 1)]
            sup.append(float(np.max((1.0 + np.abs(smp.x[keep])) * np.abs(null[keep]))))
        return [_fit("sup (1 + r)|null_d1 u|, transition and flat parts", "s",
                     "weighted null derivative of the wave stays bounded", 0.0, s_values, sup)]
    raise ValueError(f"unknown mode {mode!r}")


def free_kg_record(dx: float = 0.05, t_max: float = 40.5, epsilon: float = 1e-3) -> RunRecord:
    """Free Klein-Gordon run (``N = 0``, no cubic term) with the default localized data."""
    params = ModelParams(N=((0.0, 0.0), (0.0, 0.0)), cubic=False, epsilon=epsilon)
    return run(RunConfig(params=params, dx=dx, t_max=t_max))


def decay_check(record: Optional[RunRecord] = None, tol: float = 0.1) -> CheckResult:
    record = free_kg_record() if record is None else record
    fit = decay_probe(record, "interior")[0]
    ok = fit.signal and abs(fit.exponent - fit.claimed) <= tol
    return CheckResult(
        "kg_decay", fit.claim, bool(ok), value=fit.exponent, tolerance=tol,
        details={"stderr": fit.stderr, "samples": fit.samples, "fit": fit.describe()},
    )
