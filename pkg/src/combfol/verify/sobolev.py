"""Empirical constants of the four Sobolev-type inequalities on a seeded corpus.

Inequalities, each as a ratio ``LHS / RHS`` maximised over sample points:

``basic``
    ``|u(x)|^2`` against ``int_x^{x+1} (u^2 + u'^2) dy`` on the line.
``global``
    ``t u^2`` against ``||u||^2 + ||Lu||^2`` over the hyperbolic part of ``F_s``.
``transition``
    ``|u(T(s,x), x)|^2`` against ``||tangent_d1 u||^2 + ||u||^2`` over ``T_s``.
``exterior``
    ``|(1 + w) u|^2`` against ``||(1 + w) d_x u||^2 + ||(1 + w) u||^2`` over ``P_s``.

All norms are ``L^2(dx)`` along the slice. The first, third and fourth ratios
have closed-form ceilings: restricted to an interval ``[a, b]`` the sharp
constant at ``x`` is ``cosh(x - a) cosh(b - x) / sinh(b - a)``, at most
``coth(1)`` for unit length and ``1`` on a half-line; the exterior weight
adds ``max(1 + 2K^2, 2)`` with ``K = sup d_x w / (1 + w)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid

from ..foliation import T_flat, T_of, cone_radius, dT_dx, flat_radius
from ..weights import weight
from .report import CheckResult

__all__ = [
    "CorpusFunction",
    "make_corpus",
    "basic_ratio",
    "global_ratio",
    "transition_ratio",
    "exterior_ratio",
    "exterior_ceiling",
    "SobolevResult",
    "sobolev_suite",
    "sobolev_check",
    "BASIC_CEILING",
    "INEQUALITIES",
]

BASIC_CEILING = 1.0 / np.tanh(1.0)
INEQUALITIES = ("basic", "global", "transition", "exterior")


@dataclass(frozen=True)
class CorpusFunction:
    """``A exp(-(x - x0)^2 / (2 sigma^2)) cos(omega t - k x + phi)`` with ``x0 = anchor + offset``.

    ``offset`` is measured from an anchor chosen per inequality and slice so
    that each member actually meets the region it is tested on.
    """

    amplitude: float
    offset: float
    sigma: float
    omega: float
    k: float
    phase: float

    def scaled(self, lam: float) -> "CorpusFunction":
        return CorpusFunction(lam * self.amplitude, self.offset, self.sigma, self.omega, self.k,
                              self.phase)

    def jet(self, t, x, anchor: float = 0.0):
        """``(u, u_t, u_x)`` at ``(t, x)``."""
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        y = x - (anchor + self.offset)
        g = self.amplitude * np.exp(-0.5 * y * y / self.sigma**2)
        arg = self.omega * t - self.k * x + self.phase
        c, s = np.cos(arg), np.sin(arg)
        u = g * c
        ut = -self.omega * g * s
        ux = g * (-(y / self.sigma**2) * c + self.k * s)
        return u, ut, ux


def make_corpus(n: int = 50, seed: int = 2024) -> List[CorpusFunction]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        out.append(CorpusFunction(
            amplitude=float(rng.uniform(0.5, 2.0)),
            offset=float(rng.uniform(-1.0, 1.0)),
            sigma=float(rng.uniform(0.3, 1.5)),
            omega=float(rng.uniform(-2.0, 2.0)),
            k=float(rng.uniform(-2.0, 2.0)),
            phase=float(rng.uniform(0.0, 2.0 * np.pi)),
        ))
    return out


def _safe_ratio(num: np.ndarray, den) -> float:
    num = np.asarray(num, dtype=float)
    den = np.broadcast_to(np.asarray(den, dtype=float), num.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(num == 0.0, 0.0, num / den)
    return float(np.max(r))


def _grid(lo: float, hi: float, dx: float) -> np.ndarray:
    n = int(round((hi - lo) / dx))
    return lo + (hi - lo) * np.arange(n + 1) / n


def basic_ratio(f: CorpusFunction, dx: float, reach: float = 8.0) -> float:
    """``sup_x |u(x)|^2 / int_x^{x+1} (u^2 + u'^2)`` at ``t = 0``."""
    span = reach + 3.0 * f.sigma
    x = _grid(f.offset - span, f.offset + span + 1.0, dx)
    u, _, ux = f.jet(0.0, x)
    h = x[1] - x[0]
    m = int(round(1.0 / h))
    # trapezoid over each unit window as a direct sum: differences of a cumulative
    # integral cancel catastrophically in the tails
    kernel = np.full(m + 1, h)
    kernel[[0, -1]] *= 0.5
    window = np.convolve(u * u + ux * ux, kernel, mode="valid")
    return _safe_ratio(u[:-m] ** 2, window)


def global_ratio(f: CorpusFunction, s: float, dx: float) -> float:
    """``sup t u^2 / (||u||^2 + ||Lu||^2)`` over the hyperbolic part of ``F_s``."""
    a = 0.5 * (s * s - 1.0)
    x = _grid(-a, a, dx)
    t = np.sqrt(s * s + x * x)
    u, ut, ux = f.jet(t, x, anchor=0.0)
    lu = x * ut + t * ux
    rhs = trapezoid(u * u, x) + trapezoid(lu * lu, x)
    return _safe_ratio(t * u * u, rhs)


def transition_ratio(f: CorpusFunction, s: float, dx: float) -> float:
    """``sup |u|^2 / (||tangent_d1 u||^2 + ||u||^2)`` over both halves of ``T_s``."""
    a, b = float(cone_radius(s)), float(flat_radius(s))
    xr = _grid(a, b, dx)
    x = np.concatenate([-xr[::-1], xr])
    t = np.asarray(T_of(s, x))
    u, ut, ux = f.jet(t, x, anchor=0.5 * (a + b))
    tang = np.asarray(dT_dx(s, x)) * ut + ux
    n = xr.size

    def half(g):
        return trapezoid(g[:n], x[:n]) + trapezoid(g[n:], x[n:])

    rhs = half(tang * tang) + half(u * u)
    return _safe_ratio(u * u, rhs)


def _exterior_grid(s: float, dx: float, f: CorpusFunction, reach: float) -> Tuple[np.ndarray, float]:
    b = float(flat_radius(s))
    hi = b + 1.0 + f.offset + reach + 8.0 * f.sigma
    return _grid(b, hi, dx), float(T_flat(s))


def exterior_ratio(f: CorpusFunction, s: float, gamma: float, dx: float, reach: float = 4.0) -> float:
    """``sup |(1+w)u|^2 / (||(1+w) d_x u||^2 + ||(1+w) u||^2)`` over ``P_s`` (both tails)."""
    xr, t = _exterior_grid(s, dx, f, reach)
    anchor = float(flat_radius(s)) + 1.0
    total_num, rhs = [], 0.0
    for sign in (1.0, -1.0):
        x = sign * xr
        u, _, ux = f.jet(t, x, anchor=sign * anchor)
        w = np.asarray(weight(t, x, gamma)[0])
        total_num.append(((1.0 + w) * u) ** 2)
        rhs += trapezoid(((1.0 + w) * ux) ** 2 + ((1.0 + w) * u) ** 2, xr)
    return _safe_ratio(np.concatenate(total_num), rhs)


def exterior_ceiling(s_values: Sequence[float], gamma: float, dx: float = 1e-3) -> float:
    """``max(1 + 2 K^2, 2)``, ``K`` the sampled sup of ``d_x w / (1 + w)`` on the flat tails."""
    k = 0.0
    for s in s_values:
        x = _grid(float(flat_radius(s)), float(flat_radius(s)) + 40.0, dx)
        w, dwdx, _, _ = weight(float(T_flat(s)), x, gamma)
        k = max(k, float(np.max(np.abs(dwdx) / (1.0 + w))))
    return max(1.0 + 2.0 * k * k, 2.0)


@dataclass
class SobolevResult:
    """Per-inequality corpus maxima at ``dx`` and ``dx / 2`` plus the ceilings."""

    constants: Dict[str, float]
    refined: Dict[str, float]
    ceilings: Dict[str, float]
    ratios: Dict[str, np.ndarray] = field(repr=False, default_factory=dict)

    @property
    def drift(self) -> Dict[str, float]:
        out = {}
        for k, c in self.constants.items():
            r = self.refined[k]
            out[k] = 0.0 if c == r else abs(c - r) / max(abs(c), abs(r))
        return out


def _all_ratios(corpus, s_values, gamma, dx) -> Dict[str, np.ndarray]:
    rows = {k: [] for k in INEQUALITIES}
    for f in corpus:
        rows["basic"].append(basic_ratio(f, dx))
        rows["global"].append(max(global_ratio(f, s, dx) for s in s_values))
        rows["transition"].append(max(transition_ratio(f, s, dx) for s in s_values))
        rows["exterior"].append(max(exterior_ratio(f, s, gamma, dx) for s in s_values))
    return {k: np.asarray(v) for k, v in rows.items()}


def sobolev_suite(corpus: Sequence[CorpusFunction] = None, s_values: Sequence[float] = (2.0, 3.0, 4.0),
                  gamma: float = 1.2, dx: float = 0.01) -> SobolevResult:
    """Corpus-max ratio of every inequality at ``dx`` and ``dx / 2``."""
    corpus = make_corpus() if corpus is None else list(corpus)
    coarse = _all_ratios(corpus, s_values, gamma, dx)
    fine = _all_ratios(corpus, s_values, gamma, 0.5 * dx)
    ceilings = {"basic": BASIC_CEILING, "global": np.inf, "transition": BASIC_CEILING,
                "exterior": exterior_ceiling(s_values, gamma)}
    return SobolevResult({k: float(v.max()) for k, v in coarse.items()},
                         {k: float(v.max()) for k, v in fine.items()}, ceilings, coarse)


def sobolev_check(drift_tol: float = 0.01, **kwargs) -> CheckResult:
    res = sobolev_suite(**kwargs)
    drift = res.drift
    finite = all(np.isfinite(v) for v in res.constants.values())
    below = {k: bool(res.constants[k] <= res.ceilings[k] and res.refined[k] <= res.ceilings[k])
             for k in INEQUALITIES}
    ok = finite and all(below.values()) and max(drift.values()) < drift_tol
    return CheckResult(
        "sobolev_suite", "basic, global hyperbolic, transition and weighted exterior Sobolev bounds",
        bool(ok), value=max(drift.values()), tolerance=drift_tol,
        details={"constants": res.constants, "refined": res.refined,
                 "ceilings": {k: (None if not np.isfinite(v) else v) for k, v in res.ceilings.items()},
                 "drift": drift, "below_ceiling": below},
    )
