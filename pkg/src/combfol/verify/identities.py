"""Commutator, Hessian and null-structure identities checked on analytic fields.

Each identity is evaluated on a ``(t, x)`` lattice with equal spacings and
second-order centred differences; both sides are compared on the residual
box ``t in [2.5, 3.5]``, ``0.5 <= |x| <= 3.5`` which avoids the origin, where
the null derivative ``(x/r) d_t + d_x`` is not smooth.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np
import sympy as sp

from ..frames import FrameKind, frame_00, is_null_form
from .report import CheckResult, slope

__all__ = [
    "Lattice",
    "TEST_FIELDS",
    "commutator_residuals",
    "commutator_suite",
    "hessian_residuals",
    "hessian_identity_check",
    "null_structure_check",
]

T_BOX = (2.5, 3.5)
R_BOX = (0.5, 3.5)
_PAD = 0.25

_t, _x = sp.symbols("t x", real=True)

TEST_FIELDS: Dict[str, sp.Expr] = {
    "sin_cos": sp.sin(_x) * sp.cos(_t),
    "gauss_wave": sp.exp(-(_x - 1) ** 2 / 2) * sp.cos(sp.Rational(13, 10) * _t - sp.Rational(2, 5) * _x),
    "gauss_shift": sp.exp(-(_x + sp.Rational(3, 2)) ** 2 / 3) * sp.sin(sp.Rational(4, 5) * _t + _x),
}


@dataclass(frozen=True)
class Lattice:
    """Uniform lattice with spacing ``h`` in both directions covering the residual box."""

    h: float

    @property
    def t(self) -> np.ndarray:
        n = int(round((T_BOX[1] - T_BOX[0] + 2 * _PAD) / self.h))
        return T_BOX[0] - _PAD + self.h * np.arange(n + 1)

    @property
    def x(self) -> np.ndarray:
        n = int(round((2 * (R_BOX[1] + _PAD)) / self.h))
        return -(R_BOX[1] + _PAD) + self.h * np.arange(n + 1)

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.t, self.x, indexing="ij")

    def box(self) -> np.ndarray:
        tt, xx = self.mesh()
        tol = 1e-9
        return ((tt >= T_BOX[0] - tol) & (tt <= T_BOX[1] + tol)
                & (np.abs(xx) >= R_BOX[0] - tol) & (np.abs(xx) <= R_BOX[1] + tol))

    def sample(self, expr: sp.Expr) -> np.ndarray:
        tt, xx = self.mesh()
        f = sp.lambdify((_t, _x), expr, "numpy")
        return np.broadcast_to(np.asarray(f(tt, xx), dtype=float), tt.shape).copy()

    # centred differences; the outermost row or column becomes NaN
    def d(self, f: np.ndarray, axis: int) -> np.ndarray:
        out = np.full_like(f, np.nan)
        if axis == 0:
            out[1:-1] = (f[2:] - f[:-2]) / (2.0 * self.h)
        else:
            out[:, 1:-1] = (f[:, 2:] - f[:, :-2]) / (2.0 * self.h)
        return out

    def dt(self, f):
        return self.d(f, 0)

    def dx(self, f):
        return self.d(f, 1)

    def boost(self, f):
        tt, xx = self.mesh()
        return xx * self.dt(f) + tt * self.dx(f)

    def null(self, f):
        _, xx = self.mesh()
        return np.sign(xx) * self.dt(f) + self.dx(f)


def _max_abs(a: np.ndarray, mask: np.ndarray) -> float:
    vals = np.abs(a[mask])
    if np.isnan(vals).any():
        raise ValueError("residual box reaches the lattice margin")
    return float(vals.max())


# identity name -> residual operator acting on a sampled field
def _identities(lat: Lattice) -> Dict[str, Callable[[np.ndarray], np.ndarray]]:
    _, xx = lat.mesh()
    sigma = np.sign(xx)
    D, X, L, N = lat.dt, lat.dx, lat.boost, lat.null
    return {
        "[d_t, null_d1] = 0": lambda u: D(N(u)) - N(D(u)),
        "[d_x, null_d1] = 0": lambda u: X(N(u)) - N(X(u)),
        "[L, null_d1] = -(x/r) null_d1": lambda u: L(N(u)) - N(L(u)) + sigma * N(u),
        "[d_x, L] = d_t": lambda u: X(L(u)) - L(X(u)) - D(u),
        "L^2 d_t = d_t L^2 - 2 d_x L + d_t": lambda u: L(L(D(u))) - D(L(L(u))) + 2.0 * X(L(u)) - D(u),
        "[L^2, null_d1] = -2(x/r) null_d1 L + null_d1":
            lambda u: L(L(N(u))) - N(L(L(u))) + 2.0 * sigma * N(L(u)) - N(u),
    }


# identities that hold exactly for the difference operators as well
_EXACT = ("[d_t, null_d1] = 0", "[d_x, null_d1] = 0")


def commutator_residuals(h: float, fields: Dict[str, sp.Expr] = None) -> Dict[str, float]:
    """Largest residual of every identity over all test fields at lattice spacing ``h``."""
    fields = TEST_FIELDS if fields is None else fields
    lat = Lattice(h)
    mask = lat.box()
    out: Dict[str, float] = {}
    for name, op in _identities(lat).items():
        worst = 0.0
        for expr in fields.values():
            worst = max(worst, _max_abs(op(lat.sample(expr)), mask))
        out[name] = worst
    return out


def _convergence(hs: Sequence[float], table: List[Dict[str, float]], exact: Sequence[str],
                 target: float, width: float, exact_tol: float):
    slopes, passed = {}, {}
    for name in table[0]:
        errs = [row[name] for row in table]
        if name in exact:
            slopes[name] = None
            passed[name] = bool(max(errs) <= exact_tol)
        else:
            slopes[name] = slope(hs, errs)
            passed[name] = bool(abs(slopes[name] - target) <= width)
    return slopes, passed


def commutator_suite(hs: Sequence[float] = (0.04, 0.02, 0.01), fields: Dict[str, sp.Expr] = None,
                     target: float = 2.0, width: float = 0.3, exact_tol: float = 1e-9) -> CheckResult:
    """Residual convergence of the first- and second-order commutator identities.

    Identities whose difference form is itself exact (``d_t`` and ``d_x``
    against the piecewise-constant null frame away from the origin) are
    judged by ``exact_tol`` instead of a slope.
    """
    table = [commutator_residuals(h, fields) for h in hs]
    slopes, passed = _convergence(hs, table, _EXACT, target, width, exact_tol)
    key = "[L, null_d1] = -(x/r) null_d1"
    return CheckResult(
        "commutator_suite", "boost and null-derivative commutators, orders one and two",
        all(passed.values()), value=slopes[key], tolerance=width,
        details={"h": list(hs), "residuals": {k: [row[k] for row in table] for k in table[0]},
                 "slopes": slopes, "passed": passed},
    )


def _hessian_sides(lat: Lattice, expr: sp.Expr):
    """Both sides of the ``(r - t) d_t^2 u`` decomposition and of the semi-hyperboloidal split of box."""
    tt, xx = lat.mesh()
    r = np.abs(xx)
    u = lat.sample(expr)
    box = lat.sample(sp.diff(expr, _t, 2) - sp.diff(expr, _x, 2))
    D, X, L = lat.dt, lat.dx, lat.boost
    utt = D(D(u))
    lhs_rt = (r - tt) * utt
    rhs_rt = (-tt**2 / (r + tt) * box + xx / (r + tt) * (D(L(u)) - X(u))
              + tt / (r + tt) * (D(u) - X(L(u))))
    lhs_box = box
    rhs_box = (1.0 - (r / tt) ** 2) * utt + ((xx / tt) * D(L(u)) - X(L(u)) - (xx / tt) * X(u) + D(u)) / tt
    return (lhs_rt, rhs_rt), (lhs_box, rhs_box)


def hessian_residuals(h: float, fields: Dict[str, sp.Expr] = None) -> Dict[str, float]:
    fields = TEST_FIELDS if fields is None else fields
    lat = Lattice(h)
    mask = lat.box()
    rt, sh = 0.0, 0.0
    for expr in fields.values():
        (a, b), (c, d) = _hessian_sides(lat, expr)
        rt = max(rt, _max_abs(a - b, mask))
        sh = max(sh, _max_abs(c - d, mask))
    return {"(r-t) d_t d_t u": rt, "semi-hyperboloidal box": sh}


def hessian_identity_check(hs: Sequence[float] = (0.04, 0.02, 0.01), fields: Dict[str, sp.Expr] = None,
                           target: float = 2.0, width: float = 0.3,
                           exact_tol: float = 1e-8) -> CheckResult:
    """Convergence of both Hessian decompositions plus two closed-form cases.

    ``t^2 - x^2`` is quadratic, so centred differences are exact and the
    residual must sit at rounding level; an outgoing profile ``f(x - t)``
    has ``box u = 0`` and must converge like any other field.
    """
    table = [hessian_residuals(h, fields) for h in hs]
    slopes, passed = _convergence(hs, table, (), target, width, exact_tol)
    quad = hessian_residuals(hs[-1], {"quadratic": _t**2 - _x**2})
    outgoing = [hessian_residuals(h, {"outgoing": sp.exp(-(_x - _t + 1) ** 2)}) for h in hs]
    out_slopes = {k: slope(hs, [row[k] for row in outgoing]) for k in outgoing[0]}
    quad_ok = max(quad.values()) <= exact_tol
    out_ok = all(abs(v - target) <= width for v in out_slopes.values())
    key = "(r-t) d_t d_t u"
    return CheckResult(
        "hessian_identity", "(r - t) d_t d_t u decomposition and the semi-hyperboloidal split of box",
        bool(all(passed.values()) and quad_ok and out_ok), value=slopes[key], tolerance=width,
        details={"h": list(hs), "residuals": {k: [row[k] for row in table] for k in table[0]},
                 "slopes": slopes, "quadratic_residual": max(quad.values()),
                 "outgoing_slopes": out_slopes},
    )


def _interior_samples(s_max: float, per_slice: int = 201, n_slices: int = 40):
    s = np.linspace(2.0, s_max, n_slices)
    ts, xs, ss = [], [], []
    for sv in s:
        a = 0.5 * (sv * sv - 1.0)
        x = np.linspace(-a, a, per_slice)
        ts.append(np.sqrt(sv * sv + x * x))
        xs.append(x)
        ss.append(np.full_like(x, sv))
    return np.concatenate(ts), np.concatenate(xs), np.concatenate(ss)


def _interior_ratio_sup(N: np.ndarray, s_max: float) -> float:
    t, x, s = _interior_samples(s_max)
    return float(np.max(np.abs(frame_00(N, FrameKind.SEMI_HYPERBOLOIDAL, t, x)) / (s / t) ** 2))


def null_structure_check(N=((1.0, 0.0), (0.0, -1.0)), samples: int = 10_000, seed: int = 3,
                         drift_tol: float = 1e-6) -> CheckResult:
    """Null-frame ``00`` part vanishes exactly; semi-hyperboloidal ``00`` part is ``O((s/t)^2)``.

    Boundedness is tested by comparing the sup of ``|N_00| (t/s)^2`` over
    interior hyperbolae with ``s <= 10`` and ``s <= 100``: a bounded ratio
    does not grow when the sample set is extended.
    """
    N = np.asarray(N, dtype=float)
    rng = np.random.default_rng(seed)
    t = rng.uniform(2.0, 100.0, samples)
    x = rng.uniform(0.01, 1.0, samples) * t * rng.choice([-1.0, 1.0], samples)
    null_00 = frame_00(N, FrameKind.NULL, t, x)
    exact_zero = bool(np.all(null_00 == 0.0))
    sup10 = _interior_ratio_sup(N, 10.0)
    sup100 = _interior_ratio_sup(N, 100.0)
    bounded = bool(sup100 <= sup10 * (1.0 + drift_tol) + 1e-300)
    condition = is_null_form(N)
    return CheckResult(
        "null_structure", "null forms: vanishing null-frame 00 part and (s/t)^2 interior decay",
        bool(exact_zero and bounded and condition), value=float(np.max(np.abs(null_00))),
        tolerance=0.0,
        details={"null_condition": bool(condition), "null_00_exact_zero": exact_zero,
                 "sup_ratio_s_le_10": sup10, "sup_ratio_s_le_100": sup100},
    )
