"""Combined foliation of the half plane ``t >= 2`` by spacelike curves ``F_s``.

Each curve ``t = T(s, x)`` follows the hyperbola ``t = sqrt(s^2 + x^2)`` for
``|x| <= (s^2 - 1)/2``, bends through a transition band of unit width and then
continues as the horizontal line ``t = T_flat(s)``.
"""
from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from .cutoffs import PROFILE

__all__ = [
    "PointBelowFoliation",
    "RegionTag",
    "FoliationChart",
    "T_of",
    "T_flat",
    "dT_dx",
    "dT_ds",
    "s_of",
    "classify",
    "normal_and_volume",
    "lambda_gap",
    "cone_radius",
    "flat_radius",
    "build_chart",
]

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(48)


class PointBelowFoliation(ValueError):
    """Raised when ``(t, x)`` lies below the first curve ``F_2``."""


class RegionTag(enum.Enum):
    HYPERBOLIC = "Hyperbolic"
    TRANSITION = "Transition"
    FLAT = "Flat"
    CONE_BOUNDARY = "ConeBoundary"


def _check_s(s):
    s = np.asarray(s, dtype=float)
    if np.any(s < 2.0):
        raise ValueError("foliation is defined for s >= 2")
    return s


def cone_radius(s):
    """``(s^2 - 1)/2``: where ``F_s`` leaves the hyperbola."""
    return 0.5 * (np.asarray(s, dtype=float) ** 2 - 1.0)


def flat_radius(s):
    """``(s^2 + 1)/2``: where ``F_s`` becomes horizontal."""
    return 0.5 * (np.asarray(s, dtype=float) ** 2 + 1.0)


def _band_integral(s, r, kernel):
    """Gauss-Legendre integral of ``kernel(s, y)`` over ``[a(s), r]``."""
    a = cone_radius(s)
    half = 0.5 * (r - a)
    y = a[..., None] + half[..., None] * (_GL_NODES + 1.0)
    vals = kernel(s[..., None], y)
    return half * (vals @ _GL_WEIGHTS)


def _tangent_kernel(s, y):
    return PROFILE.xi_value(s, y) * y / np.sqrt(s * s + y * y)


def _jacobian_kernel(s, y):
    return PROFILE.xi_dr(s, y) * (1.0 + y) / np.sqrt(s * s + y * y)


def T_flat(s):
    """Height of the horizontal tails of ``F_s``."""
    s = np.atleast_1d(_check_s(s))
    out = flat_radius(s) + _band_integral(s, flat_radius(s), _tangent_kernel)
    return out if out.size > 1 else float(out[0])


def _split(s, x):
    s, x = np.broadcast_arrays(_check_s(s), np.asarray(x, dtype=float))
    shape = s.shape
    s = s.ravel().astype(float)
    r = np.abs(x.ravel().astype(float))
    a = cone_radius(s)
    hyp = r <= a
    flat = r >= a + 1.0
    band = ~hyp & ~flat
    return shape, s, r, hyp, band, flat


def _finish(out, shape):
    out = out.reshape(shape)
    return float(out) if out.ndim == 0 else out


def T_of(s, x):
    """Height ``T(s, x)`` of the curve ``F_s`` above ``x``."""
    shape, s, r, hyp, band, flat = _split(s, x)
    out = np.empty_like(s)
    out[hyp] = np.sqrt(s[hyp] ** 2 + r[hyp] ** 2)
    if band.any():
        sb = s[band]
        out[band] = flat_radius(sb) + _band_integral(sb, r[band], _tangent_kernel)
    if flat.any():
        sf = s[flat]
        out[flat] = flat_radius(sf) + _band_integral(sf, flat_radius(sf), _tangent_kernel)
    return _finish(out, shape)


def dT_dx(s, x):
    """Slope ``xi_s(|x|) x / sqrt(s^2 + x^2)``; odd in ``x``, magnitude < 1."""
    s, x = np.broadcast_arrays(_check_s(s), np.asarray(x, dtype=float))
    v = PROFILE.xi_value(s, np.abs(x))
    out = v * x / np.sqrt(s * s + x * x)
    return float(out) if np.ndim(out) == 0 else out


def dT_ds(s, x):
    """Jacobian ``dT/ds`` of the ``(s, x) -> (t, x)`` reparametrisation.

    In the band ``dT/ds = s xi_s(r) / sqrt(s^2 + r^2)
    - s * int_a^r xi_s'(y) (1 + y) / sqrt(s^2 + y^2) dy``, frozen at
    ``r = (s^2 + 1)/2`` on the flat tails.
    """
    shape, s, r, hyp, band, flat = _split(s, x)
    out = np.empty_like(s)
    out[hyp] = s[hyp] / np.sqrt(s[hyp] ** 2 + r[hyp] ** 2)
    if band.any():
        sb, rb = s[band], r[band]
        v = PROFILE.xi_value(sb, rb)
        out[band] = sb * v / np.sqrt(sb**2 + rb**2) - sb * _band_integral(
            sb, rb, _jacobian_kernel
        )
    if flat.any():
        sf = s[flat]
        out[flat] = -sf * _band_integral(sf, flat_radius(sf), _jacobian_kernel)
    return _finish(out, shape)


_FLAT_TABLE: dict = {}


def _flat_inverse(t):
    """Cubic-spline inverse of ``s -> T_flat(s)`` on a cached table, slightly biased low."""
    top = float(np.sqrt(max(2.0 * float(np.max(t)) - 1.0, 4.0))) + 1.0
    table = _FLAT_TABLE.get("table")
    if table is None or table[0] < top:
        n = max(512, int(64 * top))
        grid = np.linspace(2.0, max(top, 4.0), n)
        table = (float(grid[-1]), CubicSpline(np.asarray(T_flat(grid)), grid))
        _FLAT_TABLE["table"] = table
    guess = table[1](np.asarray(t, dtype=float))
    return guess * (1.0 - 1e-9)


def s_of(t, x, tol: float = 1e-12, max_iter: int = 100):
    """Invert ``t = T(s, x)`` for the slice parameter.

    Points inside the shifted cone ``t >= |x| + 1`` use the closed form
    ``sqrt(t^2 - x^2)``; the rest use a bracketed Newton iteration on the
    increasing map ``s -> T(s, x)``.
    """
    t, x = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
    shape = t.shape
    t = t.ravel().astype(float)
    r = np.abs(x.ravel().astype(float))
    below = t < T_of(2.0, r) - 1e-12
    if below.any():
        i = int(np.flatnonzero(below)[0])
        raise PointBelowFoliation(f"(t={t[i]!r}, x={r[i]!r}) lies below F_2")
    out = np.empty_like(t)
    inner = t >= r + 1.0
    out[inner] = np.sqrt(t[inner] ** 2 - r[inner] ** 2)
    outer = ~inner
    if outer.any():
        to, ro = t[outer], r[outer]
        hi = np.maximum(np.sqrt(np.maximum(2.0 * to - 1.0, 4.0)), 2.0)
        # T(s, x) <= T_flat(s), so the flat-part inverse is a lower bracket and,
        # on the flat part itself, already close to the root
        lo = np.clip(_flat_inverse(to), 2.0, hi)
        sv = lo.copy()
        active = np.ones(to.shape, dtype=bool)
        for _ in range(max_iter):
            idx = np.flatnonzero(active)
            if idx.size == 0:
                break
            sa = sv[idx]
            f = T_of(sa, ro[idx]) - to[idx]
            fp = dT_ds(sa, ro[idx])
            lo[idx] = np.where(f < 0.0, sa, lo[idx])
            hi[idx] = np.where(f > 0.0, sa, hi[idx])
            newton = sa - f / fp
            bad = (newton < lo[idx]) | (newton > hi[idx]) | ~np.isfinite(newton)
            new = np.where(bad, 0.5 * (lo[idx] + hi[idx]), newton)
            new = np.where(f == 0.0, sa, new)
            step = np.abs(new - sa)
            sv[idx] = new
            done = (step < tol) | (f == 0.0) | (hi[idx] - lo[idx] < tol)
            active[idx[done]] = False
        else:
            raise RuntimeError("s_of did not converge")
        out[outer] = sv
    return _finish(out, shape)


def classify(t: float, x: float, tol: float = 1e-9) -> RegionTag:
    """Region of the point ``(t, x)`` relative to its own curve ``F_s``."""
    s = s_of(t, x)
    return _tag(s, abs(x), tol)


def _tag(s, r, tol):
    a = cone_radius(s)
    if abs(r - a) <= tol:
        return RegionTag.CONE_BOUNDARY
    if r < a:
        return RegionTag.HYPERBOLIC
    if r >= a + 1.0 - 1e-12:
        return RegionTag.FLAT
    return RegionTag.TRANSITION


def normal_and_volume(s, x):
    """Euclidean unit normal ``(n_t, n_x)`` and line element of ``F_s``."""
    slope = np.asarray(dT_dx(s, x))
    vol = np.sqrt(1.0 + slope * slope)
    normal = np.stack([1.0 / vol, -slope / vol], axis=-1)
    if normal.ndim == 1:
        return normal, float(vol)
    return normal, vol


def lambda_gap(s, r):
    """``T(s, r) - r``; strictly decreasing in ``r``."""
    return T_of(s, r) - np.asarray(r, dtype=float)


@dataclass(frozen=True)
class FoliationChart:
    """Sampled curve ``F_s`` with per-sample geometry."""

    s: float
    x: np.ndarray
    T: np.ndarray
    dTdx: np.ndarray
    dTds: np.ndarray
    region: tuple
    normal: np.ndarray
    vol: np.ndarray

    def mask(self, *tags: RegionTag) -> np.ndarray:
        return np.array([r in tags for r in self.region])

    def to_csv(self, path) -> None:
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "T", "dTdx", "dTds", "region", "n_t", "n_x", "vol"])
            for i in range(self.x.size):
                w.writerow(
                    [
                        repr(float(self.x[i])),
                        repr(float(self.T[i])),
                        repr(float(self.dTdx[i])),
                        repr(float(self.dTds[i])),
                        self.region[i].value,
                        repr(float(self.normal[i, 0])),
                        repr(float(self.normal[i, 1])),
                        repr(float(self.vol[i])),
                    ]
                )


def build_chart(s: float, x_grid) -> FoliationChart:
    """Evaluate every per-sample field of ``F_s`` on a symmetric grid.

    Samples within half a grid cell of the cone radius are tagged
    ``CONE_BOUNDARY``.
    """
    _check_s(s)
    x = np.asarray(x_grid, dtype=float)
    if x.ndim != 1 or np.any(np.diff(x) <= 0):
        raise ValueError("grid must be one-dimensional and increasing")
    if not np.allclose(x, -x[::-1], atol=1e-9):
        raise ValueError("grid must be symmetric about 0")
    cell = float(np.min(np.diff(x))) if x.size > 1 else 0.0
    T = np.asarray(T_of(s, x))
    slope = np.asarray(dT_dx(s, x))
    jac = np.asarray(dT_ds(s, x))
    normal, vol = normal_and_volume(s, x)
    region = tuple(_tag(s, abs(xi_), 0.5 * cell) for xi_ in x)
    arrays = [x, T, slope, jac, normal, vol]
    for arr in arrays:
        arr.setflags(write=False)
    return FoliationChart(float(s), x, T, slope, jac, region, normal, vol)
