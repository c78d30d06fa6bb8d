"""Smooth cutoff machinery: the bump ``rho``, its normalised primitive ``chi``
and the slice cutoff ``xi_s``.

``chi`` is evaluated through a piecewise Chebyshev interpolant of the bump on
``[0, 1]`` whose antiderivative is taken exactly, so every call is a short
Clenshaw recurrence rather than a fresh quadrature.
"""
from __future__ import annotations

import numpy as np
from numpy.polynomial import chebyshev as C

__all__ = [
    "CutoffProfile",
    "PROFILE",
    "rho",
    "chi",
    "chi_prime",
    "xi",
    "xi_prime_bound_check",
]

_EXP_FLOOR = -700.0


def rho(x):
    """Compactly supported bump ``exp(4 / (4 x^2 - 1))`` on ``|x| < 1/2``."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 0.5
    denom = 4.0 * x[inside] ** 2 - 1.0
    expo = 4.0 / denom
    vals = np.where(expo < _EXP_FLOOR, 0.0, np.exp(np.maximum(expo, _EXP_FLOOR)))
    out[inside] = vals
    return out if out.ndim else float(out)


def _clenshaw(coef, u):
    # coef: (n, deg+1) rows selected per point, u in [-1, 1]
    b1 = np.zeros_like(u)
    b2 = np.zeros_like(u)
    for k in range(coef.shape[1] - 1, 0, -1):
        b1, b2 = coef[:, k] + 2.0 * u * b1 - b2, b1
    return coef[:, 0] + u * b1 - b2


class CutoffProfile:
    """Immutable evaluator for ``rho``, ``chi`` and ``xi_s``.

    Parameters
    ----------
    panels : int
        Number of equal panels on ``[0, 1]`` carrying a Chebyshev interpolant
        of ``rho(y - 1/2)``.
    degree : int
        Polynomial degree per panel.
    """

    def __init__(self, panels: int = 512, degree: int = 8):
        self.panels = int(panels)
        self.degree = int(degree)
        h = 1.0 / self.panels
        prim = np.empty((self.panels, self.degree + 2))
        offsets = np.empty(self.panels)
        running = 0.0
        for k in range(self.panels):
            a = k * h

            def f(u, a=a):
                return rho(a + 0.5 * h * (u + 1.0) - 0.5)

            coef = C.chebinterpolate(f, self.degree)
            # antiderivative in the panel variable, vanishing at u = -1
            anti = C.chebint(coef, lbnd=-1.0) * (0.5 * h)
            prim[k] = anti
            offsets[k] = running
            running += C.chebval(1.0, anti)
        self._prim = prim
        self._offsets = offsets
        self.norm_const = running
        # interpolation error of the primitive, checked in the test-suite
        self.quadrature_tol = 1e-12
        self._prim.setflags(write=False)
        self._offsets.setflags(write=False)

    def chi(self, x):
        """Normalised primitive; 0 for ``x <= 0``, 1 for ``x >= 1``."""
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        out = np.where(x >= 1.0, 1.0, 0.0)
        band = (x > 0.0) & (x < 1.0)
        if band.any():
            xb = x[band]
            idx = np.minimum((xb * self.panels).astype(int), self.panels - 1)
            u = 2.0 * (xb * self.panels - idx) - 1.0
            vals = self._offsets[idx] + _clenshaw(self._prim[idx], u)
            out[band] = np.clip(vals / self.norm_const, 0.0, 1.0)
        return float(out[0]) if scalar else out

    def chi_prime(self, x):
        return rho(np.asarray(x, dtype=float) - 0.5) / self.norm_const

    def xi(self, s, r):
        """Slice cutoff ``xi_s(r) = 1 - chi(r - (s^2 - 1)/2)``.

        Returns
        -------
        value, d_dr, d_ds
            ``d_ds = -s * d_dr``.
        """
        s = np.asarray(s, dtype=float)
        if np.any(s < 2.0):
            raise ValueError("slice parameter s must be >= 2")
        arg = np.asarray(r, dtype=float) - 0.5 * (s * s - 1.0)
        value = 1.0 - self.chi(arg)
        dchi = self.chi_prime(arg)
        return value, -dchi, s * dchi

    def xi_value(self, s, r):
        """``xi_s(r)`` alone, skipping the derivative."""
        return 1.0 - self.chi(np.asarray(r, dtype=float) - 0.5 * (np.asarray(s, dtype=float) ** 2 - 1.0))

    def xi_dr(self, s, r):
        """``d xi_s / dr`` alone, skipping the Clenshaw sum."""
        return -self.chi_prime(np.asarray(r, dtype=float) - 0.5 * (np.asarray(s, dtype=float) ** 2 - 1.0))


PROFILE = CutoffProfile()


def chi(x):
    return PROFILE.chi(x)


def chi_prime(x):
    return PROFILE.chi_prime(x)


def xi(s, r):
    return PROFILE.xi(s, r)


def xi_prime_bound_check(s: float, samples: int = 10_000) -> float:
    """Largest sampled ratio ``|xi_s'(r)| / sqrt(1 - xi_s(r))`` on the band.

    The band ``[(s^2-1)/2, (s^2+1)/2]`` is sampled uniformly; ``0/0`` counts
    as zero.
    """
    if samples < 100:
        raise ValueError("need at least 100 samples")
    a = 0.5 * (s * s - 1.0)
    r = np.linspace(a, a + 1.0, samples)
    value, d_dr, _ = xi(s, r)
    root = np.sqrt(np.maximum(1.0 - value, 0.0))
    num = np.abs(d_dr)
    ratio = np.zeros_like(r)
    nz = root > 0.0
    ratio[nz] = num[nz] / root[nz]
    out = float(ratio.max())
    if not np.isfinite(out):
        raise FloatingPointError("non-finite cutoff derivative ratio")
    return out
