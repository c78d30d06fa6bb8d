"""Exterior weight ``w_gamma`` and the transition degeneracy factor ``zeta``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cutoffs import PROFILE
from .foliation import _check_s

__all__ = ["WeightParams", "weight", "zeta", "wbar_bound"]


@dataclass(frozen=True)
class WeightParams:
    """Weight exponent; ``gamma > 1`` for the global result, ``(0, 1)`` allowed for decay probes."""

    gamma: float = 1.2

    def __post_init__(self):
        if not self.gamma > 0.0:
            raise ValueError("gamma must be positive")


def weight(t, x, gamma: float):
    """``w = chi(r - t)(r - t + 1)^gamma`` and its first derivatives.

    Returns
    -------
    w, dwdx, dwdt, wbar
        ``wbar = chi'(r - t)(r - t + 1)^gamma``; ``dwdx = (wbar + gamma w / (1 + r - t)) x / r``
        and ``dwdt = -(wbar + gamma w / (1 + r - t))``.
    """
    t, x = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
    r = np.abs(x)
    q = r - t
    # the weight vanishes identically for q <= 0 so clamp the base there
    base = np.maximum(q, 0.0) + 1.0
    powg = base**gamma
    w = PROFILE.chi(q) * powg
    wbar = PROFILE.chi_prime(q) * powg
    radial = wbar + gamma * w / base
    sign = np.sign(x)
    dwdx = radial * sign
    dwdt = -radial
    if w.ndim == 0:
        return float(w), float(dwdx), float(dwdt), float(wbar)
    return w, dwdx, dwdt, wbar


def zeta(s, x):
    """``sqrt((s^2 + (1 - xi_s^2) x^2) / (s^2 + x^2))``, valued in ``(0, 1]``."""
    s, x = np.broadcast_arrays(_check_s(s), np.asarray(x, dtype=float))
    xi_v = PROFILE.xi_value(s, np.abs(x))
    out = np.sqrt((s * s + (1.0 - xi_v * xi_v) * x * x) / (s * s + x * x))
    return float(out) if out.ndim == 0 else out


def wbar_bound(gamma: float, samples: int = 20_001) -> float:
    """Sampled ``sup wbar``; ``wbar`` depends on ``r - t`` alone, supported in ``(0, 1)``."""
    q = np.linspace(0.0, 1.0, samples)
    return float(np.max(PROFILE.chi_prime(q) * (1.0 + q) ** gamma))
