"""Executable geometry checks: curve heights, Jacobian envelope, inverse map and frames."""
from __future__ import annotations

import numpy as np

from ..cutoffs import PROFILE
from ..foliation import T_flat, T_of, cone_radius, dT_ds, flat_radius, s_of
from ..frames import FrameKind, frame_00, transition
from .report import CheckResult

__all__ = [
    "jacobian_envelope",
    "geometry_exactness",
    "jacobian_check",
    "inverse_check",
    "frame_algebra_check",
    "geometry_checks",
]


def jacobian_envelope(s: float, x):
    """Lower and upper bounds on ``d_sT`` at ``(s, x)``."""
    x = np.abs(np.asarray(x, dtype=float))
    xi_v = PROFILE.xi_value(s, x)
    hyp = s / np.sqrt(s * s + x * x)
    lower = (1.0 - xi_v) * s + xi_v * hyp
    upper = np.where(x <= cone_radius(s), hyp, xi_v * hyp + 2.0 * (1.0 - xi_v) * s)
    upper = np.where(x >= flat_radius(s), 2.0 * s, upper)
    return lower, upper


def geometry_exactness(s_values=(2.0, 3.0, 5.0, 10.0), tol: float = 1e-9) -> CheckResult:
    errs, inside = [], []
    for s in s_values:
        errs.append(abs(T_of(s, cone_radius(s)) - flat_radius(s)))
        tf = T_flat(s)
        inside.append(bool(flat_radius(s) <= tf <= 0.5 * np.sqrt(s**4 + 6 * s**2 + 1)))
    worst = float(max(errs))
    return CheckResult(
        "geometry_exactness", "curve height at the cone radius and flat-part bounds",
        bool(worst <= tol and all(inside)), value=worst, tolerance=tol,
        details={"s": list(s_values), "flat_bounds_hold": inside},
    )


def jacobian_check(s_values=(2.0, 3.0, 5.0, 10.0), samples: int = 10_000,
                   fd_tol: float = 1e-6) -> CheckResult:
    """Envelope at ``samples`` points per slice and a centred-difference cross-check."""
    worst_env = 0.0
    worst_fd = 0.0
    for s in s_values:
        b = flat_radius(s)
        x = np.linspace(0.0, b + 2.0, samples)
        j = np.asarray(dT_ds(s, x))
        lo, hi = jacobian_envelope(s, x)
        tol = 1e-12 * s
        worst_env = max(worst_env, float(np.max(np.maximum(lo - j - tol, j - hi - tol))))
        # d_sT grows like s on the band, T like s^2: scale the step with 1/s
        h = 1e-4 / s
        if s - h >= 2.0:
            fd = (np.asarray(T_of(s + h, x)) - np.asarray(T_of(s - h, x))) / (2 * h)
        else:
            # one-sided second-order difference on the first slice
            fd = (-3.0 * np.asarray(T_of(s, x)) + 4.0 * np.asarray(T_of(s + h, x))
                  - np.asarray(T_of(s + 2 * h, x))) / (2 * h)
        worst_fd = max(worst_fd, float(np.max(np.abs(fd - j) / np.abs(j))))
    ok = worst_env <= 0.0 and worst_fd <= fd_tol
    return CheckResult(
        "jacobian_envelope", "two-sided Jacobian bounds of the (s, x) parametrisation",
        bool(ok), value=worst_fd, tolerance=fd_tol,
        details={"max_envelope_excess": worst_env, "max_fd_relative_error": worst_fd},
    )


def inverse_check(points: int = 100_000, tol: float = 1e-8, seed: int = 7) -> CheckResult:
    rng = np.random.default_rng(seed)
    s = rng.uniform(2.0, 20.0, points)
    x = rng.uniform(-1.0, 1.0, points) * 3.0 * s * s
    back = np.asarray(s_of(np.asarray(T_of(s, x)), x))
    err = float(np.max(np.abs(back - s)))
    return CheckResult("inverse_consistency", "s(t, x) inverts t = T(s, x)", bool(err <= tol),
                       value=err, tolerance=tol, details={"points": points})


def frame_algebra_check(points: int = 10_000, seed: int = 11) -> CheckResult:
    """``Phi Psi = I``, vanishing null-frame ``00`` component and its negative control."""
    rng = np.random.default_rng(seed)
    t = rng.uniform(2.0, 50.0, points)
    x = rng.uniform(-1.0, 1.0, points) * t
    s_val = 3.0
    worst = 0.0
    for kind in FrameKind:
        pair = transition(kind, t, x, s=s_val, r_min=0.0)
        prod = np.einsum("...ij,...jk->...ik", pair.Phi, pair.Psi)
        worst = max(worst, float(np.max(np.abs(prod - np.eye(2)))))
    null_n = np.array([[1.0, 0.0], [0.0, -1.0]])
    skew_n = np.array([[0.3, 0.7], [-0.7, -0.3]])
    bad_n = np.array([[1.0, 0.0], [0.0, 0.0]])
    pos = np.abs(x)
    neg = -np.abs(x)
    null_ok = all(
        np.all(frame_00(n, FrameKind.NULL, t, side) == 0.0)
        for n in (null_n, skew_n) for side in (pos, neg)
    )
    control = float(np.min(np.abs(frame_00(bad_n, FrameKind.NULL, t, pos))))
    ok = worst <= 1e-14 and null_ok and control > 0.0
    return CheckResult(
        "frame_algebra", "transition matrices invert each other; null forms have vanishing 00 part",
        bool(ok), value=worst, tolerance=1e-14,
        details={"null_00_exact_zero": bool(null_ok), "negative_control_min_00": control},
    )


def geometry_checks() -> list:
    return [geometry_exactness(), jacobian_check(), inverse_check(), frame_algebra_check()]
