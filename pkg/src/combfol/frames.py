"""Canonical, semi-hyperboloidal, null and tangent frames of 1+1 Minkowski space.

Every non-canonical frame has the shape ``e_0 = d_t``, ``e_1 = k d_t + d_x``
for a coefficient ``k``: ``x/t`` (semi-hyperboloidal), ``x/|x|`` (null) and
``d_x T(s, x)`` (tangent to ``F_s``). With ``Phi = [[1, 0], [k, 1]]`` frame
vectors are ``e_a = Phi_a^b d_b`` and ``Psi = Phi^{-1}`` maps contravariant
components: ``T_frame^{ab} = Psi_alpha^a Psi_beta^b T^{alpha beta}``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .foliation import dT_dx
from .grid import FieldHistory

__all__ = [
    "FrameKind",
    "NullFrameAtOrigin",
    "TransitionPair",
    "transition",
    "transform_tensor",
    "frame_00",
    "eval_null_form",
    "is_null_form",
    "apply_field",
]


class FrameKind(enum.Enum):
    CANONICAL = "Canonical"
    SEMI_HYPERBOLOIDAL = "SemiHyperboloidal"
    NULL = "Null"
    TANGENT = "Tangent"


class NullFrameAtOrigin(ValueError):
    """The null frame is undefined at ``x = 0``."""


@dataclass(frozen=True)
class TransitionPair:
    Phi: np.ndarray
    Psi: np.ndarray


def _coefficient(kind: FrameKind, t, x, s=None, r_min: float = 0.0):
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    if kind is FrameKind.CANONICAL:
        return np.zeros(np.broadcast(t, x).shape)
    if kind is FrameKind.SEMI_HYPERBOLOIDAL:
        return x / t + 0.0 * t
    if kind is FrameKind.NULL:
        if np.any(np.abs(x) <= r_min):
            raise NullFrameAtOrigin(f"null frame needs |x| > {r_min}")
        return np.sign(x) + 0.0 * t
    if kind is FrameKind.TANGENT:
        if s is None:
            raise ValueError("the tangent frame needs a slice parameter s")
        return np.asarray(dT_dx(s, x)) + 0.0 * t
    raise ValueError(f"unknown frame {kind!r}")


def transition(kind: FrameKind, t, x, s: Optional[float] = None, r_min: float = 0.0) -> TransitionPair:
    """Transition matrices at a point; arrays of points give stacked ``(..., 2, 2)`` matrices."""
    k = _coefficient(kind, t, x, s, r_min)
    phi = np.zeros(k.shape + (2, 2))
    phi[..., 0, 0] = 1.0
    phi[..., 1, 1] = 1.0
    psi = phi.copy()
    phi[..., 1, 0] = k
    psi[..., 1, 0] = -k
    return TransitionPair(phi, psi)


def _to_canonical(comp: np.ndarray, kind, t, x, s, r_min):
    phi = transition(kind, t, x, s, r_min).Phi
    return _contract(comp, phi)


def _from_canonical(comp: np.ndarray, kind, t, x, s, r_min):
    psi = transition(kind, t, x, s, r_min).Psi
    return _contract(comp, psi)


def _contract(comp: np.ndarray, m: np.ndarray) -> np.ndarray:
    # one factor of m per contravariant index: out^{a..} = m_alpha^a ... comp^{alpha..}
    if comp.ndim == 2:
        return np.einsum("ai,bj,ab->ij", m, m, comp)
    if comp.ndim == 3:
        return np.einsum("ai,bj,ck,abc->ijk", m, m, m, comp)
    raise ValueError("only rank-2 and rank-3 tensors are supported")


def transform_tensor(components, source: FrameKind, target: FrameKind, t: float, x: float,
                     s: Optional[float] = None, r_min: float = 0.0) -> np.ndarray:
    """Re-express contravariant components given in ``source`` in the ``target`` frame."""
    comp = np.asarray(components, dtype=float)
    canon = comp if source is FrameKind.CANONICAL else _to_canonical(comp, source, t, x, s, r_min)
    if target is FrameKind.CANONICAL:
        return canon
    return _from_canonical(canon, target, t, x, s, r_min)


def frame_00(N, kind: FrameKind, t, x, s: Optional[float] = None, r_min: float = 0.0):
    """The ``00`` component of a constant form ``N`` in the requested frame (vectorised)."""
    N = np.asarray(N, dtype=float)
    k = _coefficient(kind, t, x, s, r_min)
    return N[0, 0] - k * (N[0, 1] + N[1, 0]) + k * k * N[1, 1]


def eval_null_form(N, du, dv, kind: FrameKind, t: float, x: float,
                   s: Optional[float] = None, r_min: float = 0.0) -> float:
    """``N^{ab} du_a dv_b`` with all three objects expressed in ``kind``."""
    N = np.asarray(N, dtype=float)
    pair = transition(kind, t, x, s, r_min)
    n_frame = _contract(N, pair.Psi)
    du_f = pair.Phi @ np.asarray(du, dtype=float)
    dv_f = pair.Phi @ np.asarray(dv, dtype=float)
    return float(du_f @ n_frame @ dv_f)


def is_null_form(N, tol: float = 0.0) -> bool:
    """1+1 null condition: ``N^00 + N^11 = 0`` and ``N^01 + N^10 = 0``."""
    N = np.asarray(N, dtype=float)
    return abs(N[0, 0] + N[1, 1]) <= tol and abs(N[0, 1] + N[1, 0]) <= tol


_FIELD_OPS = ("dt", "dx", "L", "null_d1", "shf_d1", "tangent_d1")


def apply_field(op: str, history: FieldHistory, level: int, s: Optional[float] = None,
                order: int = 4, r_min: Optional[float] = None) -> np.ndarray:
    """A first-order vector field applied to a stored field on one time level.

    ``dt`` uses the stored rate when present; ``dx`` uses centred stencils.
    Columns the stencil cannot reach, and for ``null_d1`` the cells within
    ``r_min`` (one grid cell by default) of the origin, are NaN.
    """
    if op not in _FIELD_OPS:
        raise ValueError(f"unknown vector field {op!r}; expected one of {_FIELD_OPS}")
    t = history.t0 + level * history.dt
    x = history.x
    ut = history.grid_partial(1, 0, level, order)
    ux = history.grid_partial(0, 1, level, order)
    if op == "dt":
        return ut
    if op == "dx":
        return ux
    if op == "L":
        return x * ut + t * ux
    if op == "shf_d1":
        return (x / t) * ut + ux
    if op == "tangent_d1":
        if s is None:
            raise ValueError("tangent_d1 needs a slice parameter s")
        return np.asarray(dT_dx(s, x)) * ut + ux
    rmin = history.dx if r_min is None else r_min
    out = np.sign(x) * ut + ux
    out[np.abs(x) < rmin] = np.nan
    return out
