"""Space-time grid functions: centred stencils, curve interpolation and the
polynomial-coefficient algebra of ``d^I L^j`` operators.

A :class:`FieldHistory` stores a field on a uniform ``(t, x)`` lattice. When
the time derivative is stored as well (the solver stores ``u_t``), every
``d_t^a d_x^b`` with ``a >= 1`` is obtained from ``a - 1`` time differences of
the stored rate, which gains one order of accuracy over differencing values.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Dict, Optional, Tuple

import numpy as np

__all__ = [
    "StencilOutOfDomain",
    "InsufficientWindow",
    "central_weights",
    "FieldHistory",
    "Operator",
    "vector_field_operator",
    "operator_words",
    "lagrange_weights",
]


class StencilOutOfDomain(IndexError):
    """A stencil reaches beyond the stored lattice."""


class InsufficientWindow(StencilOutOfDomain):
    """Too few stored time levels around the requested time."""


@lru_cache(maxsize=None)
def central_weights(deriv: int, order: int = 4) -> Tuple[np.ndarray, np.ndarray]:
    """Offsets and weights of the centred stencil for ``d^deriv`` at accuracy ``order``."""
    if deriv == 0:
        return np.array([0]), np.array([1.0])
    npts = 2 * ((deriv + 1) // 2) - 1 + order
    radius = (npts - 1) // 2
    offsets = np.arange(-radius, radius + 1)
    vander = np.vander(offsets.astype(float), increasing=True).T
    rhs = np.zeros(offsets.size)
    rhs[deriv] = float(np.prod(np.arange(1, deriv + 1)))
    weights = np.linalg.solve(vander, rhs)
    weights[np.abs(weights) < 1e-13] = 0.0
    offsets.setflags(write=False)
    weights.setflags(write=False)
    return offsets, weights


def lagrange_weights(nodes: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Lagrange basis values; ``nodes`` has shape ``(..., k)``, ``target`` shape ``(...)``."""
    k = nodes.shape[-1]
    out = np.ones(nodes.shape)
    for j in range(k):
        for m in range(k):
            if m != j:
                out[..., j] *= (target - nodes[..., m]) / (nodes[..., j] - nodes[..., m])
    return out


@dataclass(frozen=True)
class FieldHistory:
    """A field on the lattice ``t = t0 + n dt``, ``x = x[i]`` (uniform).

    Parameters
    ----------
    t0, dt : float
        Time of the first stored level and the level spacing.
    x : ndarray
        Uniform spatial grid.
    value : ndarray, shape (nt, nx)
    rate : ndarray or None
        Stored ``d_t`` of the field on the same lattice.
    """

    t0: float
    dt: float
    x: np.ndarray
    value: np.ndarray
    rate: Optional[np.ndarray] = None

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.value.shape[0])

    def partial(self, a: int, b: int, n, i, order: int = 4) -> np.ndarray:
        """``d_t^a d_x^b`` of the field at integer lattice points ``(n, i)``."""
        n = np.asarray(n, dtype=np.intp)
        i = np.asarray(i, dtype=np.intp)
        if a > 0 and self.rate is not None:
            src, ta = self.rate, a - 1
        else:
            src, ta = self.value, a
        toff, tw = central_weights(ta, order)
        xoff, xw = central_weights(b, order)
        nt, nx = src.shape
        if n.size and (n.min() + toff[0] < 0 or n.max() + toff[-1] >= nt):
            raise InsufficientWindow(f"time stencil for d_t^{a} leaves the stored levels")
        if i.size and (i.min() + xoff[0] < 0 or i.max() + xoff[-1] >= nx):
            raise StencilOutOfDomain(f"space stencil for d_x^{b} leaves the grid")
        out = np.zeros(np.broadcast(n, i).shape)
        for dn, wt in zip(toff, tw):
            if wt == 0.0:
                continue
            for di, wx in zip(xoff, xw):
                if wx == 0.0:
                    continue
                out += (wt * wx) * src[n + dn, i + di]
        return out / (self.dt**ta * self.dx**b)

    def grid_partial(self, a: int, b: int, n: int, order: int = 4) -> np.ndarray:
        """``d_t^a d_x^b`` on a whole row; columns the stencil cannot reach are NaN."""
        _, xw = central_weights(b, order)
        rad = (xw.size - 1) // 2
        nx = self.x.size
        out = np.full(nx, np.nan)
        cols = np.arange(rad, nx - rad)
        out[cols] = self.partial(a, b, np.full(cols.size, n), cols, order)
        return out

    def _levels(self, tq: np.ndarray) -> np.ndarray:
        n0 = np.floor((tq - self.t0) / self.dt + 1e-9).astype(np.intp) - 1
        nt = self.value.shape[0]
        if tq.size and (n0.min() < 0 or n0.max() + 3 >= nt):
            raise InsufficientWindow("requested times are not covered by the stored levels")
        return n0

    def on_columns(self, partials, tq, cols, order: int = 4) -> Dict[Tuple[int, int], np.ndarray]:
        """Cubic-in-time interpolation of several partials at ``(tq[k], x[cols[k]])``."""
        tq = np.asarray(tq, dtype=float)
        cols = np.asarray(cols, dtype=np.intp)
        n0 = self._levels(tq)
        nodes = self.t0 + self.dt * (n0[:, None] + np.arange(4)[None, :])
        lw = lagrange_weights(nodes, tq)
        out = {}
        for key in partials:
            acc = np.zeros(tq.shape)
            for m in range(4):
                acc += lw[:, m] * self.partial(key[0], key[1], n0 + m, cols, order)
            out[key] = acc
        return out

    def at_points(self, partials, tq, xq, order: int = 4) -> Dict[Tuple[int, int], np.ndarray]:
        """Tensor cubic Lagrange interpolation of partials at arbitrary ``(tq, xq)``."""
        tq = np.asarray(tq, dtype=float)
        xq = np.asarray(xq, dtype=float)
        n0 = self._levels(tq)
        i0 = np.floor((xq - self.x[0]) / self.dx + 1e-9).astype(np.intp) - 1
        tnodes = self.t0 + self.dt * (n0[:, None] + np.arange(4)[None, :])
        xnodes = self.x[0] + self.dx * (i0[:, None] + np.arange(4)[None, :])
        lt = lagrange_weights(tnodes, tq)
        lx = lagrange_weights(xnodes, xq)
        out = {}
        for key in partials:
            acc = np.zeros(tq.shape)
            for m, k in product(range(4), range(4)):
                acc += lt[:, m] * lx[:, k] * self.partial(key[0], key[1], n0 + m, i0 + k, order)
            out[key] = acc
        return out


# polynomial in (t, x): {(p, q): coef} meaning coef * t^p x^q
Poly = Dict[Tuple[int, int], float]


def _padd(acc: Poly, p: Poly, scale: float = 1.0) -> None:
    for k, c in p.items():
        acc[k] = acc.get(k, 0.0) + scale * c
        if acc[k] == 0.0:
            del acc[k]


def _pshift(p: Poly, dp: int, dq: int) -> Poly:
    return {(a + dp, b + dq): c for (a, b), c in p.items()}


def _pdiff(p: Poly, axis: int) -> Poly:
    out: Poly = {}
    for (a, b), c in p.items():
        e = (a, b)[axis]
        if e:
            key = (a - 1, b) if axis == 0 else (a, b - 1)
            out[key] = out.get(key, 0.0) + c * e
    return out


def _peval(p: Poly, t, x):
    acc = 0.0
    for (a, b), c in p.items():
        acc = acc + c * t**a * x**b
    return acc


class Operator:
    """Linear differential operator ``sum_{a,b} p_ab(t, x) d_t^a d_x^b`` with polynomial coefficients."""

    def __init__(self, terms: Optional[Dict[Tuple[int, int], Poly]] = None):
        self.terms: Dict[Tuple[int, int], Poly] = {
            k: dict(v) for k, v in (terms or {(0, 0): {(0, 0): 1.0}}).items() if v
        }

    def _compose_partial(self, axis: int) -> "Operator":
        out: Dict[Tuple[int, int], Poly] = {}
        for (a, b), poly in self.terms.items():
            up = (a + 1, b) if axis == 0 else (a, b + 1)
            _padd(out.setdefault(up, {}), poly)
            _padd(out.setdefault((a, b), {}), _pdiff(poly, axis))
        return Operator(out)

    def dt(self) -> "Operator":
        """``d_t`` composed on the left."""
        return self._compose_partial(0)

    def dx(self) -> "Operator":
        """``d_x`` composed on the left."""
        return self._compose_partial(1)

    def boost(self) -> "Operator":
        """``L = x d_t + t d_x`` composed on the left."""
        a = self.dt().terms
        b = self.dx().terms
        out: Dict[Tuple[int, int], Poly] = {}
        for k, poly in a.items():
            _padd(out.setdefault(k, {}), _pshift(poly, 0, 1))
        for k, poly in b.items():
            _padd(out.setdefault(k, {}), _pshift(poly, 1, 0))
        return Operator(out)

    def compose(self, inner: "Operator") -> "Operator":
        """``self o inner``: apply ``inner`` first."""
        out: Dict[Tuple[int, int], Poly] = {}
        for (a, b), poly in self.terms.items():
            piece = inner
            for _ in range(b):
                piece = piece.dx()
            for _ in range(a):
                piece = piece.dt()
            for key, p2 in piece.terms.items():
                acc = out.setdefault(key, {})
                for (i1, j1), c1 in poly.items():
                    _padd(acc, _pshift(p2, i1, j1), c1)
        return Operator(out)

    @property
    def order(self) -> int:
        return max(a + b for a, b in self.terms)

    def partials(self):
        return sorted(self.terms)

    def apply(self, values: Dict[Tuple[int, int], np.ndarray], t, x) -> np.ndarray:
        """Combine sampled partials ``values[(a, b)]`` at coordinates ``(t, x)``."""
        acc = 0.0
        for key, poly in self.terms.items():
            acc = acc + _peval(poly, t, x) * values[key]
        return np.asarray(acc, dtype=float)


def vector_field_operator(index, j: int) -> Operator:
    """``d^I L^j`` for an ordered multi-index ``I`` of 0 (``t``) and 1 (``x``) entries."""
    op = Operator()
    for _ in range(j):
        op = op.boost()
    for alpha in reversed(tuple(index)):
        op = op.dt() if alpha == 0 else op.dx()
    return op


def operator_words(max_order: int):
    """All ``(I, j)`` with ``|I| + j <= max_order``; ``I`` ranges over ordered multi-indices."""
    out = []
    for total in range(max_order + 1):
        for j in range(total, -1, -1):
            for index in product((0, 1), repeat=total - j):
                out.append((tuple(index), j))
    return out
