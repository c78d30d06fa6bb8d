"""Energies on the curves ``F_s``, the cone flux, high-order sums and the two
space-time energy identities.

The slice energy density is ``(1 + w)^2 (u_t^2 + u_x^2 + 2 d_xT u_t u_x + c^2 u^2)``:
on the hyperbolic and transition parts ``w = 0`` and on the flat part
``d_xT = 0``, so one smooth density covers all three pieces. Region integrals
come from a cubic spline of the density integrated exactly between the
region boundaries ``|x| = (s^2 -+ 1)/2``, which need not be grid points.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, Optional, Tuple

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicSpline

from .foliation import T_of, cone_radius, dT_ds, dT_dx
from .grid import FieldHistory, InsufficientWindow, Operator, operator_words, vector_field_operator
from .weights import weight, zeta

__all__ = [
    "WindowDoesNotCoverSlice",
    "SupportTruncated",
    "HistoryTooShort",
    "EnergyBreakdown",
    "energy_density",
    "hyperbolic_forms",
    "transition_forms",
    "region_integrals",
    "SliceSample",
    "slice_energy",
    "cone_energy",
    "high_order_energy",
    "IdentityResult",
    "energy_identity_residual",
    "transition_control_norms",
    "write_energy_csv",
    "CSV_COLUMNS",
]

EDGE_TOL = 1e-12
RESIDUAL_FLOOR = 1e-30
CSV_COLUMNS = ("field", "s", "order_I", "order_j", "EH", "ET", "EP", "EK", "total")


class WindowDoesNotCoverSlice(InsufficientWindow):
    pass


class SupportTruncated(ValueError):
    pass


class HistoryTooShort(InsufficientWindow):
    pass


@dataclass
class EnergyBreakdown:
    """Energies of one field on ``F_s``; ``table`` maps ``(|I|, j)`` to summed breakdowns."""

    s: float
    EH: float
    ET: float
    EP: float
    EK: float = 0.0
    c: float = 0.0
    gamma: float = 1.2
    table: Dict[Tuple[int, int], "EnergyBreakdown"] = field(default_factory=dict)

    @property
    def EE(self) -> float:
        return self.ET + self.EP

    @property
    def total(self) -> float:
        return self.EH + self.ET + self.EP

    def __add__(self, other: "EnergyBreakdown") -> "EnergyBreakdown":
        return EnergyBreakdown(self.s, self.EH + other.EH, self.ET + other.ET, self.EP + other.EP,
                               self.EK + other.EK, self.c, self.gamma)


def energy_density(s, x, t, ut, ux, val, c: float, gamma: float) -> np.ndarray:
    """``(1 + w)^2 (u_t^2 + u_x^2 + 2 d_xT u_t u_x + c^2 u^2)`` along ``F_s``."""
    slope = np.asarray(dT_dx(s, x))
    w = weight(t, x, gamma)[0]
    return (1.0 + w) ** 2 * (ut * ut + ux * ux + 2.0 * slope * ut * ux + c * c * val * val)


def hyperbolic_forms(s, x, t, ut, ux, val, c):
    """The raw, ``d_t``-completed and ``d_x``-completed hyperbolic densities."""
    k = x / t
    sq = (s / t) ** 2
    raw = ut * ut + ux * ux + 2.0 * k * ut * ux + c * c * val * val
    t_form = (k * ut + ux) ** 2 + sq * ut * ut + c * c * val * val
    x_form = (k * ux + ut) ** 2 + sq * ux * ux + c * c * val * val
    return raw, t_form, x_form


def transition_forms(s, x, ut, ux, val, c):
    """The raw and the two ``zeta``-completed transition densities."""
    slope = np.asarray(dT_dx(s, x))
    z = np.asarray(zeta(s, x))
    raw = ut * ut + ux * ux + 2.0 * slope * ut * ux + c * c * val * val
    t_form = (z * ut) ** 2 + (slope * ut + ux) ** 2 + c * c * val * val
    x_form = (z * ux) ** 2 + (slope * ux + ut) ** 2 + c * c * val * val
    return raw, t_form, x_form


def region_integrals(s: float, x: np.ndarray, density: np.ndarray) -> Tuple[float, float, float]:
    """Hyperbolic, transition and flat integrals of a smooth density sampled on ``x``."""
    a = float(cone_radius(s))
    b = a + 1.0
    lo, hi = float(x[0]), float(x[-1])
    spline = CubicSpline(x, density)

    def part(p, q):
        p, q = max(p, lo), min(q, hi)
        return float(spline.integrate(p, q)) if q > p else 0.0

    eh = part(-a, a)
    et = part(-b, -a) + part(a, b)
    ep = part(lo, -b) + part(b, hi)
    return eh, et, ep


def _check_edges(density: np.ndarray, what: str) -> None:
    peak = float(np.max(np.abs(density))) if density.size else 0.0
    if peak == 0.0:
        return
    k = max(2, density.size // 50)
    edge = max(np.max(np.abs(density[:k])), np.max(np.abs(density[-k:])))
    if edge > EDGE_TOL * peak:
        raise SupportTruncated(f"{what}: density at the grid edge is {edge / peak:.2e} of its peak")


class SliceSample:
    """Partials ``d_t^a d_x^b`` of a stored field interpolated onto ``F_s`` at grid columns.

    Parameters
    ----------
    history : FieldHistory
    s : float
    max_order : int
        Largest ``a + b`` to sample.
    x_window : (float, float), optional
        Restrict to columns inside this interval.
    """

    def __init__(self, history: FieldHistory, s: float, max_order: int = 1, order: int = 4,
                 x_window: Optional[Tuple[float, float]] = None):
        self.s = float(s)
        self.history = history
        nx = history.x.size
        margin = 4
        cols = np.arange(margin, nx - margin)
        if x_window is not None:
            xs = history.x[cols]
            cols = cols[(xs >= x_window[0]) & (xs <= x_window[1])]
        self.cols = cols
        self.x = history.x[cols]
        self.t = np.asarray(T_of(s, self.x))
        keys = [(a, b) for a in range(max_order + 1) for b in range(max_order + 1 - a)]
        try:
            self.partials = history.on_columns(keys, self.t, cols, order)
        except InsufficientWindow as exc:
            raise WindowDoesNotCoverSlice(f"F_{s:g} is not covered by the stored levels") from exc

    def apply(self, op: Operator) -> np.ndarray:
        return op.apply(self.partials, self.t, self.x)

    def first_jet(self, op: Optional[Operator] = None):
        """``(Zu, d_t Zu, d_x Zu)`` on the slice for ``Z = op``."""
        op = op or Operator()
        return self.apply(op), self.apply(op.dt()), self.apply(op.dx())

    def breakdown(self, op: Optional[Operator], c: float, gamma: float,
                  check_edges: bool = True) -> EnergyBreakdown:
        val, ut, ux = self.first_jet(op)
        dens = energy_density(self.s, self.x, self.t, ut, ux, val, c, gamma)
        if check_edges:
            _check_edges(dens, f"slice s={self.s:g}")
        eh, et, ep = region_integrals(self.s, self.x, dens)
        return EnergyBreakdown(self.s, eh, et, ep, c=c, gamma=gamma)


def slice_energy(history: FieldHistory, s: float, gamma: float, c: float,
                 op: Optional[Operator] = None, order: int = 4) -> EnergyBreakdown:
    """``E^H, E^T, E^P`` of ``Z u`` on ``F_s`` (``Z = op``, identity by default)."""
    need = 1 + (op.order if op is not None else 0)
    return SliceSample(history, s, need, order).breakdown(op, c, gamma)


def cone_energy(history: FieldHistory, s0: float, s: float, c: float,
                op: Optional[Operator] = None, order: int = 4,
                samples_per_unit: Optional[int] = None) -> float:
    """Flux ``int (|(x/r) d_t Zu + d_x Zu|^2 + c^2 (Zu)^2) dt`` over both branches of ``t = |x| + 1``."""
    if s < s0:
        raise ValueError("need s >= s0")
    ta = 0.5 * (s0 * s0 + 1.0)
    tb = 0.5 * (s * s + 1.0)
    if tb == ta:
        return 0.0
    op = op or Operator()
    per_unit = samples_per_unit or int(np.ceil(4.0 / history.dx))
    n = max(2 * int(np.ceil(0.5 * per_unit * (tb - ta))) + 1, 5)
    tq = np.linspace(ta, tb, n)
    keys = sorted(set(op.partials()) | set(op.dt().partials()) | set(op.dx().partials()))
    total = 0.0
    for sign in (1.0, -1.0):
        xq = sign * (tq - 1.0)
        try:
            vals = history.at_points(keys, tq, xq, order)
        except InsufficientWindow as exc:
            raise HistoryTooShort(f"history does not cover t in [{ta:g}, {tb:g}]") from exc
        zu = op.apply(vals, tq, xq)
        zt = op.dt().apply(vals, tq, xq)
        zx = op.dx().apply(vals, tq, xq)
        dens = (sign * zt + zx) ** 2 + c * c * zu * zu
        total += float(simpson(dens, x=tq))
    return total


def _group_key(index, j):
    return (len(index), j)


def high_order_energy(history: FieldHistory, s: float, N: int, gamma: float, c: float,
                      base: Optional[Operator] = None, s0: Optional[float] = None,
                      order: int = 4, words=None) -> EnergyBreakdown:
    """``sum_{|I|+j<=N} E(s, d^I L^j Z u)`` with a per-``(|I|, j)`` table.

    ``base`` is an extra operator ``Z`` applied first (e.g. ``L`` for the
    ``Lu`` rows of the bootstrap). When ``s0`` is given the cone flux between
    ``F_{s0}`` and ``F_s`` is included for each entry.
    """
    if N > 3:
        raise ValueError("desk-scale orders only (N <= 3)")
    words = words if words is not None else operator_words(N)
    base_order = base.order if base is not None else 0
    sample = SliceSample(history, s, N + base_order + 1, order)
    total = EnergyBreakdown(s, 0.0, 0.0, 0.0, c=c, gamma=gamma)
    table: Dict[Tuple[int, int], EnergyBreakdown] = {}
    for index, j in words:
        op = vector_field_operator(index, j)
        if base is not None:
            op = op.compose(base)
        e = sample.breakdown(op, c, gamma)
        if s0 is not None:
            e.EK = cone_energy(history, s0, s, c, op, order)
        key = _group_key(index, j)
        table[key] = table[key] + e if key in table else e
        total = total + e
    total.table = dict(sorted(table.items()))
    return total


@dataclass(frozen=True)
class IdentityResult:
    """Both sides of an integrated energy identity.

    ``lhs`` is ``E^H(s1) - E^H(s0) - E^K`` (interior) or ``E^E(s1) - E^E(s0) + E^K``
    (exterior); ``rhs`` is the source integral minus, in the exterior, the
    weight dissipation ``dissipation >= 0``.
    """

    which: str
    lhs: float
    rhs: float
    residual: float
    dissipation: float
    source: float
    energy_s0: float
    energy_s1: float
    cone: float


def _gauss_nodes(s0: float, s1: float, panel: float = 0.25, per_panel: int = 8):
    n_panels = max(1, int(np.ceil((s1 - s0) / panel)))
    edges = np.linspace(s0, s1, n_panels + 1)
    g, wg = np.polynomial.legendre.leggauss(per_panel)
    nodes, weights = [], []
    for p, q in zip(edges[:-1], edges[1:]):
        nodes.append(0.5 * (q - p) * (g + 1.0) + p)
        weights.append(0.5 * (q - p) * wg)
    return np.concatenate(nodes), np.concatenate(weights)


def energy_identity_residual(history: FieldHistory, source: FieldHistory, s0: float, s1: float,
                             which: str, gamma: float, c: float, order: int = 4,
                             panel: float = 0.25, per_panel: int = 8) -> IdentityResult:
    """Integrated energy balance between ``F_{s0}`` and ``F_{s1}``.

    ``source`` stores ``f`` in ``box u + c^2 u = f``. Interior measure
    ``dx dt = (s/t) dx ds``; exterior measure ``dx dt = d_sT dx ds``.
    """
    if which not in ("Interior", "Exterior"):
        raise ValueError("which must be 'Interior' or 'Exterior'")
    e0 = slice_energy(history, s0, gamma, c, order=order)
    e1 = slice_energy(history, s1, gamma, c, order=order)
    cone = cone_energy(history, s0, s1, c, order=order)
    nodes, weights = _gauss_nodes(s0, s1, panel, per_panel)
    src_total = 0.0
    diss_total = 0.0
    for sp_, wsp in zip(nodes, weights):
        a = float(cone_radius(sp_))
        pad = 4 * history.dx
        window = (-a - pad, a + pad) if which == "Interior" else None
        sample = SliceSample(history, sp_, 1, order, window)
        fs = source.on_columns([(0, 0)], sample.t, sample.cols, order)[(0, 0)]
        u = sample.partials[(0, 0)]
        ut = sample.partials[(1, 0)]
        ux = sample.partials[(0, 1)]
        x, t = sample.x, sample.t
        if which == "Interior":
            dens = 2.0 * ut * fs * sp_ / t
            src = float(CubicSpline(x, dens).integrate(-a, a))
            diss = 0.0
        else:
            w, _, _, wbar = weight(t, x, gamma)
            radial = wbar + gamma * w / (1.0 + np.maximum(np.abs(x) - t, 0.0))
            jac = np.asarray(dT_ds(sp_, x))
            null = np.sign(x) * ut + ux
            src_d = 2.0 * (1.0 + w) ** 2 * ut * fs * jac
            diss_d = 2.0 * (1.0 + w) * radial * (null**2 + c * c * u * u) * jac
            spl_s, spl_d = CubicSpline(x, src_d), CubicSpline(x, diss_d)
            lo, hi = float(x[0]), float(x[-1])
            src = float(spl_s.integrate(lo, -a) + spl_s.integrate(a, hi))
            diss = float(spl_d.integrate(lo, -a) + spl_d.integrate(a, hi))
        src_total += wsp * src
        diss_total += wsp * diss
    if which == "Interior":
        lhs = e1.EH - e0.EH - cone
        rhs = src_total
        en0, en1 = e0.EH, e1.EH
    else:
        lhs = e1.EE - e0.EE + cone
        rhs = src_total - diss_total
        en0, en1 = e0.EE, e1.EE
    # LHS and RHS both vanish for free waves, so scale by the energies in play
    scale = max(abs(lhs), abs(rhs), abs(en0), abs(en1), abs(cone), RESIDUAL_FLOOR)
    return IdentityResult(which, lhs, rhs, abs(lhs - rhs) / scale, diss_total, src_total, en0, en1,
                          cone)


def transition_control_norms(s: float, x: np.ndarray, ut: np.ndarray, ux: np.ndarray,
                             val: np.ndarray) -> Dict[str, float]:
    """``L^2(T_s)`` norms of ``zeta d_a u`` and of the null derivative, with ``E^T`` (``c = 0``)."""
    a = float(cone_radius(s))
    z = np.asarray(zeta(s, x))
    slope = np.asarray(dT_dx(s, x))
    null = np.sign(x) * ut + ux
    dens_t = ut * ut + ux * ux + 2.0 * slope * ut * ux

    def band(f):
        spl = CubicSpline(x, f)
        return float(spl.integrate(-a - 1.0, -a) + spl.integrate(a, a + 1.0))

    return {
        "zeta_dt": np.sqrt(max(band((z * ut) ** 2), 0.0)),
        "zeta_dx": np.sqrt(max(band((z * ux) ** 2), 0.0)),
        "null": np.sqrt(max(band(null**2), 0.0)),
        "ET": band(dens_t),
    }


def write_energy_csv(path, rows: Iterable[Tuple[str, EnergyBreakdown]]) -> None:
    """One line per ``(field, s, |I|, j)``; ``rows`` yields ``(field name, breakdown with table)``."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for name, br in rows:
            table = br.table or {(0, 0): br}
            for (oi, oj), e in sorted(table.items()):
                w.writerow([name, repr(float(br.s)), oi, oj, repr(e.EH), repr(e.ET), repr(e.EP),
                            repr(e.EK), repr(e.total)])
