"""Finite-difference evolution of the coupled system

    box u = v^3,    box v + c^2 v = N^{ab} d_a u d_b u,    box = d_t^2 - d_x^2,

posed on ``t = 2`` and advanced by a kick-drift-kick (velocity Verlet)
scheme. The Klein-Gordon source depends on ``u_t``; the closing kick uses
a first-order predictor for the new velocity, which keeps the scheme second
order and exactly reversible when the sources are switched off.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
import sympy as sp

from .cutoffs import PROFILE
from .foliation import T_flat
from .frames import is_null_form
from .grid import FieldHistory

__all__ = [
    "CFLViolation",
    "NonFiniteField",
    "SupportTruncated",
    "DomainTooSmall",
    "WeightNotIntegrable",
    "ModelParams",
    "FieldState",
    "RunConfig",
    "RunRecord",
    "initial_data",
    "support_radius",
    "step",
    "run",
    "t_max_for",
    "resolve_halfwidth",
    "ManufacturedProblem",
    "manufactured_forcing",
    "kg_transform",
]

EDGE_THRESHOLD = 1e-10
PROFILES = ("GaussianLike", "PolyDecay", "Custom")
Forcing = Callable[[float, np.ndarray], Tuple[np.ndarray, np.ndarray]]


class CFLViolation(ValueError):
    pass


class NonFiniteField(FloatingPointError):
    pass


class SupportTruncated(ValueError):
    pass


class DomainTooSmall(ValueError):
    pass


class WeightNotIntegrable(ValueError):
    pass


@dataclass(frozen=True)
class ModelParams:
    """Model constants.

    Parameters
    ----------
    c : float
        Klein-Gordon mass, positive.
    N : 2x2 nested tuple
        Constant quadratic form in ``N^{ab} d_a u d_b u``; must satisfy the
        null condition unless ``allow_non_null``.
    epsilon, gamma, delta, p : float
        Data size, weight exponent, bootstrap growth exponent, data decay power.
    cubic : bool
        Keep the ``v^3`` source of the wave equation (off for linear oracles).
    """

    c: float = 1.0
    N: Tuple[Tuple[float, float], Tuple[float, float]] = ((1.0, 0.0), (0.0, -1.0))
    epsilon: float = 1e-3
    gamma: float = 1.2
    delta: float = 0.004
    p: float = 4.0
    cubic: bool = True
    allow_non_null: bool = False

    def __post_init__(self):
        object.__setattr__(self, "N", tuple(tuple(float(v) for v in row) for row in self.N))
        if not self.c > 0.0:
            raise ValueError("Klein-Gordon mass c must be positive")
        if not self.allow_non_null and not is_null_form(self.N, tol=1e-14):
            raise ValueError("N violates the null condition N00+N11=0, N01+N10=0")
        if not 0.0 < self.delta < 1.0 / 200.0:
            raise ValueError("delta must lie in (0, 1/200)")
        if not self.delta < self.gamma - 1.0:
            raise ValueError("delta must be smaller than gamma - 1")

    @property
    def N_array(self) -> np.ndarray:
        return np.array(self.N, dtype=float)

    @property
    def coupled(self) -> bool:
        return bool(np.any(self.N_array != 0.0))


@dataclass
class FieldState:
    """Fields on the uniform grid ``x0 + dx * arange(n)`` at time ``t``."""

    t: float
    dx: float
    x0: float
    u: np.ndarray
    ut: np.ndarray
    v: np.ndarray
    vt: np.ndarray

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.u.size)

    def check_finite(self) -> None:
        for name in ("u", "ut", "v", "vt"):
            arr = getattr(self, name)
            if not np.all(np.isfinite(arr)):
                bad = int(np.flatnonzero(~np.isfinite(arr))[0])
                raise NonFiniteField(f"{name} is non-finite at t={self.t:.6g}, x={self.x[bad]:.6g}")

    def edge_ratio(self, fraction: float = 0.05) -> float:
        """Largest edge amplitude relative to the interior maximum."""
        k = max(1, int(math.ceil(fraction * self.u.size)))
        ratios = []
        for arr in (self.u, self.v):
            peak = np.max(np.abs(arr))
            if peak == 0.0:
                continue
            edge = max(np.max(np.abs(arr[:k])), np.max(np.abs(arr[-k:])))
            ratios.append(edge / peak)
        return max(ratios, default=0.0)


# --- initial data -----------------------------------------------------------

_TAPER_START = 8.0
_TAPER_WIDTH = 4.0


def _profile_shapes(profile: str, params: ModelParams, custom=None):
    if profile == "GaussianLike":
        def base(x):
            return np.exp(-0.5 * x * x)

        return (base, lambda x: x * base(x), base, lambda x: 0.5 * base(x))
    if profile == "PolyDecay":
        p = params.p

        def base(x):
            taper = 1.0 - PROFILE.chi((np.abs(x) - _TAPER_START) / _TAPER_WIDTH)
            return (1.0 + x * x) ** (-0.5 * p) * taper

        return (base, lambda x: x * base(x) / np.sqrt(1.0 + x * x), base, lambda x: 0.5 * base(x))
    if profile == "Custom":
        if custom is None or len(custom) != 4:
            raise ValueError("Custom profile needs four callables (u0, u1, v0, v1)")
        return tuple(custom)
    raise ValueError(f"unknown profile {profile!r}; expected one of {PROFILES}")


def support_radius(profile: str, params: ModelParams, custom=None, reach: float = 400.0,
                   step_size: float = 0.01) -> float:
    """Smallest ``R`` with all data below ``1e-10`` of their maximum for ``|x| > R``."""
    x = np.arange(-reach, reach + step_size / 2, step_size)
    amp = np.zeros_like(x)
    for f in _profile_shapes(profile, params, custom):
        amp = np.maximum(amp, np.abs(f(x)))
    if amp.max() == 0.0:
        return 0.0
    big = np.flatnonzero(amp >= EDGE_THRESHOLD * amp.max())
    return float(np.max(np.abs(x[big])))


def initial_data(profile: str, params: ModelParams, x: np.ndarray, custom=None,
                 t0: float = 2.0) -> Tuple[FieldState, Dict[str, float]]:
    """Data of size ``epsilon`` at ``t = 2`` and its weighted norms.

    Returns the state and ``||(1 + |x|)^gamma d_x^k f||_{L^2}`` for each datum
    ``f`` and ``k <= 2``.
    """
    if params.p <= params.gamma + 1.0:
        raise WeightNotIntegrable(f"p={params.p} must exceed gamma + 1 = {params.gamma + 1.0}")
    shapes = _profile_shapes(profile, params, custom)
    eps = params.epsilon
    fields = [eps * np.asarray(f(x), dtype=float) for f in shapes]
    dx = float(x[1] - x[0])
    state = FieldState(t0, dx, float(x[0]), *fields)
    weight = (1.0 + np.abs(x)) ** params.gamma
    norms = {}
    for name, arr in zip(("u0", "u1", "v0", "v1"), fields):
        d = arr
        for k in range(3):
            norms[f"{name}_dx{k}"] = float(np.sqrt(np.sum((weight * d) ** 2) * dx))
            d = np.gradient(d, dx)
    return state, norms


# --- time stepping ----------------------------------------------------------


def _pad(f: np.ndarray, periodic: bool) -> np.ndarray:
    if periodic:
        return np.concatenate(([f[-1]], f, [f[0]]))
    return np.concatenate(([0.0], f, [0.0]))


def _laplacian(f, dx, periodic):
    g = _pad(f, periodic)
    return (g[2:] - 2.0 * g[1:-1] + g[:-2]) / (dx * dx)


def _gradient(f, dx, periodic):
    g = _pad(f, periodic)
    return (g[2:] - g[:-2]) / (2.0 * dx)


def _sources(t, u, ut, v, vt, params: ModelParams, x, dx, periodic, forcing):
    fu = v**3 if params.cubic else np.zeros_like(v)
    if params.coupled:
        N = params.N_array
        ux = _gradient(u, dx, periodic)
        fv = N[0, 0] * ut * ut + (N[0, 1] + N[1, 0]) * ut * ux + N[1, 1] * ux * ux
    else:
        fv = np.zeros_like(v)
    if forcing is not None:
        gu, gv = forcing(t, x)
        fu = fu + gu
        fv = fv + gv
    return fu, fv


def _accelerations(t, u, ut, v, vt, params, x, dx, periodic, forcing):
    fu, fv = _sources(t, u, ut, v, vt, params, x, dx, periodic, forcing)
    au = _laplacian(u, dx, periodic) + fu
    av = _laplacian(v, dx, periodic) - params.c**2 * v + fv
    return au, av, fu, fv


def step(state: FieldState, params: ModelParams, dt: float, forcing: Optional[Forcing] = None,
         boundary: str = "dirichlet", cfl_max: float = 0.9) -> FieldState:
    """Advance ``(u, u_t, v, v_t)`` by ``dt`` (negative ``dt`` steps backwards)."""
    if abs(dt) > cfl_max * state.dx * (1.0 + 1e-12):
        raise CFLViolation(f"|dt|={abs(dt):.3g} exceeds {cfl_max} dx={cfl_max * state.dx:.3g}")
    # overflow is reported by check_finite with its location, not as a warning
    with np.errstate(over="ignore", invalid="ignore"):
        new = _kdk(state, params, dt, forcing, boundary == "periodic")
    new.check_finite()
    return new


def _kdk(state: FieldState, params: ModelParams, dt: float, forcing, periodic: bool) -> FieldState:
    x = state.x
    t0, dx = state.t, state.dx
    au, av, _, _ = _accelerations(t0, state.u, state.ut, state.v, state.vt, params, x, dx,
                                  periodic, forcing)
    half = 0.5 * dt
    uth = state.ut + half * au
    vth = state.vt + half * av
    u1 = state.u + dt * uth
    v1 = state.v + dt * vth
    if not periodic:
        u1[[0, -1]] = 0.0
        v1[[0, -1]] = 0.0
    t1 = t0 + dt
    au1, av1, _, _ = _accelerations(t1, u1, uth + half * au, v1, vth + half * av, params, x, dx,
                                    periodic, forcing)
    return FieldState(t1, dx, state.x0, u1, uth + half * au1, v1, vth + half * av1)


# --- runs ---------------------------------------------------------------------


@dataclass
class RunConfig:
    """Everything :func:`run` needs; ``halfwidth=None`` means automatic sizing."""

    params: ModelParams = field(default_factory=ModelParams)
    dx: float = 0.02
    cfl: float = 0.5
    halfwidth: Optional[float] = None
    profile: str = "GaussianLike"
    s_list: Tuple[float, ...] = (2.0, 2.4, 2.8, 3.2, 3.6, 4.0)
    t_max: Optional[float] = None
    snapshot_times: Tuple[float, ...] = ()
    boundary: str = "dirichlet"
    forcing: Optional[Forcing] = None
    initial: Optional[Callable[[np.ndarray], Tuple[np.ndarray, ...]]] = None
    custom: Optional[Sequence[Callable]] = None
    margin: float = 0.25

    @property
    def dt(self) -> float:
        return self.cfl * self.dx


# levels kept before t = 2 and after t_max so every stencil fits
_PAD_LEVELS = 6


def t_max_for(config: RunConfig) -> float:
    """Last time needed: the flat height of the top slice plus margin and stencil room."""
    if config.t_max is not None:
        return float(config.t_max)
    top = max(config.s_list)
    return float(T_flat(top)) + config.margin + _PAD_LEVELS * config.dt


def resolve_halfwidth(config: RunConfig) -> Tuple[float, float, float]:
    """``(halfwidth, t_max, support)`` with the finite-propagation sizing rule."""
    t_max = t_max_for(config)
    if config.initial is not None:
        support = float(config.halfwidth or 0.0)
        return float(config.halfwidth), t_max, support
    support = support_radius(config.profile, config.params, config.custom)
    need = t_max + support + 2.0
    if config.halfwidth is None:
        return need, t_max, support
    if config.boundary == "dirichlet" and config.halfwidth < need - 1e-12:
        raise DomainTooSmall(f"halfwidth {config.halfwidth} < t_max + support + 2 = {need:.4g}")
    return float(config.halfwidth), t_max, support


@dataclass
class RunRecord:
    """Full space-time history of a run.

    ``U, UT, V, VT`` hold the fields and ``FU, FV`` the complete right-hand
    sides of the two equations (nonlinear terms plus forcing) on every level
    ``t0 + n dt``.
    """

    params: ModelParams
    x: np.ndarray
    t0: float
    dt: float
    U: np.ndarray
    UT: np.ndarray
    V: np.ndarray
    VT: np.ndarray
    FU: np.ndarray
    FV: np.ndarray
    cfl: float
    boundary: str
    halfwidth: float
    support: float
    t_start: float = 2.0
    snapshots: Tuple[FieldState, ...] = ()
    data_norms: Dict[str, float] = field(default_factory=dict)
    forcing: Optional[Forcing] = None
    final_edge_ratio: float = 0.0

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.U.shape[0])

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    @property
    def u(self) -> FieldHistory:
        return FieldHistory(self.t0, self.dt, self.x, self.U, self.UT)

    @property
    def v(self) -> FieldHistory:
        return FieldHistory(self.t0, self.dt, self.x, self.V, self.VT)

    @property
    def fu(self) -> FieldHistory:
        return FieldHistory(self.t0, self.dt, self.x, self.FU)

    @property
    def fv(self) -> FieldHistory:
        return FieldHistory(self.t0, self.dt, self.x, self.FV)

    def history(self, name: str) -> FieldHistory:
        return getattr(self, name)

    def level(self, t: float) -> int:
        n = int(round((t - self.t0) / self.dt))
        if not 0 <= n < self.U.shape[0]:
            raise IndexError(f"t={t} is outside the stored history")
        return n

    def state(self, n: int) -> FieldState:
        return FieldState(float(self.times[n]), self.dx, float(self.x[0]), self.U[n], self.UT[n],
                          self.V[n], self.VT[n])


def _initial_state(config: RunConfig, x: np.ndarray):
    if config.initial is not None:
        u, ut, v, vt = (np.asarray(a, dtype=float) for a in config.initial(x))
        return FieldState(2.0, float(x[1] - x[0]), float(x[0]), u, ut, v, vt), {}
    return initial_data(config.profile, config.params, x, config.custom)


def run(config: RunConfig) -> RunRecord:
    """Evolve from ``t = 2`` to :func:`t_max_for` and keep every level."""
    if config.cfl > 0.9:
        raise CFLViolation(f"CFL ratio {config.cfl} exceeds 0.9")
    halfwidth, t_max, support = resolve_halfwidth(config)
    dx, dt = config.dx, config.dt
    half_n = int(math.ceil(halfwidth / dx))
    periodic = config.boundary == "periodic"
    if periodic:
        x = -half_n * dx + dx * np.arange(2 * half_n)
    else:
        x = dx * np.arange(-half_n, half_n + 1)
    state, norms = _initial_state(config, x)
    if not periodic and state.edge_ratio() > EDGE_THRESHOLD:
        raise SupportTruncated(f"initial data exceed {EDGE_THRESHOLD} of their peak near the edge")
    n_forward = int(math.ceil((t_max - 2.0) / dt)) + _PAD_LEVELS
    params, forcing = config.params, config.forcing
    back = [state]
    for _ in range(_PAD_LEVELS):
        back.append(step(back[-1], params, -dt, forcing, config.boundary))
    nt = _PAD_LEVELS + 1 + n_forward
    arrays = {k: np.empty((nt, x.size)) for k in ("U", "UT", "V", "VT", "FU", "FV")}

    def store(n, st):
        arrays["U"][n], arrays["UT"][n] = st.u, st.ut
        arrays["V"][n], arrays["VT"][n] = st.v, st.vt
        fu, fv = _sources(st.t, st.u, st.ut, st.v, st.vt, params, x, dx, periodic, forcing)
        arrays["FU"][n], arrays["FV"][n] = fu, fv

    for k, st in enumerate(reversed(back)):
        store(k, st)
    snap_times = sorted(config.snapshot_times)
    snapshots = []
    cur = state
    for n in range(_PAD_LEVELS + 1, nt):
        cur = step(cur, params, dt, forcing, config.boundary)
        store(n, cur)
    t0 = 2.0 - _PAD_LEVELS * dt
    record = RunRecord(params=params, x=x, t0=t0, dt=dt, cfl=config.cfl, boundary=config.boundary,
                       halfwidth=halfwidth, support=support, data_norms=norms, forcing=forcing,
                       final_edge_ratio=cur.edge_ratio(), **arrays)
    for ts in snap_times:
        snapshots.append(record.state(record.level(ts)))
    record.snapshots = tuple(snapshots)
    return record


# --- manufactured solutions ---------------------------------------------------

_t, _x = sp.symbols("t x", real=True)


@dataclass(frozen=True)
class ManufacturedProblem:
    """Exact pair ``(u*, v*)`` with the forcing that makes it a solution."""

    forcing: Forcing
    exact: Callable[[float, np.ndarray], Tuple[np.ndarray, ...]]
    f_u: sp.Expr
    f_v: sp.Expr

    def initial(self, x: np.ndarray, t: float = 2.0):
        return self.exact(t, x)


def _as_expr(e):
    return sp.sympify(e, locals={"t": _t, "x": _x})


def _vectorise(expr):
    fn = sp.lambdify((_t, _x), expr, "numpy")

    def call(t, x):
        return np.broadcast_to(np.asarray(fn(t, x), dtype=float), np.shape(x)).copy()

    return call


def manufactured_forcing(u_star, v_star, params: ModelParams) -> ManufacturedProblem:
    """Forcing ``f_u = box u* - v*^3`` and ``f_v = box v* + c^2 v* - N du* du*``.

    ``u_star`` and ``v_star`` are sympy expressions (or strings) in ``t`` and ``x``.
    """
    u = _as_expr(u_star)
    v = _as_expr(v_star)
    N = params.N_array
    du = (sp.diff(u, _t), sp.diff(u, _x))
    box = lambda f: sp.diff(f, _t, 2) - sp.diff(f, _x, 2)  # noqa: E731
    q = sum(N[a, b] * du[a] * du[b] for a in range(2) for b in range(2))
    f_u = box(u) - (v**3 if params.cubic else 0)
    f_v = box(v) + params.c**2 * v - q
    fu_n, fv_n = _vectorise(f_u), _vectorise(f_v)
    ex = [_vectorise(e) for e in (u, du[0], v, sp.diff(v, _t))]

    def forcing(t, x):
        return fu_n(t, x), fv_n(t, x)

    def exact(t, x):
        return tuple(f(t, x) for f in ex)

    return ManufacturedProblem(forcing, exact, f_u, f_v)


# --- Klein-Gordon normal form -------------------------------------------------


def kg_transform(record: RunRecord, t_range: Optional[Tuple[float, float]] = None,
                 order: int = 2, edge: float = 2.0):
    """``w = v - N^{ab} d_a u d_b u / c^2`` and the residual of its equation.

    With ``Q = N^{ab} d_a u d_b u``,
    ``box w + c^2 w = g_v - (N^{ab} + N^{ba})[d_a(box u) d_b u + m^{mn} d_m d_a u d_n d_b u] / c^2``
    where ``g_v`` is the external Klein-Gordon forcing. Returns
    ``(times, w, residual)`` on the levels in ``t_range`` and the columns
    farther than ``edge`` from the boundary.
    """
    c2 = record.params.c**2
    N = record.params.N_array
    Ns = N + N.T
    uh, vh, fuh = record.u, record.v, record.fu
    nt = record.U.shape[0]
    pad = 4
    n_all = np.arange(nt)
    lo_t, hi_t = t_range if t_range is not None else (record.t0, record.t_end)
    rows = n_all[(record.times >= lo_t - 1e-12) & (record.times <= hi_t + 1e-12)]
    rows = rows[(rows >= pad) & (rows < nt - pad)]
    cols = np.flatnonzero(np.abs(record.x) <= record.x[-1] - edge)
    # w on a padded band of levels so that d_t^2 w has room
    band = np.arange(rows[0] - 2, rows[-1] + 3)
    nn, ii = np.meshgrid(band, cols, indexing="ij")
    du = [uh.partial(1, 0, nn, ii, order), uh.partial(0, 1, nn, ii, order)]
    q = sum(N[a, b] * du[a] * du[b] for a in range(2) for b in range(2))
    w_band = record.V[nn, ii] - q / c2
    wh = FieldHistory(record.t0 + band[0] * record.dt, record.dt, record.x[cols], w_band)
    nr = rows - band[0]
    inner = np.arange(2, cols.size - 2)
    rr, cc = np.meshgrid(nr, inner, indexing="ij")
    box_w = wh.partial(2, 0, rr, cc, order) - wh.partial(0, 2, rr, cc, order)
    n2, i2 = np.meshgrid(rows, cols[inner], indexing="ij")
    d1 = [uh.partial(1, 0, n2, i2, order), uh.partial(0, 1, n2, i2, order)]
    d2 = {(a, b): uh.partial(int(a == 0) + int(b == 0), int(a == 1) + int(b == 1), n2, i2, order)
          for a in range(2) for b in range(2)}
    dS = [fuh.partial(1, 0, n2, i2, order), fuh.partial(0, 1, n2, i2, order)]
    metric = (1.0, -1.0)
    box_q_half = 0.0
    for a in range(2):
        for b in range(2):
            if Ns[a, b] == 0.0:
                continue
            hess = sum(metric[m] * d2[(m, a)] * d2[(m, b)] for m in range(2))
            box_q_half = box_q_half + Ns[a, b] * (dS[a] * d1[b] + hess)
    w_rows = w_band[nr][:, inner]
    gv = 0.0
    if record.forcing is not None:
        times = record.times[rows]
        gv = np.stack([record.forcing(tt, record.x[cols[inner]])[1] for tt in times])
    residual = box_w + c2 * w_rows - gv + box_q_half / c2
    return record.times[rows], w_rows, residual
