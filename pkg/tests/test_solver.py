import numpy as np
import pytest

from combfol.cutoffs import rho
from combfol.foliation import T_flat
from combfol.solver import (CFLViolation, DomainTooSmall, FieldState, ModelParams, NonFiniteField, RunConfig,
                            SupportTruncated, WeightNotIntegrable, initial_data, kg_transform,
                            manufactured_forcing, resolve_halfwidth, run, step, t_max_for)

FREE = ModelParams(N=((0.0, 0.0), (0.0, 0.0)), cubic=False)


def test_model_params_validation():
    with pytest.raises(ValueError):
        ModelParams(c=0.0)
    with pytest.raises(ValueError):
        ModelParams(N=((1.0, 0.0), (0.0, 0.0)))
    assert ModelParams(N=((1.0, 0.0), (0.0, 0.0)), allow_non_null=True).coupled
    with pytest.raises(ValueError):
        ModelParams(delta=0.01)
    with pytest.raises(ValueError):
        ModelParams(gamma=1.002, delta=0.004)
    assert not FREE.coupled


def test_initial_data_zero_and_linear_in_epsilon():
    x = np.linspace(-20.0, 20.0, 2001)
    state, norms = initial_data("GaussianLike", ModelParams(epsilon=0.0), x)
    assert all(np.all(getattr(state, k) == 0.0) for k in ("u", "ut", "v", "vt"))
    assert all(v == 0.0 for v in norms.values())
    _, n1 = initial_data("PolyDecay", ModelParams(epsilon=1e-3), x)
    _, n2 = initial_data("PolyDecay", ModelParams(epsilon=2e-3), x)
    assert all(n2[k] == pytest.approx(2.0 * n1[k], rel=1e-14) for k in n1)
    assert len(n1) == 12


def test_weight_integrability_is_enforced():
    x = np.linspace(-5.0, 5.0, 11)
    with pytest.raises(WeightNotIntegrable):
        initial_data("PolyDecay", ModelParams(p=2.0), x)
    with pytest.raises(ValueError):
        initial_data("Custom", ModelParams(), x)
    with pytest.raises(ValueError):
        initial_data("Sawtooth", ModelParams(), x)


def _zero_state(n=201, dx=0.05):
    z = np.zeros(n)
    return FieldState(2.0, dx, -0.5 * (n - 1) * dx, z, z.copy(), z.copy(), z.copy())


def test_zero_data_stays_zero():
    st = _zero_state()
    for _ in range(200):
        st = step(st, ModelParams(), 0.025)
    assert all(np.all(getattr(st, k) == 0.0) for k in ("u", "ut", "v", "vt"))
    assert st.t == pytest.approx(7.0)


def test_cfl_violations():
    with pytest.raises(CFLViolation):
        step(_zero_state(), ModelParams(), 0.05)
    with pytest.raises(CFLViolation):
        run(RunConfig(cfl=0.95))


def test_linear_scheme_is_time_reversible():
    x = np.linspace(-20.0, 20.0, 1001)
    st0, _ = initial_data("GaussianLike", ModelParams(epsilon=1.0), x)
    st = st0
    dt = 0.5 * st.dx
    for _ in range(200):
        st = step(st, FREE, dt)
    assert np.max(np.abs(st.u - st0.u)) > 1e-2
    for _ in range(200):
        st = step(st, FREE, -dt)
    for k in ("u", "ut", "v", "vt"):
        assert np.max(np.abs(getattr(st, k) - getattr(st0, k))) < 1e-10


def _compact(x):
    b = rho(x / 4.0)
    z = np.zeros_like(x)
    return b, z, b, z


def test_finite_propagation_speed():
    rec = run(RunConfig(params=ModelParams(epsilon=1e-2), dx=0.02, halfwidth=30.0, t_max=8.0,
                        initial=_compact))
    for n in range(0, rec.U.shape[0], 50):
        t = rec.times[n]
        if t < 2.0:
            continue
        reach = 2.0 + (t - 2.0)
        numerical = 2.0 + (t - 2.0) / rec.cfl + 2 * rec.dx
        out = np.abs(rec.x) > numerical
        assert np.all(rec.U[n][out] == 0.0) and np.all(rec.V[n][out] == 0.0)
        far = np.abs(rec.x) > reach + 1.5
        peak = np.max(np.abs(rec.U[n])) + np.max(np.abs(rec.V[n]))
        assert np.max(np.abs(rec.U[n][far])) < 1e-4 * peak


def test_epsilon_zero_run_is_identically_zero():
    rec = run(RunConfig(params=ModelParams(epsilon=0.0), s_list=(2.0, 2.4)))
    for arr in (rec.U, rec.UT, rec.V, rec.VT, rec.FU, rec.FV):
        assert not np.any(arr)


def test_sizing_arithmetic():
    cfg = RunConfig()
    t_max = t_max_for(cfg)
    assert t_max >= 8.5 + cfg.margin
    assert t_max == pytest.approx(T_flat(4.0) + cfg.margin + 6 * cfg.dt)
    halfwidth, t2, support = resolve_halfwidth(cfg)
    assert t2 == t_max
    assert halfwidth == pytest.approx(t_max + support + 2.0)
    assert support > 0.0
    with pytest.raises(DomainTooSmall):
        resolve_halfwidth(RunConfig(halfwidth=5.0))


def test_edge_of_initial_data_is_checked():
    def wide(x):
        o = np.ones_like(x)
        return o, 0 * o, o, 0 * o

    with pytest.raises(SupportTruncated):
        run(RunConfig(halfwidth=5.0, t_max=2.5, initial=wide))


def test_blow_up_is_reported():
    with pytest.raises(NonFiniteField):
        run(RunConfig(params=ModelParams(epsilon=500.0), s_list=(2.0, 3.0)))


def test_record_levels_and_snapshots():
    rec = run(RunConfig(s_list=(2.0, 2.4), snapshot_times=(2.5, 3.0)))
    assert [round(s.t, 12) for s in rec.snapshots] == [2.5, 3.0]
    assert rec.times[rec.level(2.0)] == pytest.approx(2.0)
    with pytest.raises(IndexError):
        rec.level(100.0)
    assert rec.final_edge_ratio < 1e-8


def test_manufactured_zero_solution_needs_no_forcing():
    prob = manufactured_forcing(0, 0, ModelParams())
    x = np.linspace(-3.0, 3.0, 7)
    fu, fv = prob.forcing(2.5, x)
    assert np.all(fu == 0.0) and np.all(fv == 0.0)
    assert prob.f_u == 0 and prob.f_v == 0


def test_manufactured_forcing_reproduces_solution():
    prob = manufactured_forcing("exp(-x**2) * cos(t)", "exp(-x**2) * sin(t)", ModelParams())
    errs = []
    for dx in (0.08, 0.04):
        rec = run(RunConfig(dx=dx, halfwidth=12.0, t_max=3.0, forcing=prob.forcing, initial=prob.initial))
        n = rec.level(3.0)
        u, _, v, _ = prob.exact(3.0, rec.x)
        errs.append(max(np.max(np.abs(rec.U[n] - u)), np.max(np.abs(rec.V[n] - v))))
    assert errs[1] < 1e-3
    assert 3.0 < errs[0] / errs[1] < 5.0


def test_kg_transform_without_coupling(free_record):
    times, w, res = kg_transform(free_record, (3.0, 6.0))
    rows = [free_record.level(t) for t in times]
    x = free_record.x
    cols = np.flatnonzero(np.abs(x) <= x[-1] - 2.0)[2:-2]
    assert np.array_equal(w, free_record.V[np.ix_(rows, cols)])
    # the normal-form residual is then the discrete Klein-Gordon residual of v
    assert np.max(np.abs(res)) < 1e-3 * np.max(np.abs(w))


def test_kg_transform_zero_field():
    rec = run(RunConfig(params=ModelParams(epsilon=0.0), s_list=(2.0, 2.4)))
    _, w, res = kg_transform(rec, (2.5, 3.0))
    assert not np.any(w) and not np.any(res)
