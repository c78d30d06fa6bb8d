import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from combfol.energy import (CSV_COLUMNS, EnergyBreakdown, SupportTruncated, WindowDoesNotCoverSlice,
                            cone_energy, energy_identity_residual, high_order_energy, hyperbolic_forms,
                            slice_energy, transition_control_norms, transition_forms, write_energy_csv)
from combfol.foliation import T_flat, T_of, cone_radius, dT_dx
from combfol.grid import FieldHistory
from combfol.verify.sobolev import make_corpus
from combfol.weights import weight, zeta

from .conftest import analytic_history

S_LIST = (2.0, 2.4, 2.8, 3.2, 3.6, 4.0)


def _zero_history():
    x = np.linspace(-15.0, 15.0, 1501)
    t0, dt = 1.5, 0.01
    z = np.zeros((801, x.size))
    return FieldHistory(t0, dt, x, z, z.copy())


def test_zero_field_gives_zero_energies():
    hist = _zero_history()
    e = slice_energy(hist, 3.0, 1.2, 1.0)
    assert (e.EH, e.ET, e.EP) == (0.0, 0.0, 0.0)
    assert cone_energy(hist, 2.0, 3.0, 1.0) == 0.0
    res = energy_identity_residual(hist, hist, 2.0, 3.0, "Exterior", 1.2, 1.0)
    assert res.residual == 0.0 and res.dissipation == 0.0


def test_static_field_energies_match_closed_form():
    # u = x exp(-x^2) frozen in time, c = 0: the density reduces to (1 + w)^2 u_x^2
    xs = sp.symbols("x", real=True)
    ux_expr = sp.diff(xs * sp.exp(-xs**2), xs)
    a = sp.Rational(3, 2)
    eh_exact = float(sp.integrate(ux_expr**2, (xs, -a, a)))
    ux = sp.lambdify(xs, ux_expr, "numpy")

    errs = []
    for h in (0.02, 0.01):
        hist = analytic_history(lambda t, x: x * np.exp(-x * x) + 0.0 * t, lambda t, x: 0.0 * t * x,
                                t_range=(1.5, 3.5), x_range=(-12.0, 12.0), h=h)
        e = slice_energy(hist, 2.0, 1.2, 0.0)
        errs.append(abs(e.EH - eh_exact))
    assert errs[1] < 1e-7 * eh_exact
    # fourth-order stencils and spline quadrature
    assert errs[0] / errs[1] > 12.0

    band = 2 * quad(lambda y: ux(y) ** 2, 1.5, 2.5, epsabs=1e-14)[0]
    assert e.ET == pytest.approx(band, rel=1e-7)
    tf = T_flat(2.0)
    flat = 2 * quad(lambda y: (1.0 + weight(tf, y, 1.2)[0]) ** 2 * ux(y) ** 2, 2.5, 12.0,
                    epsabs=1e-15, limit=200)[0]
    assert e.EP == pytest.approx(flat, rel=1e-6)


@settings(max_examples=200, deadline=None)
@given(st.floats(2.0, 10.0), st.floats(-1.0, 1.0), st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5),
       st.floats(0.0, 2.0))
def test_completed_square_forms_agree(s, frac, ut, ux, val, c):
    x = frac * cone_radius(s)
    t = np.sqrt(s * s + x * x)
    forms = hyperbolic_forms(s, x, t, ut, ux, val, c)
    scale = 1.0 + ut * ut + ux * ux + c * c * val * val
    assert abs(forms[1] - forms[0]) <= 1e-12 * scale
    assert abs(forms[2] - forms[0]) <= 1e-12 * scale
    xb = np.sign(frac or 1.0) * (cone_radius(s) + abs(frac))
    tr = transition_forms(s, xb, ut, ux, val, c)
    assert abs(tr[1] - tr[0]) <= 1e-12 * scale
    assert abs(tr[2] - tr[0]) <= 1e-12 * scale
    assert min(tr) >= -1e-12 * scale


def _bump(z):
    return np.exp(-4.0 * (z + 1.0) ** 2)


def _dbump(z):
    return -8.0 * (z + 1.0) * _bump(z)


def test_cone_flux_of_outgoing_and_incoming_waves():
    box = dict(t_range=(2.0, 9.0), x_range=(-20.0, 20.0), h=0.02)
    out = analytic_history(lambda t, x: _bump(x - t), lambda t, x: -_dbump(x - t), **box)
    inc = analytic_history(lambda t, x: _bump(x + t - 7.0), lambda t, x: _dbump(x + t - 7.0), **box)
    ek_out = cone_energy(out, 2.0, 4.0, 0.0)
    ek_in = cone_energy(inc, 2.0, 4.0, 0.0)
    assert ek_in > 0.0
    assert ek_out < 1e-8 * ek_in
    assert cone_energy(inc, 3.0, 3.0, 0.0) == 0.0
    with pytest.raises(ValueError):
        cone_energy(inc, 3.0, 2.0, 0.0)


def test_high_order_zero_order_equals_slice_energy():
    hist = analytic_history(lambda t, x: np.exp(-(x - 0.3 * t) ** 2), lambda t, x: 0.6 * (x - 0.3 * t)
                            * np.exp(-(x - 0.3 * t) ** 2), t_range=(1.5, 4.0), x_range=(-12, 12), h=0.01)
    a = high_order_energy(hist, 2.4, 0, 1.2, 0.5)
    b = slice_energy(hist, 2.4, 1.2, 0.5)
    assert (a.EH, a.ET, a.EP) == pytest.approx((b.EH, b.ET, b.EP), rel=1e-14)
    assert list(a.table) == [(0, 0)]


def test_boost_invariant_field_has_no_boost_energy():
    # u = phi(t^2 - x^2) is annihilated by L
    def phi(q):
        return np.exp(-((q - 4.0) ** 2) / 8.0)

    def dphi(q):
        return -(q - 4.0) / 4.0 * phi(q)

    hist = analytic_history(lambda t, x: phi(t * t - x * x), lambda t, x: 2.0 * t * dphi(t * t - x * x),
                            t_range=(1.5, 3.5), x_range=(-12.0, 12.0), h=0.01)
    e = high_order_energy(hist, 2.0, 1, 1.2, 0.0)
    assert set(e.table) == {(0, 0), (1, 0), (0, 1)}
    assert e.table[(1, 0)].total > 0.0
    assert e.table[(0, 1)].total < 1e-10 * e.table[(0, 0)].total
    for entry in e.table.values():
        assert min(entry.EH, entry.ET, entry.EP) >= 0.0
    assert e.total == pytest.approx(sum(v.total for v in e.table.values()), rel=1e-14)


def _conservation(record):
    p = record.params
    rows = [high_order_energy(record.u, s, 1, p.gamma, 0.0, s0=S_LIST[0]) for s in S_LIST]
    drift, growth = 0.0, 0.0
    for key in rows[0].table:
        interior = np.array([r.table[key].EH - r.table[key].EK for r in rows])
        exterior = np.array([r.table[key].EE + r.table[key].EK for r in rows])
        drift = max(drift, np.ptp(interior) / np.max(np.abs(interior)))
        growth = max(growth, np.max(np.diff(exterior)) / np.max(exterior))
    return drift, growth


def test_free_wave_energy_table_balances(free_record):
    from combfol.solver import RunConfig, run

    coarse = run(RunConfig(params=free_record.params, dx=0.04))
    d1, g1 = _conservation(coarse)
    d2, g2 = _conservation(free_record)
    # interior entries minus incoming cone flux are constant in s up to O(h^2)
    assert d2 < 1e-3 and d1 / d2 > 3.0
    # weighted exterior entries plus cone flux are nonincreasing up to O(h^2)
    assert g2 < 1e-4 and (g2 <= 0.0 or g1 / g2 > 3.0)


def test_exterior_dissipation_nonnegative(default_record):
    rec = default_record
    for a, b in zip(S_LIST[:-1], S_LIST[1:]):
        res = energy_identity_residual(rec.u, rec.fu, a, b, "Exterior", rec.params.gamma, 0.0)
        assert res.dissipation >= 0.0
        assert res.residual < 1e-2
    with pytest.raises(ValueError):
        energy_identity_residual(rec.u, rec.fu, 2.0, 2.4, "Both", 1.2, 0.0)


def test_transition_norms_controlled_by_transition_energy():
    corpus = make_corpus(20, seed=5)
    for s in (2.0, 3.0):
        a = cone_radius(s)
        x = np.linspace(-a - 3.0, a + 3.0, 6001)
        t = np.asarray(T_of(s, x))
        band = (np.abs(x) >= a) & (np.abs(x) <= a + 1.0)
        xb = np.abs(x[band])
        # |1 - xi r / sqrt(s^2 + r^2)| <= C' zeta on the band
        xi_v = 1.0 - (1.0 - np.asarray(dT_dx(s, xb)) * np.sqrt(s * s + xb * xb) / xb)
        c_prime = np.max(np.abs(1.0 - xi_v * xb / np.sqrt(s * s + xb * xb)) / zeta(s, xb))
        for f in corpus:
            val, ut, ux = f.jet(t, x, anchor=a + 0.5)
            n = transition_control_norms(s, x, ut, ux, val)
            root = np.sqrt(n["ET"])
            assert n["zeta_dt"] <= root * (1 + 1e-9)
            assert n["zeta_dx"] <= root * (1 + 1e-9)
            assert n["null"] <= (1.0 + c_prime) * root * (1 + 1e-9)


def test_support_and_window_errors():
    hist = analytic_history(lambda t, x: np.exp(-0.01 * x * x) + 0.0 * t, lambda t, x: 0.0 * x * t,
                            t_range=(1.5, 3.0), x_range=(-5.0, 5.0), h=0.02)
    with pytest.raises(SupportTruncated):
        slice_energy(hist, 2.0, 1.2, 0.0)
    with pytest.raises(WindowDoesNotCoverSlice):
        slice_energy(hist, 3.0, 1.2, 0.0)


def test_energy_csv_layout(tmp_path):
    br = EnergyBreakdown(2.0, 1.0, 2.0, 3.0, 0.5)
    br.table = {(0, 0): EnergyBreakdown(2.0, 0.5, 1.0, 1.5, 0.25), (1, 0): EnergyBreakdown(2.0, 0.5, 1.0, 1.5, 0.25)}
    path = tmp_path / "e.csv"
    write_energy_csv(path, [("u", br), ("v", EnergyBreakdown(2.0, 1.0, 0.0, 0.0))])
    lines = path.read_text().splitlines()
    assert tuple(lines[0].split(",")) == CSV_COLUMNS
    assert len(lines) == 4
    assert lines[1].startswith("u,2.0,0,0,")
    assert lines[3].startswith("v,2.0,0,0,1.0,")
