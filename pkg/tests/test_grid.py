import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from combfol.grid import (FieldHistory, InsufficientWindow, Operator, StencilOutOfDomain, central_weights,
                          lagrange_weights, operator_words, vector_field_operator)

from .conftest import analytic_history


def test_central_weights_low_order():
    off, w = central_weights(1, 2)
    assert list(off) == [-1, 0, 1] and np.allclose(w, [-0.5, 0.0, 0.5])
    off, w = central_weights(2, 2)
    assert np.allclose(w, [1.0, -2.0, 1.0])
    off, w = central_weights(1, 4)
    assert np.allclose(w, [1 / 12, -2 / 3, 0.0, 2 / 3, -1 / 12])


@pytest.mark.parametrize("deriv", [0, 1, 2, 3, 4])
def test_central_weights_differentiate_polynomials_exactly(deriv):
    off, w = central_weights(deriv, 4)
    for p in range(deriv, deriv + 4):
        got = float(np.sum(w * off.astype(float) ** p))
        want = float(np.prod(range(p, p - deriv, -1))) if p == deriv else 0.0
        assert got == pytest.approx(want, abs=1e-10)


def test_lagrange_weights_reproduce_cubics():
    nodes = np.array([[0.0, 1.0, 2.0, 3.0]])
    tq = np.array([1.37])
    lw = lagrange_weights(nodes, tq)
    poly = lambda z: 2 - z + 0.5 * z**2 - 0.25 * z**3
    assert float((lw @ poly(nodes[0]))[0]) == pytest.approx(poly(1.37), abs=1e-13)


def test_operator_words_counts():
    # ordered multi-indices over two partials plus powers of L
    counts = [len(operator_words(k)) for k in range(4)]
    assert counts == [1, 4, 11, 26]


def test_vector_field_operator_expands_boost():
    L = vector_field_operator((), 1)
    assert L.terms == {(1, 0): {(0, 1): 1.0}, (0, 1): {(1, 0): 1.0}}
    # [d_x, L] = d_t
    lhs = vector_field_operator((1,), 1).terms
    rhs = Operator().boost().dx().terms
    assert lhs == rhs
    comm = Operator().boost().dx()
    other = Operator().dx().boost()
    diff = {k: {m: comm.terms.get(k, {}).get(m, 0.0) - other.terms.get(k, {}).get(m, 0.0)
                for m in set(comm.terms.get(k, {})) | set(other.terms.get(k, {}))}
            for k in set(comm.terms) | set(other.terms)}
    diff = {k: {m: c for m, c in v.items() if c} for k, v in diff.items()}
    diff = {k: v for k, v in diff.items() if v}
    assert diff == {(1, 0): {(0, 0): 1.0}}


@settings(max_examples=40, deadline=None)
@given(st.floats(2.0, 5.0), st.floats(-3.0, 3.0))
def test_operator_apply_matches_analytic_boost_squared(t, x):
    # u = t^3 x: Lu = x*3t^2 x + t*t^3 = 3 t^2 x^2 + t^4; L^2 u by hand
    op = vector_field_operator((), 2)
    vals = {(0, 0): t**3 * x, (1, 0): 3 * t**2 * x, (0, 1): t**3, (2, 0): 6 * t * x,
            (1, 1): 3 * t**2, (0, 2): 0.0}
    lu_t = 6 * t * x * x + 4 * t**3
    lu_x = 6 * t * t * x
    want = x * lu_t + t * lu_x
    assert op.apply(vals, t, x) == pytest.approx(want, rel=1e-12)


def test_compose_matches_nested_application():
    a = vector_field_operator((0,), 1)
    b = vector_field_operator((1,), 0)
    ab = a.compose(b)
    # d_t L d_x on u = t^2 x^2: d_x u = 2 t^2 x, L of that = 4 t x^2 + 2 t^3, d_t gives 4 x^2 + 6 t^2
    t, x = 2.5, -1.25
    vals = {(0, 0): t * t * x * x, (1, 0): 2 * t * x * x, (0, 1): 2 * t * t * x, (2, 0): 2 * x * x,
            (1, 1): 4 * t * x, (0, 2): 2 * t * t, (3, 0): 0.0, (2, 1): 4 * x, (1, 2): 4 * t, (0, 3): 0.0}
    assert ab.apply(vals, t, x) == pytest.approx(4 * x * x + 6 * t * t, rel=1e-14)
    assert ab.order == 3
    assert Operator().compose(a).terms == a.terms


def test_history_partials_and_errors():
    hist = analytic_history(lambda t, x: np.sin(x) * np.exp(-0.1 * t),
                            lambda t, x: -0.1 * np.sin(x) * np.exp(-0.1 * t),
                            t_range=(2.0, 2.5), x_range=(-2.0, 2.0), h=0.01)
    n = 20
    t = hist.t0 + n * hist.dt
    got = hist.grid_partial(1, 1, n)
    ok = np.isfinite(got)
    assert np.allclose(got[ok], (-0.1 * np.cos(hist.x) * np.exp(-0.1 * t))[ok], atol=1e-9)
    assert np.isnan(got[0]) and np.isnan(got[-1])
    # d_t comes from the stored rate; d_t^2 needs a time stencil
    assert np.isfinite(hist.partial(1, 0, [0], [50])).all()
    with pytest.raises(InsufficientWindow):
        hist.partial(2, 0, [0], [50])
    with pytest.raises(StencilOutOfDomain):
        hist.partial(0, 1, [20], [0])
    fh = FieldHistory(0.0, 0.1, np.arange(10.0), np.zeros((3, 10)))
    with pytest.raises(InsufficientWindow):
        fh.on_columns([(0, 0)], np.array([0.25]), np.array([5]))
