import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from overdet.errors import InvalidInputError
from overdet.geometry import TentNotch
from overdet.spectral import (
    BoundaryFunction,
    Discretization,
    analyze,
    harmonic_dimension,
    nodes,
    project_zero_mean,
    spectral_derivative,
)

coef = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def test_cos2_has_unit_coefficient_on_mode2():
    phi = analyze(np.cos(2 * nodes(256)))
    assert phi.coefficient(2) == pytest.approx([1.0, 0.0], abs=1e-14)
    for k in phi.coeffs:
        if k != 2:
            assert np.all(np.abs(phi.coefficient(k)) < 1e-14)


def test_mean_removal_leaves_other_modes():
    s = 3.0 + np.sin(5 * nodes(128))
    phi = project_zero_mean(analyze(s))
    assert 0 not in phi.coeffs
    assert phi.coefficient(5) == pytest.approx([0.0, 1.0], abs=1e-14)
    assert np.mean(phi.samples) == pytest.approx(0.0, abs=1e-14)


def test_nonfinite_samples_rejected():
    s = np.ones(64)
    s[3] = np.nan
    with pytest.raises(InvalidInputError):
        analyze(s)


def test_odd_sample_count_rejected():
    with pytest.raises(InvalidInputError):
        analyze(np.ones(63))


def test_discretization_validation():
    Discretization(64, 16)
    for bad in [dict(M=63), dict(M=32, K=4), dict(M=128, K=33), dict(quad_tol=0.0)]:
        with pytest.raises(InvalidInputError):
            Discretization(**bad)


@pytest.mark.parametrize("N,k,d", [(2, 0, 1), (2, 3, 2), (3, 0, 1), (3, 1, 3), (3, 2, 5), (3, 4, 9), (5, 2, 14)])
def test_harmonic_dimension(N, k, d):
    assert harmonic_dimension(N, k) == d


def test_higher_dimension_coefficient_shapes():
    BoundaryFunction(3, {2: np.zeros(5)})
    with pytest.raises(InvalidInputError):
        BoundaryFunction(3, {2: np.zeros(2)})
    with pytest.raises(InvalidInputError):
        BoundaryFunction(3, {1: np.zeros(3)}).synthesize(64)


def test_tent_fourier_coefficients_match_quadrature():
    tent = TentNotch(0.05, 0.5, t=0.2)
    phi = analyze(tent.synthesize(1 << 14), K=12)
    lo, hi = tent.center - tent.half_width, tent.center + tent.half_width
    pts = [tent.center]
    for k in range(0, 13):
        a = quad(lambda x: tent.evaluate(x) * np.cos(k * x), lo, hi, points=pts)[0] / np.pi
        b = quad(lambda x: tent.evaluate(x) * np.sin(k * x), lo, hi, points=pts)[0] / np.pi
        if k == 0:
            assert phi.coefficient(0)[0] == pytest.approx(a / 2, abs=1e-7)
        else:
            assert phi.coefficient(k) == pytest.approx([a, b], abs=1e-7)


def test_spectral_derivative_of_trig_polynomial():
    th = nodes(128)
    v = np.cos(3 * th) + 0.5 * np.sin(7 * th)
    assert np.allclose(spectral_derivative(v, 1), -3 * np.sin(3 * th) + 3.5 * np.cos(7 * th), atol=1e-12)
    assert np.allclose(spectral_derivative(v, 2), -9 * np.cos(3 * th) - 24.5 * np.sin(7 * th), atol=1e-11)


@settings(max_examples=60, deadline=None)
@given(st.lists(coef, min_size=1, max_size=20), st.lists(coef, min_size=1, max_size=20))
def test_roundtrip_synthesize_analyze(a, b):
    n = max(len(a), len(b))
    a = np.array(a + [0.0] * (n - len(a)))
    b = np.array(b + [0.0] * (n - len(b)))
    b[0] = 0.0
    phi = BoundaryFunction.from_trig(a, b)
    back = analyze(phi.synthesize(64), K=n - 1)
    a2, b2 = back.trig(n - 1)
    assert np.allclose(a2, a, atol=1e-12) and np.allclose(b2, b, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.lists(coef, min_size=2, max_size=16), st.lists(coef, min_size=2, max_size=16))
def test_parseval(a, b):
    n = max(len(a), len(b))
    a = np.array(a + [0.0] * (n - len(a)))
    b = np.array(b + [0.0] * (n - len(b)))
    b[0] = 0.0
    phi = BoundaryFunction.from_trig(a, b)
    s = phi.synthesize(64)
    l2 = np.sum(s**2) * 2 * np.pi / 64
    ca, cb = phi.l2_coefficients()
    assert l2 == pytest.approx(np.sum(ca**2) + np.sum(cb**2), rel=1e-12, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.lists(coef, min_size=2, max_size=10), st.floats(-5, 5), st.floats(-5, 5))
def test_linearity(a, alpha, beta):
    f = BoundaryFunction.from_trig(np.array(a))
    g = BoundaryFunction.mode(3, 1.5, "sin")
    lhs = (alpha * f + beta * g).synthesize(64)
    assert np.allclose(lhs, alpha * f.synthesize(64) + beta * g.synthesize(64), atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.lists(coef, min_size=1, max_size=12))
def test_projection_is_idempotent_and_mean_free(a):
    phi = analyze(BoundaryFunction.from_trig(np.array(a)).synthesize(64))
    p = project_zero_mean(phi)
    assert np.mean(p.samples) == pytest.approx(0.0, abs=1e-10)
    pp = project_zero_mean(p)
    assert pp.coeffs.keys() == p.coeffs.keys()
