import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from overdet import formulas as fm
from overdet.errors import DegenerateDenominatorError, InvalidInputError, ResonanceError
from overdet.formulas import ProblemSpec
from overdet.spectral import BoundaryFunction

B05 = ProblemSpec.bernoulli(0.5)
TP2 = ProblemSpec.two_phase(2.0, 0.5)
GRID = [(N, R, s) for N in (2, 3, 5) for R in (0.3, 0.5, 0.9) for s in (0.5, 2.0, 10.0)]


def test_radial_state_boundary_values():
    for N in (2, 3, 4):
        spec = ProblemSpec.bernoulli(0.4, N)
        assert fm.radial_state(0.4, spec) == pytest.approx(1.0, abs=1e-15)
        assert fm.radial_state(1.0, spec) == pytest.approx(0.0, abs=1e-15)


def test_radial_state_values():
    assert fm.radial_state(math.sqrt(0.5), B05) == pytest.approx(0.5, abs=1e-15)
    assert fm.radial_state(0.75, ProblemSpec.bernoulli(0.5, 3)) == pytest.approx(1 / 3, abs=1e-15)
    with pytest.raises(InvalidInputError):
        fm.radial_state(0.3, B05)


def test_boundary_derivatives():
    dn, dnn = fm.boundary_derivatives(B05)
    assert dn == pytest.approx(-1.442695, abs=1e-6) and dnn == pytest.approx(1.442695, abs=1e-6)
    assert fm.boundary_derivatives(ProblemSpec.bernoulli(0.5, 3)) == pytest.approx((-1.0, 2.0), abs=1e-15)


def test_linearization_coefficients_k1():
    am, bm, ap, bp = fm.linearization_coeffs_bernoulli(1, B05)
    assert ap == pytest.approx(-0.480898, abs=1e-6)
    assert bp == pytest.approx(1.923592, abs=2e-6)
    assert -ap + bp == pytest.approx(2.404490, abs=3e-6)
    assert am + bm == pytest.approx(0.0, abs=1e-15)


def test_bernoulli_multipliers_k1():
    m_f, m_g = fm.multipliers_bernoulli(1, B05)
    assert m_g == pytest.approx(3.847186, abs=1e-6)
    assert m_g == pytest.approx(2.404490 + 1.442695, abs=1e-5)
    assert m_f == pytest.approx(-1.923594, abs=2e-6)


def test_exact_inner_symbol_is_rescaled():
    for k in range(1, 9):
        assert fm.inner_multiplier_bernoulli_exact(k, B05) == pytest.approx(fm.multipliers_bernoulli(k, B05)[0] / 0.5)


def test_rigid_translation_gives_equal_shift():
    # translating both circles moves every radius by the same cos(theta) amplitude
    for R in (0.2, 0.5, 0.8):
        spec = ProblemSpec.bernoulli(R)
        m_g = fm.beta(1, spec)
        assert -fm.inner_multiplier_bernoulli_exact(1, spec) / m_g == pytest.approx(1.0, rel=1e-13)


@pytest.mark.parametrize("N,R", [(N, R) for N in (2, 3, 5) for R in (0.1, 0.5, 0.9, 0.99)])
def test_beta_never_vanishes_and_grows_linearly(N, R):
    spec = ProblemSpec.bernoulli(R, N)
    ratios = np.array([fm.beta(k, spec) / k for k in range(1, 65)])
    assert np.all(ratios > 0)
    assert ratios.max() / ratios.min() < 200


def test_two_phase_k1():
    m_f, m_g, F = fm.multipliers_two_phase(1, TP2)
    assert F == pytest.approx(22.0, abs=1e-13)
    assert m_f == pytest.approx(-1 / 11, abs=1e-15)
    assert m_g == pytest.approx(1 / 11, abs=1e-15)


def test_sigma_singular_values():
    assert fm.sigma_singular(2, 2, 0.9) == pytest.approx(0.326216, abs=5e-5)
    assert fm.sigma_singular(2, 2, 0.5) == pytest.approx(-26 / 38, abs=1e-15)
    assert not fm.is_singular(-26 / 38, 2, 0.5, 64)


@pytest.mark.parametrize("N,R", [(N, R) for N in (2, 3, 5) for R in (0.3, 0.5, 0.9)])
def test_s1_is_one(N, R):
    assert fm.sigma_singular(1, N, R) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("N,R", [(2, 0.9), (3, 0.9), (2, 0.95)])
def test_resonance_kills_m_g(N, R):
    for k in range(2, 10):
        s = fm.sigma_singular(k, N, R)
        if s <= 0:
            continue
        _, m_g, _ = fm.multipliers_two_phase(k, ProblemSpec.two_phase(s, R, N))
        assert abs(m_g) < 1e-12


def test_degenerate_denominator_detected():
    # F vanishes only for sigma_c < 0; emulate with a tolerance
    with pytest.raises(DegenerateDenominatorError):
        fm.multipliers_two_phase(1, TP2, tol=1e3)


@pytest.mark.parametrize("N,R,s", GRID)
def test_cross_identity(N, R, s):
    for spec in (ProblemSpec.bernoulli(R, N), ProblemSpec.two_phase(s, R, N)):
        for k in range(1, 65):
            m_f, m_g = fm.multipliers(k, spec)
            c = fm.asymptotic_coefficient(k, spec)
            assert abs(c - (-m_f / m_g)) <= 1e-12 * max(1.0, abs(c))


@pytest.mark.parametrize("R", [0.3, 0.5, 0.9])
def test_two_dimensional_limit(R):
    assert fm.flux_constant(2 + 1e-6, R) == pytest.approx(fm.flux_constant(2, R), abs=1e-4)
    # general-N multiplier expressions evaluated just above N = 2
    N = 2 + 1e-6
    c = fm.flux_constant(N, R)
    for k in (1, 2, 5):
        den = R ** (2 - N - k) - R**k
        m_g = c * ((1 - k) * R**k + (1 - N - k) * R ** (2 - N - k)) / den
        assert m_g == pytest.approx(fm.beta(k, ProblemSpec.bernoulli(R)), abs=1e-4)


def test_first_order_examples():
    g = fm.first_order_g(BoundaryFunction.mode(1), B05)
    assert g.coefficient(1) == pytest.approx([0.5, 0.0], abs=1e-15)
    g = fm.first_order_g(BoundaryFunction.mode(1), TP2)
    assert g.coefficient(1) == pytest.approx([1.0, 0.0], abs=1e-15)
    g = fm.first_order_g(BoundaryFunction.from_trig([3.0]), B05)
    assert g.sup_norm() == 0.0


def test_first_order_refuses_resonance():
    s2 = fm.sigma_singular(2, 2, 0.9)
    spec = ProblemSpec.two_phase(s2 + 1e-12, 0.9)
    with pytest.raises(ResonanceError) as err:
        fm.first_order_g(BoundaryFunction.mode(2), spec, K=8)
    assert err.value.k == 2 and "k=2" in str(err.value)


def test_torsion_limit():
    r = np.linspace(0, 1, 11)
    u = fm.trivial_two_phase_radial(r, ProblemSpec.two_phase(1 + 1e-12, 0.5))
    assert np.allclose(u, (1 - r**2) / 4, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.05, 20).filter(lambda s: abs(s - 1) > 1e-3), st.integers(2, 5))
def test_two_phase_radial_transmission(R, s, N):
    spec = ProblemSpec.two_phase(s, R, N)
    lo = fm.trivial_two_phase_radial(R - 1e-13, spec)
    hi = fm.trivial_two_phase_radial(R, spec)
    assert lo == pytest.approx(hi, abs=1e-11)
    flux_in = s * fm.trivial_two_phase_radial(R * (1 - 1e-12), spec, derivative=1)
    flux_out = fm.trivial_two_phase_radial(R, spec, derivative=1)
    assert flux_in == pytest.approx(flux_out, rel=1e-9)
    assert fm.trivial_two_phase_radial(1.0, spec) == 0.0


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 64), st.floats(0.05, 0.95), st.integers(2, 6), st.floats(0.01, 50))
def test_identity_property(k, R, N, s):
    if abs(s - 1) < 1e-6 or abs(s - fm.sigma_singular(k, N, R)) < 1e-6:
        return
    spec = ProblemSpec.two_phase(s, R, N)
    m_f, m_g = fm.multipliers(k, spec)
    c = fm.asymptotic_coefficient(k, spec)
    assert c == pytest.approx(-m_f / m_g, rel=1e-9, abs=1e-12)


def test_spec_validation():
    for bad in [dict(N=1), dict(R=1.0), dict(R=0.0), dict(N=2.5)]:
        with pytest.raises(InvalidInputError):
            ProblemSpec(**bad)
    for s in (None, 1.0, -2.0, 0.0):
        with pytest.raises(InvalidInputError):
            ProblemSpec.two_phase(s)


def test_table_columns():
    assert fm.MultiplierTable.build(B05, 4).columns() == ["k", "m_f", "m_g"]
    t = fm.MultiplierTable.build(TP2, 2)
    assert t.columns() == ["k", "m_f", "m_g", "F", "s_k"]
    assert list(t.rows())[0] == pytest.approx([1, -1 / 11, 1 / 11, 22.0, 1.0])
