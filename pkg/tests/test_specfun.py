import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from cslsim.errors import DomainError
from cslsim.specfun import (
    bessel_I,
    bessel_I_scaled,
    erf,
    log_bessel_I0,
    spherical_bessel_j,
    spherical_hankel_h1,
    spherical_jn_array,
    spherical_yn_array,
)


# -- independent oracles ------------------------------------------------------

def jl_series_oracle(ell, z, terms=60):
    """Truncated ascending series sum_m (-1)^m z^(2m+l) / (2^m m! (2l+2m+1)!!)."""
    z = complex(z)
    lead = 1.0 + 0.0j
    for k in range(1, ell + 1):
        lead *= z / (2 * k + 1)
    total = 0.0 + 0.0j
    term = lead
    for m in range(terms):
        total += term
        term *= -0.5 * z * z / ((m + 1) * (2 * ell + 2 * m + 3))
    return total


def iv_series_oracle(order, x, terms=80):
    total = 0.0
    for m in range(terms):
        total += (x / 2.0) ** (2 * m + order) / (
            math.factorial(m) * math.factorial(m + order))
    return total


def erf_quadrature_oracle(x):
    value, _ = quad(lambda t: 2.0 / math.sqrt(math.pi) * math.exp(-t * t),
                    0.0, x, epsabs=1e-14, epsrel=1e-13)
    return value


# -- spherical Bessel j -------------------------------------------------------

def test_j0_complex_closed_form():
    z = 1.0 + 1.0j
    expected = cmath.sin(z) / z
    assert spherical_bessel_j(0, z) == pytest.approx(expected, rel=1e-14)
    assert expected.real == pytest.approx(0.96671, abs=5e-5)
    assert expected.imag == pytest.approx(-0.33175, abs=5e-5)


def test_j_limiting_values_at_zero():
    assert spherical_bessel_j(0, 0.0) == 1.0
    assert spherical_bessel_j(1, 0.0) == 0.0
    assert spherical_bessel_j(7, 0.0) == 0.0


def test_j2_real_against_series_oracle():
    value = spherical_bessel_j(2, 5.0)
    expected = jl_series_oracle(2, 5.0)
    assert value.real == pytest.approx(expected.real, rel=1e-10)
    assert abs(value.imag) < 1e-15


@pytest.mark.parametrize("z", [0.01, 0.5 + 0.2j, 3.0, 2.0 - 1.5j, 10.0 + 4.0j, 50.0])
@pytest.mark.parametrize("ell", [1, 2, 5, 12])
def test_j_three_term_recurrence(ell, z):
    js = spherical_jn_array(ell + 1, z)
    lhs = js[ell - 1] + js[ell + 1]
    rhs = (2 * ell + 1) / complex(z) * js[ell]
    scale = max(abs(lhs), abs(rhs), 1e-280)
    assert abs(lhs - rhs) / scale < 1e-10


def test_j_small_argument_no_underflow_surprises():
    # z^l / (2l+1)!! limit honored for tiny arguments
    value = spherical_bessel_j(3, 1e-8)
    expected = (1e-8) ** 3 / (3 * 5 * 7)
    assert value.real == pytest.approx(expected, rel=1e-10)


def test_j_series_oracle_complex():
    for ell in (0, 1, 4):
        z = 0.8 + 0.6j
        assert spherical_bessel_j(ell, z) == pytest.approx(
            jl_series_oracle(ell, z), rel=1e-12)


def test_j_rejects_nonfinite():
    with pytest.raises(DomainError):
        spherical_bessel_j(0, complex(float("nan"), 0.0))
    with pytest.raises(DomainError):
        spherical_bessel_j(0, complex(1.0, float("inf")))


def test_j_real_argument_is_real():
    value = spherical_bessel_j(6, 2.5)
    assert value.imag == 0.0


# -- spherical Hankel h1 ------------------------------------------------------

def test_h0_closed_form():
    x = 1.0
    expected = -1.0j * cmath.exp(1.0j * x) / x
    assert spherical_hankel_h1(0, x) == pytest.approx(expected, rel=1e-13)


def test_y0_leading_behavior_near_zero():
    x = 1e-4
    y0 = spherical_hankel_h1(0, x).imag
    assert y0 == pytest.approx(-math.cos(x) / x, rel=1e-12)
    assert y0 < -1e3


@pytest.mark.parametrize("x", [0.5, 2.0, 10.0])
def test_wronskian_identity(x):
    # j_l(x) y_{l-1}(x) - j_{l-1}(x) y_l(x) = 1/x^2
    js = spherical_jn_array(20, x)
    ys = spherical_yn_array(20, x)
    for ell in range(1, 21):
        w = js[ell].real * ys[ell - 1] - js[ell - 1].real * ys[ell]
        assert w == pytest.approx(1.0 / (x * x), rel=1e-10)


def test_h1_rejects_nonpositive():
    with pytest.raises(DomainError):
        spherical_hankel_h1(0, 0.0)
    with pytest.raises(DomainError):
        spherical_hankel_h1(2, -1.0)


# -- modified Bessel I --------------------------------------------------------

def test_bessel_I_at_zero():
    assert bessel_I(0, 0.0) == 1.0
    assert bessel_I(1, 0.0) == 0.0
    assert bessel_I(2, 0.0) == 0.0


def test_bessel_I1_series_value():
    assert bessel_I(1, 2.0) == pytest.approx(1.5906368546, rel=1e-10)
    assert bessel_I(1, 2.0) == pytest.approx(iv_series_oracle(1, 2.0), rel=1e-12)


@pytest.mark.parametrize("x", [0.1, 1.0, 10.0])
def test_bessel_I_recurrence_identity(x):
    # I0(x) - I2(x) = 2 I1(x) / x
    lhs = bessel_I(0, x) - bessel_I(2, x)
    rhs = 2.0 * bessel_I(1, x) / x
    assert lhs == pytest.approx(rhs, rel=1e-12)


@pytest.mark.parametrize("order", [0, 1, 2])
def test_bessel_I_series_oracle_grid(order):
    for x in np.linspace(0.05, 25.0, 40):
        assert bessel_I(order, float(x)) == pytest.approx(
            iv_series_oracle(order, float(x)), rel=1e-12)


@pytest.mark.parametrize("order", [0, 1, 2])
def test_bessel_I_scaled_branch_agreement(order):
    # series and asymptotic branches must agree on an overlap region
    from cslsim.specfun import _iv_asymptotic_scaled, _iv_series_scaled
    for x in (30.0, 40.0, 60.0):
        assert _iv_series_scaled(order, x) == pytest.approx(
            _iv_asymptotic_scaled(order, x), rel=1e-13)


def test_bessel_I_scaled_large_argument_finite():
    for x in (100.0, 500.0, 5000.0):
        v = bessel_I_scaled(0, x)
        assert 0.0 < v < 1.0
    assert math.isfinite(log_bessel_I0(500.0))


@given(st.tuples(st.floats(min_value=0.0, max_value=60.0),
                 st.floats(min_value=1e-6, max_value=5.0)),
       st.sampled_from([0, 1, 2]))
@settings(max_examples=60, deadline=None)
def test_bessel_I_monotone_increasing(pair, order):
    x, dx = pair
    assert bessel_I_scaled(order, x + dx) * math.exp(dx) > bessel_I_scaled(order, x) * (1.0 - 1e-12)
    assert bessel_I(order, min(x, 600.0) + dx) >= bessel_I(order, min(x, 600.0))


def test_bessel_I_rejects_negative():
    with pytest.raises(DomainError):
        bessel_I(0, -0.5)
    with pytest.raises(DomainError):
        bessel_I(3, 1.0)


# -- erf ----------------------------------------------------------------------

def test_erf_odd_symmetry_and_zero():
    assert erf(0.0) == 0.0
    for x in (0.3, 1.7, 4.2):
        assert erf(-x) == -erf(x)
        assert -1.0 < erf(x) < 1.0


def test_erf_against_quadrature_value():
    assert erf(0.785) == pytest.approx(erf_quadrature_oracle(0.785), abs=1e-12)
    assert erf(0.785) == pytest.approx(0.7330689, rel=1e-6)


def test_erf_tail():
    assert abs(erf(6.0) - 1.0) < 1e-15


def test_erf_quadrature_agreement_random_points():
    rng = np.random.default_rng(20260826)
    xs = rng.uniform(-6.0, 6.0, size=1000)
    for x in xs:
        assert abs(erf(float(x)) - erf_quadrature_oracle(float(x))) < 1e-10


def test_erf_rejects_nonfinite():
    with pytest.raises(DomainError):
        erf(float("inf"))
