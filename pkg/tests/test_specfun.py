import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grushin.specfun import (
    DomainError,
    PoleError,
    bessel_i,
    bessel_i_prime,
    bessel_j,
    bessel_k,
    bessel_k_prime,
    bessel_y,
    gamma_real,
    hankel,
)

mp.mp.dps = 40

ORDERS = [0.5, 0.55, 0.6, 0.75, 0.9, 1.0, 1.25, 1.5]
orders = st.floats(0.5, 1.5)


def test_gamma_known_values():
    assert gamma_real(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-15)
    assert gamma_real(-0.5) == pytest.approx(-2.0 * math.sqrt(math.pi), rel=1e-15)
    assert gamma_real(1.0) == 1.0


def test_gamma_matches_mpmath_on_minus_two_to_ten():
    xs = [x for x in np.linspace(-2, 10, 1201) if not (x <= 0 and abs(x - round(x)) < 1e-9)]
    worst = max(abs(gamma_real(x) / float(mp.gamma(x)) - 1) for x in xs)
    assert worst <= 1e-13


@pytest.mark.parametrize("x", [0.0, -1.0, -2.0, -7.0])
def test_gamma_poles_raise(x):
    with pytest.raises(PoleError):
        gamma_real(x)


@pytest.mark.parametrize("f", [bessel_i, bessel_k, bessel_j, bessel_y])
@pytest.mark.parametrize("x", [0.0, -1.0, float("nan")])
def test_bessel_domain(f, x):
    with pytest.raises(DomainError):
        f(0.75, x)


def test_i_overflow_is_signalled():
    with pytest.raises(OverflowError):
        bessel_i(0.5, 800.0)


@pytest.mark.parametrize("nu", ORDERS)
def test_k_matches_mpmath(nu):
    xs = np.geomspace(1e-6, 50, 80)
    worst = max(abs(bessel_k(nu, x) / float(mp.besselk(nu, x)) - 1) for x in xs)
    assert worst <= 1e-12


@pytest.mark.parametrize("nu", ORDERS)
def test_i_matches_mpmath(nu):
    xs = np.geomspace(1e-6, 50, 80)
    worst = max(abs(bessel_i(nu, x) / float(mp.besseli(nu, x)) - 1) for x in xs)
    assert worst <= 1e-12


def test_k_tabulated_value():
    # mpmath besselk(0.75, 0.5) at 40 digits
    assert bessel_k(0.75, 0.5) == pytest.approx(1.2917498162179126, rel=1e-13)


@pytest.mark.parametrize("nu", [0.5, 0.6, 0.75, 0.9, 1.25])
def test_hankel_matches_mpmath(nu):
    worst = 0.0
    for x in np.geomspace(1e-3, 200, 90):
        for kind, ref in ((1, mp.hankel1), (2, mp.hankel2)):
            r = complex(ref(nu, x))
            worst = max(worst, abs(hankel(kind, nu, x) - r) / abs(r))
    assert worst <= 1e-12


@pytest.mark.parametrize("nu", [0.5, 0.75, 1.25])
def test_j_y_match_mpmath(nu):
    for x in np.geomspace(1e-2, 150, 60):
        j, y = float(mp.besselj(nu, x)), float(mp.bessely(nu, x))
        scale = math.hypot(j, y)
        assert abs(bessel_j(nu, x) - j) <= 1e-12 * scale
        assert abs(bessel_y(nu, x) - y) <= 1e-12 * scale


def test_half_integer_closed_forms():
    for x in (0.1, 1.0, 2.0, 5.0, 20.0):
        assert bessel_k(0.5, x) == pytest.approx(math.sqrt(math.pi / (2 * x)) * math.exp(-x), rel=1e-13)
        assert bessel_i(0.5, x) == pytest.approx(math.sqrt(2 / (math.pi * x)) * math.sinh(x), rel=1e-13)
    assert bessel_k(0.5, 1.0) == pytest.approx(0.4610685044478946, rel=1e-13)
    assert bessel_k(0.5, 2.0) == pytest.approx(math.sqrt(math.pi / 4) * math.exp(-2), rel=1e-13)
    assert bessel_i(0.5, 1.0) == pytest.approx(0.9376748882454876, rel=1e-13)


def test_k_small_argument_law_where_next_term_is_negligible():
    # K_nu(x) ~ Gamma(nu)/2 (x/2)^-nu; the relative correction is O(x^min(2 nu, 2))
    for nu, x in ((0.75, 1e-6), (0.95, 1e-6), (1.25, 1e-3)):
        lead = 0.5 * gamma_real(nu) * (x / 2) ** (-nu)
        assert abs(bessel_k(nu, x) / lead - 1) <= 5e-6


def test_i_small_argument_limit():
    for x in (1e-4, 1e-6):
        assert bessel_i(0.5, x) == pytest.approx(math.sqrt(2 / math.pi) * math.sqrt(x), rel=1e-7)


@settings(max_examples=200, deadline=None)
@given(orders, st.floats(1e-4, 40.0))
def test_wronskian(nu, x):
    w = bessel_i(nu, x) * bessel_k_prime(nu, x) - bessel_i_prime(nu, x) * bessel_k(nu, x)
    assert abs(w * x + 1.0) <= 1e-10


@settings(max_examples=200, deadline=None)
@given(orders, st.floats(1e-4, 300.0))
def test_hankel_conjugation(nu, x):
    if abs(nu - 1.0) < 1e-9:
        return
    h1, h2 = hankel(1, nu, x), hankel(2, nu, x)
    assert abs(h2 - h1.conjugate()) <= 1e-14 * abs(h1)


@settings(max_examples=100, deadline=None)
@given(orders, st.floats(1e-5, 50.0), st.floats(1.01, 3.0))
def test_k_positive_and_decreasing(nu, x, factor):
    a, b = bessel_k(nu, x), bessel_k(nu, x * factor)
    assert a > 0 and b > 0 and b < a


@settings(max_examples=100, deadline=None)
@given(orders, st.floats(1e-5, 50.0), st.floats(1.01, 3.0))
def test_i_positive_and_increasing(nu, x, factor):
    a, b = bessel_i(nu, x), bessel_i(nu, x * factor)
    assert 0 < a < b


def test_integer_order_hankel_is_rejected():
    with pytest.raises(DomainError):
        hankel(1, 1.0, 2.0)
    with pytest.raises(DomainError):
        hankel(3, 0.5, 2.0)
