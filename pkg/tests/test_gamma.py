import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from compoisson import (
    GAMMA_MIN,
    DomainError,
    GammaMinimum,
    digamma,
    floor_inverse_gamma,
    inverse_gamma,
    inverse_log_gamma,
    log_gamma,
)
from compoisson.gamma import floor_inverse_gamma_log, lambert_w0, log_factorials

# mpmath at 40 digits
LOG_GAMMA_HALF = 0.5723649429247001
EULER_GAMMA = 0.5772156649015329
ALPHA = 1.4616321449683623
GAMMA_ALPHA = 0.8856031944108887


def test_log_gamma_examples():
    assert log_gamma(1.0) == 0.0
    assert log_gamma(5.0) == pytest.approx(math.log(24.0), rel=1e-15)
    assert log_gamma(0.5) == pytest.approx(LOG_GAMMA_HALF, rel=1e-15)


def test_log_gamma_array_matches_scalar():
    x = np.array([0.5, 1.0, 2.5, 10.0, 1e4])
    np.testing.assert_allclose(log_gamma(x), [log_gamma(float(v)) for v in x], rtol=1e-14)


@pytest.mark.parametrize("bad", [0.0, -1.0, -2.5, float("nan")])
def test_log_gamma_domain(bad):
    with pytest.raises(DomainError):
        log_gamma(bad)


def test_log_gamma_against_mpmath():
    xs = np.geomspace(0.5, 1e6, 80)
    for x in xs:
        exact = float(mpmath.loggamma(mpmath.mpf(float(x))))
        assert abs(log_gamma(float(x)) - exact) <= 1e-13 * max(1.0, abs(exact))


def test_digamma_examples():
    assert digamma(1.0) == pytest.approx(-EULER_GAMMA, abs=1e-15)
    assert digamma(2.0) == pytest.approx(1.0 - EULER_GAMMA, abs=1e-15)
    assert abs(digamma(GAMMA_MIN.alpha)) < 1e-15


def test_digamma_against_mpmath():
    for x in np.geomspace(0.05, 1e6, 60):
        exact = float(mpmath.digamma(mpmath.mpf(float(x))))
        assert digamma(float(x)) == pytest.approx(exact, rel=1e-13, abs=1e-14)


def test_digamma_recurrence_and_vectorisation():
    x = np.linspace(0.3, 40.0, 97)
    np.testing.assert_allclose(digamma(x + 1.0), digamma(x) + 1.0 / x, rtol=1e-13, atol=1e-14)
    np.testing.assert_allclose(digamma(x), special.digamma(x), rtol=1e-13, atol=1e-14)


@given(st.floats(min_value=1.0, max_value=1e3))
def test_digamma_is_derivative_of_log_gamma(x):
    h = 1e-5 * x
    fd = (log_gamma(x + h) - log_gamma(x - h)) / (2 * h)
    assert digamma(x) == pytest.approx(fd, rel=1e-6, abs=1e-6)


def test_gamma_minimum():
    m = GammaMinimum.locate()
    assert m.alpha == pytest.approx(ALPHA, abs=1e-14)
    assert m.gamma_alpha == pytest.approx(GAMMA_ALPHA, abs=1e-15)
    assert m.log_gamma_alpha == pytest.approx(math.log(GAMMA_ALPHA), abs=1e-15)
    # a minimum: neighbours on both sides are larger
    assert math.gamma(m.alpha - 1e-3) > m.gamma_alpha < math.gamma(m.alpha + 1e-3)


def test_inverse_gamma_examples():
    assert inverse_gamma(1.0) == pytest.approx(2.0, abs=1e-12)
    assert inverse_gamma(24.0) == pytest.approx(5.0, abs=1e-12)
    assert inverse_gamma(2.0) == pytest.approx(3.0, abs=1e-12)


def _bisect_log_gamma(target):
    lo, hi = ALPHA, 2.0
    while log_gamma(hi) < target:
        lo, hi = hi, 2.0 * hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if log_gamma(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_inverse_gamma_million_against_bisection():
    x = inverse_gamma(1e6)
    assert x == pytest.approx(_bisect_log_gamma(math.log(1e6)), rel=1e-13)
    assert x == pytest.approx(10.445608914416326, rel=1e-13)
    assert log_gamma(x) == pytest.approx(math.log(1e6), rel=1e-14)


def test_inverse_gamma_minimum_and_domain():
    assert inverse_gamma(GAMMA_MIN.gamma_alpha) == pytest.approx(GAMMA_MIN.alpha, abs=1e-6)
    with pytest.raises(DomainError):
        inverse_gamma(0.5)
    with pytest.raises(DomainError):
        inverse_gamma(np.array([2.0, 0.8]))


def test_inverse_gamma_monotone():
    y = np.geomspace(GAMMA_ALPHA, 1e300, 400)
    x = inverse_gamma(y)
    assert np.all(np.diff(x) > 0)
    assert np.all(x >= ALPHA - 1e-7)


@given(st.floats(min_value=0.0, max_value=700.0))
def test_inverse_log_gamma_round_trip(log_y):
    x = inverse_log_gamma(log_y)
    assert log_gamma(x) == pytest.approx(log_y, rel=1e-12, abs=1e-12)


def test_inverse_log_gamma_past_double_range():
    L = np.array([1e3, 1e5, 1e8])
    x = inverse_log_gamma(L)
    np.testing.assert_allclose(special.gammaln(x), L, rtol=1e-13)


@pytest.mark.parametrize("k", range(2, 19))
def test_inverse_gamma_at_factorials(k):
    assert inverse_gamma(float(math.factorial(k - 1))) == pytest.approx(k, abs=1e-9)


def test_floor_inverse_gamma_examples():
    assert floor_inverse_gamma(1) == 2
    assert floor_inverse_gamma(5.9999) == 3
    assert floor_inverse_gamma(6) == 4
    assert floor_inverse_gamma(1e10) == 14


def _scan(t):
    # oracle: scan the factorial table with exact rational comparison
    t = Fraction(t)
    k = 2
    while math.factorial(k) <= t:
        k += 1
    return k


@pytest.mark.parametrize("k", range(2, 172))
def test_floor_inverse_gamma_breakpoints(k):
    f = math.factorial(k - 1)
    t = float(f)
    assert floor_inverse_gamma(t) == _scan(t)
    below = math.nextafter(t, 0.0)
    if below >= 1.0:
        assert floor_inverse_gamma(below) == _scan(below)
    if Fraction(t) == f:
        assert floor_inverse_gamma(t) == k
        if below >= 1.0:
            assert floor_inverse_gamma(below) == k - 1


@given(st.floats(min_value=1.0, max_value=1.7e308))
def test_floor_inverse_gamma_matches_scan(t):
    assert floor_inverse_gamma(t) == _scan(t)


@given(st.floats(min_value=1.0, max_value=1e300))
def test_floor_agrees_with_inverse_away_from_breakpoints(t):
    x = inverse_gamma(t)
    if abs(x - round(x)) > 1e-9:
        assert floor_inverse_gamma(t) == math.floor(x)


@pytest.mark.parametrize("bad", [0.999, 0.0, -3.0, float("inf"), float("nan")])
def test_floor_inverse_gamma_domain(bad):
    with pytest.raises(DomainError):
        floor_inverse_gamma(bad)


@settings(max_examples=200)
@given(st.floats(min_value=1.0, max_value=1e300))
def test_floor_log_variant_agrees(t):
    assert int(floor_inverse_gamma_log(math.log(t))) == floor_inverse_gamma(t) or abs(
        inverse_gamma(t) - round(inverse_gamma(t))
    ) < 1e-9


def test_floor_log_variant_at_log_breakpoints():
    lf = log_factorials(3000)
    k = np.arange(2, 3000)
    got = floor_inverse_gamma_log(lf[k - 1], lf)
    np.testing.assert_array_equal(got, k)
    np.testing.assert_array_equal(floor_inverse_gamma_log(np.nextafter(lf[k - 1], 0.0), lf)[1:], k[1:] - 1)


def test_log_factorials():
    lf = log_factorials(400)
    np.testing.assert_allclose(lf, special.gammaln(np.arange(401) + 1.0), rtol=1e-14, atol=0)
    assert lf[0] == 0.0 and lf[1] == 0.0


@given(st.floats(min_value=-1 / math.e + 1e-12, max_value=1e300))
def test_lambert_w0(z):
    w = lambert_w0(z)
    assert w * math.exp(w) == pytest.approx(z, rel=1e-12, abs=1e-12)
    assert w == pytest.approx(special.lambertw(z).real, rel=1e-12, abs=1e-12)
