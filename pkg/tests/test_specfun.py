import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sectorpatch import specfun
from sectorpatch.errors import DomainError, RangeError

mp.mp.dps = 40


def j_series(v, x):
    """Ascending series of J_v in 40-digit arithmetic."""
    v, x = mp.mpf(v), mp.mpf(x)
    h = (x / 2) ** 2
    term = (x / 2) ** v / mp.gamma(v + 1)
    total, k = mp.mpf(0), 0
    while True:
        total += term
        k += 1
        term *= -h / (k * (k + v))
        if abs(term) < mp.mpf(10) ** -35 * abs(total) and k > x:
            return total


def y0_series(x):
    """Neumann series of Y_0: (2/pi)[(ln(x/2) + gamma) J_0(x) + sum (-1)^(k+1) H_k (x/2)^2k / k!^2]."""
    x = mp.mpf(x)
    h = (x / 2) ** 2
    s, term, harm, k = mp.mpf(0), mp.mpf(1), mp.mpf(0), 0
    while True:
        k += 1
        term *= -h / (k * k)
        harm += mp.mpf(1) / k
        inc = -term * harm
        s += inc
        if abs(inc) < mp.mpf(10) ** -35 and k > x:
            break
    return 2 / mp.pi * ((mp.log(x / 2) + mp.euler) * j_series(0, x) + s)


def rel(a, b):
    return abs(a - b) / abs(b)


# --- point values -----------------------------------------------------------

def test_j0_at_origin():
    assert specfun.bessel_j(0, 0.0) == 1.0


def test_j_half_order_zero_at_pi():
    assert abs(specfun.bessel_j(0.5, math.pi)) < 1e-15


def test_j2_at_one_matches_series():
    ref = float(j_series(2, 1))
    assert ref == pytest.approx(0.1149034849, abs=1e-10)
    assert rel(specfun.bessel_j(2, 1.0), ref) < 1e-10


def test_y_half_order_zero_at_half_pi():
    assert abs(specfun.bessel_y(0.5, math.pi / 2)) < 1e-15


def test_y0_at_one_matches_series():
    ref = float(y0_series(1))
    assert ref == pytest.approx(0.0882569642, abs=1e-10)
    assert rel(specfun.bessel_y(0, 1.0), ref) < 1e-10


def test_y_at_origin_is_domain_error():
    with pytest.raises(DomainError):
        specfun.bessel_y(2, 0.0)


def test_j0_derivative_is_minus_j1():
    ref = -float(j_series(1, 1))
    assert ref == pytest.approx(-0.4400505857, abs=1e-10)
    assert rel(specfun.bessel_deriv("J", 0, 1.0), ref) < 1e-12


def _bisect(f, a, b, tol=1e-15):
    fa = f(a)
    while b - a > tol * b:
        m = 0.5 * (a + b)
        fm = f(m)
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def test_first_root_of_j2_derivative():
    # J_2' from the series oracle, located by bisection.
    dj2 = lambda x: float(j_series(1, x) - j_series(3, x)) / 2
    root = _bisect(dj2, 2.5, 3.5)
    assert root == pytest.approx(3.0542369, abs=1e-7)
    assert abs(specfun.bessel_deriv("J", 2, root)) < 1e-9


def test_y_half_order_derivative_closed_form():
    x = math.pi
    # d/dx [-sqrt(2/(pi x)) cos x]
    ref = math.sqrt(2 / (math.pi * x)) * (math.cos(x) / (2 * x) + math.sin(x))
    assert rel(specfun.bessel_deriv("Y", 0.5, x), ref) < 1e-10


@pytest.mark.parametrize("x", [0.3, 1.0, 2.7, 9.4, 31.0, 77.7])
def test_half_integer_closed_forms(x):
    s, c = math.sin(x), math.cos(x)
    pref = math.sqrt(2 / (math.pi * x))
    cases = {
        ("J", 0.5): pref * s,
        ("Y", 0.5): -pref * c,
        ("J", 1.5): pref * (s / x - c),
        ("Y", 1.5): -pref * (c / x + s),
        ("J", 2.5): pref * ((3 / x**2 - 1) * s - 3 * c / x),
        ("Y", 2.5): -pref * ((3 / x**2 - 1) * c + 3 * s / x),
    }
    for (kind, v), ref in cases.items():
        f = specfun.bessel_j if kind == "J" else specfun.bessel_y
        assert abs(f(v, x) - ref) <= 1e-10 * max(abs(ref), pref), (kind, v, x)


# --- identities -------------------------------------------------------------

def _lattice():
    vs = np.linspace(0.0, 20.0, 20)
    xs = np.geomspace(0.1, 50.0, 10)
    V, X = np.meshgrid(vs, xs, indexing="ij")
    return V.ravel(), X.ravel()


def test_wronskian_lattice():
    v, x = _lattice()
    assert v.size == 200
    w = specfun.bessel_j(v, x) * specfun.bessel_deriv("Y", v, x) \
        - specfun.bessel_deriv("J", v, x) * specfun.bessel_y(v, x)
    target = 2 / (np.pi * x)
    assert np.max(np.abs(w - target) / target) <= 1e-9


@pytest.mark.parametrize("kind", ["J", "Y"])
def test_recurrence_consistency(kind):
    f = specfun.bessel_j if kind == "J" else specfun.bessel_y
    v = np.linspace(1.0, 19.0, 37)[:, None]
    x = np.geomspace(0.5, 60.0, 25)[None, :]
    lhs = f(v - 1, x) + f(v + 1, x)
    rhs = 2 * v / x * f(v, x)
    scale = np.abs(f(v - 1, x)) + np.abs(f(v + 1, x))
    assert np.max(np.abs(lhs - rhs) / scale) <= 1e-9


def test_integer_order_matches_independent_implementation():
    for x in np.linspace(0.2, 40.0, 60):
        assert rel(specfun.bessel_j(2.0, x), float(mp.besselj(2, x))) < 1e-10
        assert rel(specfun.bessel_y(2.0, x), float(mp.bessely(2, x))) < 1e-10


@settings(max_examples=60, deadline=None)
@given(v=st.floats(0.0, 20.0), x=st.floats(0.1, 100.0))
def test_values_match_arbitrary_precision(v, x):
    j_ref, y_ref = float(mp.besselj(v, x)), float(mp.bessely(v, x))
    # Relative accuracy is meaningless at a zero; measure against the local amplitude.
    amp = math.hypot(j_ref, y_ref)
    assert abs(specfun.bessel_j(v, x) - j_ref) <= 1e-10 * max(abs(j_ref), 1e-3 * amp)
    assert abs(specfun.bessel_y(v, x) - y_ref) <= 1e-9 * max(abs(y_ref), 1e-3 * amp)


@settings(max_examples=40, deadline=None)
@given(v=st.floats(0.0, 20.0), x=st.floats(0.1, 100.0))
def test_derivative_matches_arbitrary_precision(v, x):
    for kind, fn in (("J", mp.besselj), ("Y", mp.bessely)):
        ref = float(fn(v, x, derivative=1))
        amp = math.hypot(float(mp.besselj(v, x, 1)), float(mp.bessely(v, x, 1)))
        assert abs(specfun.bessel_deriv(kind, v, x) - ref) <= 1e-9 * max(abs(ref), 1e-3 * amp)


# --- errors -----------------------------------------------------------------

@pytest.mark.parametrize("call", [
    lambda: specfun.bessel_j(0.5, 0.0),
    lambda: specfun.bessel_j(1.0, -1.0),
    lambda: specfun.bessel_y(1.0, -2.0),
    lambda: specfun.bessel_j(-1.0, 1.0),
    lambda: specfun.bessel_deriv("J", 1.0, 0.0),
    lambda: specfun.bessel_j(1.0, float("nan")),
    lambda: specfun.order(1, 0.0),
])
def test_domain_errors(call):
    with pytest.raises(DomainError):
        call()


@pytest.mark.parametrize("call", [
    lambda: specfun.bessel_j(20.5, 1.0),
    lambda: specfun.bessel_y(1.0, 100.5),
    lambda: specfun.bessel_deriv("Y", 20.5, 1.0),
])
def test_range_errors(call):
    with pytest.raises(RangeError):
        call()


def test_integer_zero_argument_allowed():
    assert specfun.bessel_j(3, 0.0) == 0.0


def test_bad_kind():
    with pytest.raises(ValueError):
        specfun.bessel_deriv("K", 1.0, 1.0)


def test_order():
    assert specfun.order(2, math.pi / 2) == pytest.approx(4.0, abs=1e-15)
    assert specfun.order(1, math.pi / 3) == pytest.approx(3.0)


@pytest.mark.parametrize("v", [5e-324, 1e-310, 1e-305])
def test_subnormal_order_is_order_zero(v):
    # Y_v is smooth in v, so a subnormal order gives Y_0 to full precision.
    for x in (0.5, 1.0, 7.3):
        assert specfun.bessel_y(v, x) == pytest.approx(float(mp.bessely(0, x)), rel=1e-12)
    got = specfun.bessel_y(np.array([v, 0.5]), 1.0)
    assert got[0] == pytest.approx(float(mp.bessely(0, 1.0)), rel=1e-12)
