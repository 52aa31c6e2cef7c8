import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import binom, comb

from qcext.errors import DomainError, NotInvertibleError, SingularSeriesError, TruncationError
from qcext.series import (LaurentSeries, algebra, bers_norm, compose, r2_transform, r20_transform,
                          revert, schwarzian)

Z = LaurentSeries.identity()
ZINF = LaurentSeries.identity("inf")


def poly(coeffs, k_min=0, at="zero"):
    return LaurentSeries.from_coeffs(coeffs, k_min, at, exact=True)


def small_complex(bound=0.3):
    part = st.floats(-bound, bound, allow_nan=False)
    return st.builds(complex, part, part)


def test_mul_trivial():
    out = poly([1, 1]) * poly([1, -1])
    assert out.allclose(poly([1, 0, -1]), atol=0)
    assert out.exact


def test_log_mercator():
    b1 = 0.37 - 0.2j
    f = algebra("log", poly([-b1, 1], -1, "inf"), order=20)
    for k in range(1, 20):
        assert abs(f[-k] + b1 ** k / k) < 1e-15


def test_sqrt_binomial_at_infinity():
    b0 = 0.4 + 0.1j
    s = algebra("sqrt", poly([b0, 0, 1], 0, "inf"), order=15)
    assert abs(s[1] - 1) < 1e-15
    for k in range(1, 7):
        assert abs(s[1 - 2 * k] - binom(0.5, k) * b0 ** k) < 1e-14
        assert s[-2 * k] == 0
    assert abs(s[-1] - b0 / 2) < 1e-15
    assert abs(s[-3] + b0 ** 2 / 8) < 1e-15


def test_compose_trivial():
    assert compose(poly([0, 0, 1]), poly([1, 1])).allclose(poly([1, 2, 1]))
    f = poly([0, 1, 0.3, -0.2])
    assert compose(f, Z).allclose(f)


def test_compose_then_root_gives_powered_koebe():
    t = 0.1
    base = algebra("div", Z, poly([1, -t]) * poly([1, -t]), order=20)
    g = algebra("pow", compose(base, poly([0, 0, 1]), 20), r=Fraction(1, 2), order=20)
    assert abs(g[1] - 1) < 1e-15
    assert abs(g[3] - 2 * t / 2) < 1e-15
    assert g[2] == 0


def test_compose_incompatible_points():
    f = LaurentSeries.from_coeffs([1, 2, 3])  # truncated, at zero
    with pytest.raises(DomainError):
        compose(f, poly([1, 1]))


def test_revert_identity():
    assert revert(Z, 10).allclose(Z)


def test_revert_quadratic_catalan():
    a = 0.3 - 0.1j
    g = revert(poly([0, 1, a]), 12)
    for n in range(1, 12):
        catalan = comb(2 * (n - 1), n - 1, exact=True) // n
        assert abs(g[n] - (-a) ** (n - 1) * catalan) < 1e-12


def test_revert_at_infinity():
    b1 = 0.25 + 0.1j
    g = revert(LaurentSeries.hydrodynamic([0, b1]), 15)
    # inverse of z + b1/z is (z + sqrt(z^2 - 4 b1)) / 2
    assert abs(g[1] - 1) < 1e-15
    for k in range(1, 7):
        assert abs(g[1 - 2 * k] - 0.5 * binom(0.5, k) * (-4 * b1) ** k) < 1e-13
    assert abs(g[-1] + b1) < 1e-15


def test_revert_not_invertible():
    with pytest.raises(NotInvertibleError):
        revert(poly([0, 0, 1]))


@settings(max_examples=40, deadline=None)
@given(st.lists(small_complex(0.5), min_size=1, max_size=8), st.integers(5, 30))
def test_compose_revert_identity(tail, order):
    f = LaurentSeries.from_coeffs([0, 1] + tail, exact=True)
    g = revert(f, order)
    h = compose(f, g, order)
    assert abs(h[1] - 1) < 1e-12
    for k in range(2, h.k_max + 1):
        assert abs(h[k]) < 1e-12 * max(1.0, np.max(np.abs(g.coeffs)))


@settings(max_examples=40, deadline=None)
@given(st.lists(small_complex(0.5), min_size=1, max_size=8))
def test_log_exp_round_trip(tail):
    f = LaurentSeries.from_coeffs([1] + tail, exact=True)
    back = algebra("exp", algebra("log", f, order=25), order=25)
    for k in range(25):
        assert abs(back[k] - f._get0(k)) < 1e-12


def test_division_by_zero_series():
    with pytest.raises(SingularSeriesError):
        algebra("div", Z, poly([0.0]))


def test_log_needs_nonzero_leading_term():
    with pytest.raises(SingularSeriesError):
        algebra("log", poly([0, 1, 1]))


def test_truncation_order_propagates():
    f = LaurentSeries.from_coeffs([1, 2, 3, 4, 5])  # known through z^4
    g = LaurentSeries.from_coeffs([1, 1, 1])  # known through z^2
    assert (f * g).order == 2
    assert (f + g).order == 2
    with pytest.raises(TruncationError) as info:
        (f * g)[3]
    assert info.value.max_feasible == 2


def test_r2_identity_and_translation():
    assert r2_transform(ZINF).allclose(ZINF)
    b0 = 0.3 - 0.2j
    out = r2_transform(LaurentSeries.hydrodynamic([b0]), order=12)
    assert abs(out[1] - 1) < 1e-15
    assert abs(out[-1] - b0 / 2) < 1e-15
    assert abs(out[-3] + b0 ** 2 / 8) < 1e-15


@settings(max_examples=30, deadline=None)
@given(st.lists(small_complex(0.4), min_size=1, max_size=8))
def test_r2_even_coefficients_exactly_zero(b):
    out = r2_transform(LaurentSeries.hydrodynamic(b), order=20)
    for k in range(out.k_min, out.k_max + 1):
        if k % 2 == 0:
            assert out[k] == 0


def test_r2_rejects_unnormalized():
    with pytest.raises(DomainError):
        r2_transform(poly([0, 2], 0, "inf"))


def test_r20():
    assert r20_transform(ZINF, 0).allclose(ZINF)
    b0, c = 0.2 + 0.1j, -0.3j
    out = r20_transform(LaurentSeries.hydrodynamic([b0]), c, order=10)
    assert abs(out[-1] - (b0 - c) / 2) < 1e-15
    f = LaurentSeries.hydrodynamic([0.1, 0.2, -0.05])
    assert r20_transform(f, 0, 16).allclose(r2_transform(f, 16))


def test_schwarzian_trivial_and_moebius():
    assert np.all(schwarzian(Z).coeffs == 0)
    a, b, c, d = 1.0 + 0.5j, 0.3, 0.2 - 0.1j, 1.0
    m = algebra("div", poly([b, a]), poly([d, c]), order=25)
    s = schwarzian(m, 25)
    assert np.max(np.abs(s.coeffs)) < 1e-12


def test_schwarzian_of_joukowski_type():
    b1 = 0.3 + 0.2j
    s = schwarzian(LaurentSeries.hydrodynamic([0, b1]), 30)
    assert abs(s[-4] + 6 * b1) < 1e-14
    assert abs(s[-6] + 12 * b1 ** 2) < 1e-14
    # closed-form derivatives at a point
    z = 2.5 - 1.0j
    d1, d2, d3 = 1 - b1 / z ** 2, 2 * b1 / z ** 3, -6 * b1 / z ** 4
    exact = d3 / d1 - 1.5 * (d2 / d1) ** 2
    assert abs(s(z) - exact) < 1e-12


def test_bers_norm_identity_zero_and_positive():
    assert bers_norm(ZINF) == 0
    assert bers_norm(LaurentSeries.hydrodynamic([0, 0.2])) > 0


def test_json_round_trip():
    f = LaurentSeries.from_coeffs([0.5j, -1, 2.5], -2, "inf")
    d = json.loads(json.dumps(f.to_dict()))
    assert set(d) >= {"k_min", "k_max", "coeffs"}
    g = LaurentSeries.from_dict(d)
    assert g.k_min == f.k_min and g.k_max == f.k_max and g.at == f.at
    assert np.array_equal(g.coeffs, f.coeffs)
