import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import comb

from qcext.beltrami import BeltramiCoeff
from qcext.errors import AccuracyWarning, DomainError, NormalizationError, TruncationError
from qcext.grunsky import (GrunskyTable, grunsky_coefficients, grunsky_norm, grunsky_operator,
                           grunsky_variation, milin_coefficients, quadratic_form_h, takagi_top)
from qcext.qcmap import family_map, to_sigma
from qcext.quadrature import DiskQuadrature
from qcext.series import LaurentSeries, compose

ZINF = LaurentSeries.identity("inf")
unit = st.builds(lambda r, t: r * np.exp(1j * t), st.floats(0, 0.95), st.floats(0, 2 * np.pi))


def affine(b1):
    return LaurentSeries.hydrodynamic([0, b1])


def closed_form_families(N):
    order = 2 * N + 4
    yield family_map("affine", b1=0.6 - 0.3j)
    for t in (0.2, 0.5, 0.8j):
        yield to_sigma(family_map("koebe", t=t, order=order), order)
        for n in (3, 4, 5):
            yield to_sigma(family_map("powered_koebe", n=n, t=t, order=order), order)


# coefficient tables --------------------------------------------------------------

def test_identity_and_translation_give_zero_table():
    assert np.all(grunsky_coefficients(ZINF, 6).alpha == 0)
    assert np.max(np.abs(grunsky_coefficients(LaurentSeries.hydrodynamic([0.7 - 0.2j]), 6).alpha)) == 0


@settings(max_examples=40, deadline=None)
@given(unit, st.integers(1, 12))
def test_affine_table_is_mercator_diagonal(b1, N):
    alpha = grunsky_coefficients(affine(b1), N).alpha
    m = np.arange(1, N + 1)
    assert np.allclose(alpha, np.diag(b1 ** m / m), atol=1e-14, rtol=0)


def two_variable_table(f, N, R=1.7, K=64):
    """Independent oracle: sample -log((f(z)-f(zeta))/(z-zeta)) on |z|=|zeta|=R and take a 2D FFT."""
    th = 2 * np.pi * np.arange(K) / K
    z = R * np.exp(1j * th)
    Z, W = z[:, None], z[None, :]
    fz = f(z)
    with np.errstate(invalid="ignore", divide="ignore"):
        q = (fz[:, None] - fz[None, :]) / (Z - W)
    diag = np.array([sum(k * f._get0(-k) * (-1) * zk ** (-k - 1) for k in range(1, 80))
                     for zk in z]) + 1
    q[np.arange(K), np.arange(K)] = diag
    G = -np.log(q)
    c = np.fft.fft2(G) / K ** 2  # index k picks out e^{ik th}; u^a = R^-a e^{-ia th}
    m = np.arange(1, N + 1)
    return c[np.ix_(K - m, K - m)] * R ** (m[:, None] + m[None, :])


def test_generic_table_against_fft_oracle():
    b = [0.1, 0.2 - 0.1j, 0.05j, -0.03, 0.02]
    f = LaurentSeries.hydrodynamic(b)
    N = 6
    table = grunsky_coefficients(f, N).alpha
    assert np.allclose(table, two_variable_table(f, N), atol=1e-10, rtol=0)


def test_table_symmetric():
    f = to_sigma(family_map("powered_koebe", n=4, t=0.4, order=30), 30)
    alpha = grunsky_coefficients(f.series, 12).alpha
    assert np.max(np.abs(alpha - alpha.T)) < 1e-12


def test_truncation_reports_max_feasible():
    f = LaurentSeries.hydrodynamic([0.1, 0.2, 0.3], exact=False)  # knows b0..b2
    with pytest.raises(TruncationError) as info:
        grunsky_coefficients(f, 5)
    assert info.value.max_feasible == 1
    grunsky_coefficients(f, 1)


def test_not_at_infinity_rejected():
    with pytest.raises(DomainError):
        grunsky_coefficients(LaurentSeries.identity(), 3)


# Milin tables --------------------------------------------------------------------

def test_milin_identity_chi_reduces():
    f = LaurentSeries.hydrodynamic([0.1, 0.3 - 0.2j, 0.05, -0.02j])
    a = milin_coefficients(f, ZINF, 6).alpha
    assert np.allclose(a, grunsky_coefficients(f, 6).alpha, atol=1e-14)


def test_milin_identity_map_is_zero():
    chi = LaurentSeries.hydrodynamic([0.2, 0.1j, 0.05])
    assert np.max(np.abs(milin_coefficients(ZINF, chi, 6).alpha)) < 1e-14


def test_milin_translation_dual_path():
    # with chi = z + c0 one has 1/z = sum_k T_km / chi^m, T from the binomial series in c0/chi;
    # the chi-table is T^T alpha T for the direct table alpha
    b1, c0, N = 0.4 - 0.2j, 0.3 + 0.1j, 8
    f = affine(b1)
    direct = grunsky_coefficients(f, N).alpha
    T = np.zeros((N, N), complex)
    for k in range(1, N + 1):
        for m in range(k, N + 1):
            T[k - 1, m - 1] = comb(m - 1, k - 1) * c0 ** (m - k)
    expected = T.T @ direct @ T
    got = milin_coefficients(f, LaurentSeries.hydrodynamic([c0]), N).alpha
    assert np.allclose(got, expected, atol=1e-10, rtol=0)


def test_milin_rejects_non_positive_leading_coefficient():
    chi = LaurentSeries.from_coeffs([0.1, 0, 1j], -1, "inf", exact=True)
    with pytest.raises(DomainError):
        milin_coefficients(affine(0.2), chi, 3)


# norm ----------------------------------------------------------------------------

def test_norm_identity_zero():
    assert grunsky_norm(grunsky_coefficients(ZINF, 5)).value == 0


@pytest.mark.parametrize("N", [1, 2, 7, 20])
def test_affine_norm_equals_b1(N):
    b1 = 0.7 * np.exp(0.4j)
    norm = grunsky_norm(grunsky_coefficients(affine(b1), N))
    assert abs(norm.value - abs(b1)) < 1e-12 and norm.N == N


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 12), st.integers(0, 10 ** 6))
def test_takagi_matches_singular_values(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    B = A + A.T
    sigma, x = takagi_top(B)
    assert abs(sigma - np.linalg.svd(B, compute_uv=False)[0]) < 1e-10 * max(1, sigma)
    assert abs(np.linalg.norm(x) - 1) < 1e-12
    val = x @ B @ x
    assert abs(val - sigma) < 1e-8 * max(1, sigma)


def test_takagi_repeated_singular_values():
    B = np.array([[0, 1], [1, 0]], complex)  # x^T B x = 2 x1 x2, sup 1
    sigma, x = takagi_top(B)
    assert abs(sigma - 1) < 1e-14 and abs(x @ B @ x - 1) < 1e-12


def test_power_iteration_agrees():
    f = to_sigma(family_map("powered_koebe", n=4, t=0.5, order=50), 50)
    table = grunsky_coefficients(f.series, 20)
    a, b = grunsky_norm(table, "takagi"), grunsky_norm(table, "power")
    assert abs(a.value - b.value) < 1e-10


def test_norm_monotone_in_N():
    f = to_sigma(family_map("powered_koebe", n=4, t=0.5, order=90), 90)
    values = [grunsky_norm(grunsky_coefficients(f.series, N)).value for N in range(1, 41)]
    assert np.all(np.diff(values) >= -1e-13)
    last = grunsky_norm(grunsky_coefficients(f.series, 40))
    assert abs(last.increment - (values[-1] - values[-2])) < 1e-15


def test_universal_inequality_on_families():
    for N in (1, 5, 20, 40):
        for f in closed_form_families(N):
            norm = grunsky_norm(grunsky_coefficients(f.series, N)).value
            assert norm <= f.k + 1e-8, f.family_tag


# quadratic form ----------------------------------------------------------------------

def test_quadratic_form_basis_vector():
    b1 = 0.3 + 0.4j
    op = grunsky_operator(grunsky_coefficients(affine(b1), 4))
    e1 = np.eye(4)[0]
    assert quadratic_form_h(op, e1) == op.beta[0, 0]
    assert abs(quadratic_form_h(op, e1) - b1) < 1e-15


def test_quadratic_form_maximizer_attains_norm():
    f = to_sigma(family_map("powered_koebe", n=3, t=0.6j, order=30), 30)
    op = grunsky_operator(grunsky_coefficients(f.series, 12))
    sigma, x = takagi_top(op.beta)
    assert abs(abs(quadratic_form_h(op, x)) - grunsky_norm(op).value) < 1e-8


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_quadratic_form_bounded_by_norm(seed):
    rng = np.random.default_rng(seed)
    f = to_sigma(family_map("koebe", t=0.7, order=24), 24)
    op = grunsky_operator(grunsky_coefficients(f.series, 10))
    x = rng.normal(size=10) + 1j * rng.normal(size=10)
    x /= np.linalg.norm(x)
    assert abs(quadratic_form_h(op, x)) <= grunsky_norm(op).value + 1e-10


def test_quadratic_form_needs_unit_vector():
    op = grunsky_operator(grunsky_coefficients(affine(0.2), 3))
    with pytest.raises(NormalizationError):
        quadratic_form_h(op, np.ones(3))


# first-order variation -----------------------------------------------------------------

def test_variation_zero_and_constant():
    assert np.all(grunsky_variation(BeltramiCoeff.zero(), 5).alpha == 0)
    eps = 1e-3 * np.exp(0.3j)
    a = grunsky_variation(BeltramiCoeff.constant(eps), 5).alpha
    assert abs(a[0, 0] - eps) < 1e-15
    a[0, 0] = 0
    assert np.max(np.abs(a)) < 1e-15


@pytest.mark.parametrize("n", [0, 1, 2, 3, 5])
def test_variation_monomial_anti_diagonal(n):
    t = 0.2j
    N = n + 4
    a = grunsky_variation(BeltramiCoeff.monomial(n, t), N).alpha
    m = np.arange(1, N + 1)
    on = (m[:, None] + m[None, :]) == n + 3
    assert np.allclose(np.abs(a[on]), 2 * abs(t) / (n + 3), atol=1e-15)
    assert np.max(np.abs(a[~on])) < 1e-15
    # anti-diagonal SVD oracle: singular values 2 sqrt(m m') / (n + 3) over m + m' = n + 3,
    # which reach 1 only at m = m', i.e. for odd n
    k = np.arange(1, n + 3)
    top = np.max(2 * np.sqrt(k * (n + 3 - k)) / (n + 3))
    assert (top == 1) == (n % 2 == 1)
    assert abs(grunsky_norm(GrunskyTable(N, a)).value - top * abs(t)) < 1e-12


def test_variation_quadrature_path_and_warning():
    eps = 1e-3
    mu = BeltramiCoeff.function(BeltramiCoeff.constant(eps), eps)
    a = grunsky_variation(mu, 4, DiskQuadrature(n_r=64, n_theta=64)).alpha
    assert abs(a[0, 0] - eps) < 1e-12
    with pytest.warns(AccuracyWarning):
        grunsky_variation(BeltramiCoeff.function(BeltramiCoeff.monomial(3, 0.1), 0.1), 8,
                          DiskQuadrature(n_r=4, n_theta=8), rtol=1e-12)


def test_variation_matches_exact_affine_map():
    eps = 1e-3 * np.exp(1j)
    var = grunsky_variation(BeltramiCoeff.constant(eps), 6).alpha
    exact = grunsky_coefficients(affine(eps), 6).alpha
    assert np.linalg.norm(var - exact) <= 1e-2 * np.linalg.norm(exact)


def test_variation_rejects_large_mu():
    with pytest.raises(DomainError):
        grunsky_variation(BeltramiCoeff.function(lambda z: 0 * z, 1.0), 2)


# serialization ------------------------------------------------------------------------

def test_table_json_and_csv():
    table = grunsky_coefficients(affine(0.5j), 3)
    back = GrunskyTable.from_dict(json.loads(json.dumps(table.to_dict())))
    assert np.array_equal(back.alpha, table.alpha) and back.N == 3
    lines = table.to_csv().strip().split("\n")
    assert lines[0] == "m,n,abs_alpha" and len(lines) == 10
    assert lines[1] == "1,1,0.5"
