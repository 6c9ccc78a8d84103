import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from quatsphere import kernel
from quatsphere.params import EnsembleParams as P


def grid_upper(n=12, lo=-2.5, hi=2.5, ymax=2.5):
    x, y = np.meshgrid(np.linspace(lo, hi, n), np.linspace(0.05, ymax, n))
    return (x + 1j * y).ravel()


# -- normalization constants -------------------------------------------------

def test_log_KN_small_cases():
    assert kernel.log_KN(4, P(1, 1, 0)) == pytest.approx(math.log(6 / math.pi ** 2))
    assert kernel.log_KN(2, P(1, 1, 0)) == pytest.approx(math.log(1 / math.pi))


@pytest.mark.parametrize("beta", [1, 2, 4])
def test_log_KN_finite_at_large_N(beta):
    assert math.isfinite(kernel.log_KN(beta, P(2000, 2800, 800)))


def test_log_KN_rejects_beta():
    with pytest.raises(ValueError):
        kernel.log_KN(3, P(1, 1, 0))


def test_log_abs_CN_matches_direct_product():
    p = P(3, 5, 2)
    direct = math.pi ** -3
    for j in range(1, 4):
        direct *= math.gamma(2 * 5 + 2 * 2 + 2) / (math.gamma(2 * 2 + 2 * j) * math.gamma(2 * 5 - 6 + 2 * j))
    assert math.exp(kernel.log_abs_CN(p)) == pytest.approx(direct, rel=1e-12)


# -- weight ------------------------------------------------------------------

def test_weight_vanishes_on_real_axis():
    x = np.array([-2.0, 0.0, 0.3, 5.0]) + 0j
    np.testing.assert_array_equal(kernel.weight_h(x, P(2, 3, 1)) * kernel.weight_h(x.conj(), P(2, 3, 1)), 0)
    np.testing.assert_array_equal(kernel.weight_pair(x, P(2, 3, 1)), 0)


def test_weight_pair_at_i():
    # (z - conj z)/(1+|z|^2)^4 = 2i/16 at z = i; the principal branch of the square root turns the
    # factor (z - conj z) = 2i Im z into |z - conj z| = 2 Im z, i.e. the product is (z - conj z)/i
    p = P(1, 1, 0)
    z = 1j
    prod = kernel.weight_h(z, p) * kernel.weight_h(np.conj(z), p)
    literal = (z - np.conj(z)) / (1 + abs(z) ** 2) ** 4
    assert literal == pytest.approx(2j / 16)
    assert prod == pytest.approx(literal / 1j, abs=1e-15)
    assert kernel.weight_pair(z, p) == pytest.approx(2 / 16)


@settings(max_examples=40)
@given(st.floats(0.05, 5), st.floats(-3, 3), st.floats(0.01, 3))
def test_weight_pair_scaling(c, x, y):
    p = P(2, 4, 1)
    z = c * complex(x, y)
    r2 = abs(z) ** 2
    expect = 2 * z.imag * r2 ** (2 * p.L) / (1 + r2) ** (2 * (p.n + p.L + 1))
    got = kernel.weight_h(z, p) * kernel.weight_h(z.conjugate(), p)
    assert got == pytest.approx(expect, rel=1e-12, abs=1e-300)
    assert kernel.weight_pair(z, p) == pytest.approx(expect, rel=1e-12, abs=1e-300)


def test_weight_at_origin_with_L0():
    assert np.isfinite(kernel.weight_h(0j, P(1, 1, 0)))


# -- skew-orthogonal polynomials ---------------------------------------------

def test_sop_low_degrees():
    p = P(2, 3, 1)
    z = np.array([0.3 + 0.2j, -1.1 + 0.7j])
    np.testing.assert_allclose(kernel.sop(0, z, p), 1)
    np.testing.assert_allclose(kernel.sop(1, z, p), z)
    np.testing.assert_allclose(kernel.sop(3, z, p), z ** 3)


def test_q2_for_n1_L0():
    np.testing.assert_allclose(kernel.even_sop_coefficients(1, P(1, 1, 0)), [2.0, 1.0])


def test_even_coefficients_positive():
    c = kernel.even_sop_coefficients(4, P(5, 9, 3))
    assert c[-1] == 1 and (c > 0).all()


def test_sop_degree_range():
    with pytest.raises(ValueError):
        kernel.sop(4, 1.0, P(2, 3, 1))


def test_norms():
    assert kernel.norm_gk(0, P(1, 1, 0)) == pytest.approx(math.pi / 6)
    assert kernel.norm_gk(0, P(1, 2, 1)) == pytest.approx(math.pi / 140)
    assert (kernel.norm_gk(np.arange(50), P(50, 70, 20)) > 0).all()


def test_skew_inner_diagonal_zero_and_antisymmetric():
    p = P(3, 4, 1)
    for a in range(6):
        assert kernel.skew_inner(a, a, p) == 0
        for b in range(6):
            assert kernel.skew_inner(a, b, p) == -kernel.skew_inner(b, a, p)


def test_skew_inner_first_norm():
    assert kernel.skew_inner_polys([1], [0, 1], P(1, 1, 0)) == pytest.approx(math.pi / 6)


def test_skew_orthogonality_341():
    p = P(3, 4, 1)
    q = [kernel.sop_coefficients(j, p) for j in range(6)]
    g0 = kernel.norm_gk(0, p)
    for j in range(3):
        for k in range(3):
            assert abs(kernel.skew_inner_polys(q[2 * j], q[2 * k], p)) <= 1e-8 * g0
            assert abs(kernel.skew_inner_polys(q[2 * j + 1], q[2 * k + 1], p)) <= 1e-8 * g0
            if j != k:
                assert abs(kernel.skew_inner_polys(q[2 * j], q[2 * k + 1], p)) <= 1e-8 * g0
        assert kernel.skew_inner_polys(q[2 * j], q[2 * j + 1], p) == pytest.approx(kernel.norm_gk(j, p), rel=1e-6)


@pytest.mark.parametrize("a,b", [(0, 1), (1, 2), (2, 3), (0, 3), (1, 4), (3, 4), (0, 2)])
def test_skew_inner_closed_form_matches_quadrature(a, b):
    p = P(3, 4, 1)
    val, err = kernel.skew_inner_quadrature(a, b, p)
    assert val == pytest.approx(kernel.skew_inner(a, b, p), abs=1e-9 * kernel.norm_gk(0, p))


def test_gamma_matrix_is_skew():
    g = kernel.gamma_matrix(P(3, 4, 1))
    np.testing.assert_array_equal(g, -g.T)


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_partition_function_has_unit_modulus(N):
    assert abs(kernel.partition_function(P(N, N + 2, 1))) == pytest.approx(1.0, rel=1e-9)


def test_partition_function_even_N_is_one():
    assert kernel.partition_function(P(2, 3, 1)) == pytest.approx(1.0, rel=1e-9)
    assert kernel.partition_function(P(4, 6, 2)) == pytest.approx(1.0, rel=1e-9)


# -- kernel ------------------------------------------------------------------

def test_log_gamma_cache_matches_gammaln():
    from scipy.special import gammaln

    cache = kernel.LogGammaCache(40)
    k = np.arange(1, 40)
    np.testing.assert_allclose(cache.integer(k), gammaln(k), rtol=1e-14)
    np.testing.assert_allclose(cache.half(k), gammaln(k + 0.5), rtol=1e-14)


def test_kernel_S_diagonal_real_nonnegative():
    p = P(5, 7, 2)
    z = grid_upper()
    s = kernel.kernel_S(z, z, p)
    scale = np.abs(s).max()
    assert np.abs(s.imag).max() <= 1e-12 * scale
    assert s.real.min() >= -1e-12 * scale


def test_kernel_D_antisymmetric_exactly():
    p = P(4, 6, 1)
    x = grid_upper(5)
    y = x[::-1] * (0.7 - 0.2j)
    np.testing.assert_array_equal(kernel.kernel_D(x, y, p), -kernel.kernel_D(y, x, p))
    np.testing.assert_array_equal(kernel.kernel_I(x, y, p), -kernel.kernel_I(y, x, p))


def test_kernel_relations():
    p = P(4, 6, 1)
    x = grid_upper(6)
    y = np.roll(x, 5)
    D = kernel.kernel_D(x, y, p)
    scale = np.abs(D).max()
    assert np.abs(D - kernel.kernel_S(x, np.conj(y), p)).max() <= 1e-12 * scale
    assert np.abs(D - kernel.kernel_I(np.conj(x), np.conj(y), p)).max() <= 1e-12 * scale


def test_kernel_closed_form_matches_sop_sum():
    p = P(4, 6, 2)
    z = grid_upper(6)
    w = np.roll(z, 7)
    a = kernel.kernel_S(z, w, p)
    b = kernel.kernel_S_sop(z, w, p)
    assert np.abs(a - b).max() <= 1e-10 * np.abs(b).max()


def test_kernel_value_bundle():
    p = P(2, 3, 1)
    v = kernel.kernel_value(0.3 + 0.5j, -0.2 + 1.0j, p)
    assert v.S == pytest.approx(complex(kernel.kernel_S(0.3 + 0.5j, -0.2 + 1.0j, p)))


# -- densities ---------------------------------------------------------------

def test_density_single_quaternion():
    p = P(1, 1, 0)
    rng = np.random.default_rng(0)
    z = rng.uniform(-3, 3, 100) + 1j * rng.uniform(0, 3, 100)
    expect = 24 * z.imag ** 2 / (math.pi * (1 + np.abs(z) ** 2) ** 4)
    np.testing.assert_allclose(kernel.density(z, p), expect, rtol=0, atol=1e-12)


def test_density_single_quaternion_integrates_to_one():
    # 24 y^2/(pi (1+r^2)^4) over the upper half plane: polar Beta integral = 1
    val, _ = quad(lambda r: 24 * r ** 3 / (math.pi * (1 + r * r) ** 4) * (math.pi / 2), 0, np.inf)
    assert val == pytest.approx(1.0, rel=1e-12)
    assert kernel.total_mass(P(1, 1, 0))[0] == pytest.approx(1.0, rel=1e-9)


def test_density_zero_on_real_axis():
    np.testing.assert_array_equal(kernel.density(np.linspace(-3, 3, 11) + 0j, P(3, 4, 1)), 0)


def test_density_rejects_lower_half_plane():
    with pytest.raises(ValueError):
        kernel.density(0.1 - 0.2j, P(2, 3, 1))


def test_density_integrates_to_N():
    val, _ = kernel.total_mass(P(5, 7, 2))
    assert val == pytest.approx(5.0, rel=1e-6)


def test_density_stable_at_large_N():
    from mpmath import exp, log, loggamma, mp, mpf, sin

    p = P(200, 280, 80)
    z = 0.9 + 0.4j
    mp.dps = 40
    r, th = mpf(abs(z)), mpf(np.angle(z))
    n, L, N = p.n, p.L, p.N
    total = mpf(0)
    # rho = h(z)h(conj z) * sum_{j<=k} c_jk * 2 r^{4j+m} sin(m theta), m = 2(k-j)+1
    log_weight = log(2 * r * sin(th)) + 4 * L * log(r) - 2 * (n + L + 1) * log(1 + r * r)
    for j in range(N):
        for k in range(j, N):
            logc = (loggamma(2 * n + 2 * L + 2) - 2 * (n + L) * log(2) - loggamma(L + j + 1)
                    - loggamma(L + k + mpf(3) / 2) - loggamma(n - j + mpf(1) / 2) - loggamma(n - k))
            m = 2 * (k - j) + 1
            total += exp(logc + (4 * j + m) * log(r)) * sin(m * th)
    expect = float(exp(log_weight) * 2 * total)
    assert float(kernel.density(z, p)) == pytest.approx(expect, rel=1e-10)


def test_radial_density_normalization():
    p = P(5, 7, 2)
    val, _ = quad(lambda r: float(kernel.radial_density(r, p)), 0, np.inf, epsabs=0, epsrel=1e-12, limit=200)
    assert val == pytest.approx(5.0, rel=1e-8)
    assert float(kernel.radial_cdf(np.inf, p)) == pytest.approx(5.0, rel=1e-12)


def test_radial_density_at_origin():
    assert kernel.radial_density(0.0, P(3, 4, 0)) == 0
    assert kernel.radial_density(0.0, P(3, 4, 2)) == 0


def test_radial_density_is_angular_integral():
    p = P(3, 4, 1)
    r = 0.7
    ang, _ = quad(lambda t: float(kernel.density(r * np.exp(1j * t), p)) * r, 0, math.pi,
                  epsabs=0, epsrel=1e-12)
    assert float(kernel.radial_density(r, p)) == pytest.approx(ang, rel=1e-8)


def test_radial_cdf_is_integral_of_density():
    p = P(4, 6, 1)
    for r in (0.3, 0.9, 2.0):
        val, _ = quad(lambda s: float(kernel.radial_density(s, p)), 0, r, epsabs=0, epsrel=1e-12)
        assert float(kernel.radial_cdf(r, p)) == pytest.approx(val, rel=1e-9)


# -- correlations ------------------------------------------------------------

def test_one_point_correlation_is_density():
    p = P(10, 14, 4)
    for z in (0.4 + 1.1j, -0.9 + 0.3j):
        assert kernel.correlation_m([z], p) == pytest.approx(float(kernel.density(z, p)), rel=1e-12)


def test_two_point_coincident_vanishes():
    p = P(10, 14, 4)
    z = 0.4 + 1.1j
    assert abs(kernel.correlation_m([z, z], p)) <= 1e-10 * float(kernel.density(z, p)) ** 2


def test_two_point_factorizes_when_far_apart():
    # i and 5 + i are 5 apart in the plane and also far apart on the sphere
    p = P(10, 14, 4)
    z1, z2 = 1j, 5 + 1j
    rho2 = kernel.correlation_m([z1, z2], p)
    assert rho2 == pytest.approx(float(kernel.density(z1, p) * kernel.density(z2, p)), rel=0.01)


def test_two_point_repulsion_nearby():
    p = P(10, 14, 4)
    z = 0.4 + 1.1j
    rho2 = kernel.correlation_m([z, z + 0.02], p)
    assert 0 <= rho2 < 0.05 * float(kernel.density(z, p)) ** 2


def test_three_point_symmetric_in_points():
    p = P(6, 8, 2)
    pts = [0.3 + 0.5j, -0.8 + 1.2j, 1.1 + 0.4j]
    a = kernel.correlation_m(pts, p)
    b = kernel.correlation_m(pts[::-1], p)
    assert a == pytest.approx(b, rel=1e-10)
    assert a > 0


# -- characteristic-polynomial representation --------------------------------

def test_charpoly_N1_is_deterministic_identity():
    # N = 1: the average over the empty ensemble is 1, so S is the prefactor times the weights
    p = P(1, 3, 1)
    z, w = 0.3 + 0.8j, -0.5 + 0.4j
    c = kernel.charpoly_average_check(z, w, p, realizations=1, rng=0)
    assert c.estimate == pytest.approx(c.exact, rel=1e-12)
    # the prefactor's g_0 agrees with the defining integral by quadrature
    g0, _ = kernel.skew_inner_quadrature(0, 1, p)
    assert 1j / g0 == pytest.approx(kernel.charpoly_prefactor(p), rel=1e-9)


def test_charpoly_real_arguments_vanish():
    c = kernel.charpoly_average_check(0.5, 0.5, P(2, 3, 1), realizations=50, rng=0)
    assert c.exact == 0 and c.estimate == 0


@pytest.mark.slow
def test_charpoly_monte_carlo_N2():
    c = kernel.charpoly_average_check(1j, 1j, P(2, 3, 1), realizations=100_000, rng=7)
    assert c.zscore < 3
    # the prefactor as printed gives the negated kernel here
    assert c.literal_prefactor_estimate == pytest.approx(-c.estimate, rel=1e-12)


# -- operator identity for the double sum ------------------------------------

@pytest.mark.parametrize("params", [P(1, 1, 0), P(2, 3, 1), P(3, 5, 2)])
def test_sigma_antisymmetric(params):
    assert kernel.sigma_de_residual(params).antisymmetry == 0


def test_sigma_polynomial_small_case():
    # N = 1, n = 1, L = 0: 1 / (Gamma(1) Gamma(3/2) Gamma(3/2) Gamma(1)) = 4/pi
    sigma = kernel.sigma_polynomial(P(1, 1, 0))
    assert sigma == pytest.approx({(0, 1): 4 / math.pi, (1, 0): -4 / math.pi})


def test_sigma_operator_sides_agree():
    rep = kernel.sigma_de_residual(P(2, 3, 1))
    assert rep.sides <= 1e-10 * rep.scale


def test_sigma_residuals_reported():
    rep = kernel.sigma_de_residual(P(2, 3, 1))
    assert math.isfinite(rep.residual_literal) and math.isfinite(rep.residual_shifted)
    assert rep.log_terms >= 0
