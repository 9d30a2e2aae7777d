import math

import numpy as np
import pytest

from src.special.elliptic import (
    CARLITZ_PAIRING, EllipticContext, agm, carlitz_cf_approximant, carlitz_cf_converged,
    carlitz_jfraction, carlitz_measure, check_carlitz_pairing, complete_e, complete_k,
    elliptic_jfraction, elliptic_jfraction_value, fourier_sn_cn_dn, jacobi_elliptic,
    k_prime_convention, laplace_f, laplace_f_quadrature, laplace_f_series, printed_k_prime,
)
from src.special.errors import ConvergenceError, ParameterError

K_HALF = 1.685750354812596
K_PRIME_HALF = 2.156515647499643
E_HALF = 1.467462209339427
GAUSS_CONSTANT_MEAN = 0.8472130847939790


@pytest.fixture
def ctx():
    return EllipticContext.from_modulus(0.5)


def test_agm():
    mean, halves = agm(1.0, math.sqrt(0.5))
    assert mean == pytest.approx(GAUSS_CONSTANT_MEAN, rel=1e-15)
    assert halves[0] == pytest.approx(0.5 * (1 - math.sqrt(0.5)))


def test_complete_integrals():
    big_k, k_prime = complete_k(0.5)
    assert big_k == pytest.approx(K_HALF, rel=1e-14)
    assert k_prime == pytest.approx(K_PRIME_HALF, rel=1e-14)
    assert complete_e(0.5) == pytest.approx(E_HALF, rel=1e-14)


@pytest.mark.parametrize("k", [0.1, 0.5, 0.9])
def test_legendre_relation(k):
    big_k, k_prime = complete_k(k)
    complementary = math.sqrt(1 - k * k)
    e, e_prime = complete_e(k), complete_e(complementary)
    assert e * k_prime + e_prime * big_k - big_k * k_prime == pytest.approx(math.pi / 2, rel=1e-13)


def test_modulus_checked():
    for k in (0.0, 1.0, -0.2):
        with pytest.raises(ParameterError):
            complete_k(k)
    with pytest.raises(ParameterError):
        EllipticContext.from_modulus(0.5, convention="other")


def test_context_nome():
    ctx = EllipticContext.from_modulus(math.sqrt(0.5))
    assert ctx.q_nome == pytest.approx(math.exp(-math.pi))
    assert ctx.complementary == pytest.approx(math.sqrt(0.5))
    assert ctx.term_count() >= 2


def test_printed_convention_differs(ctx):
    assert printed_k_prime(0.5) != pytest.approx(ctx.K_prime)
    printed = EllipticContext.from_modulus(0.5, convention="printed")
    assert printed.q_nome != pytest.approx(ctx.q_nome)


def test_special_values(ctx):
    sn, cn, dn = jacobi_elliptic(ctx.K, ctx)
    assert sn == pytest.approx(1.0)
    assert cn == pytest.approx(0.0, abs=1e-14)
    assert dn == pytest.approx(math.sqrt(0.75))
    assert jacobi_elliptic(0.0, ctx) == pytest.approx((0.0, 1.0, 1.0))


def test_derivative_identity(ctx):
    u = np.linspace(0.1, 3.0, 15)
    h = 1e-6
    plus, minus = jacobi_elliptic(u + h, ctx)[0], jacobi_elliptic(u - h, ctx)[0]
    _, cn, dn = jacobi_elliptic(u, ctx)
    assert (plus - minus) / (2 * h) == pytest.approx(cn * dn, abs=1e-8)


def test_landen_matches_fourier(ctx):
    u = np.linspace(-2.0, 6.0, 33)
    values = jacobi_elliptic(u, ctx, cross_check=True)
    series = fourier_sn_cn_dn(u, ctx)
    for exact, other in zip(values, series):
        assert exact == pytest.approx(other, abs=1e-10)


@pytest.mark.parametrize("k", [0.3, 0.5, 0.8])
def test_standard_k_prime_convention_wins(k):
    chosen, errors = k_prime_convention(k)
    assert chosen == "standard"
    assert errors["standard"] < 1e-10
    assert errors["printed"] > 1e-6


@pytest.mark.parametrize("i", [1, 2, 3, 4])
@pytest.mark.parametrize("k", [0.3, 0.7])
@pytest.mark.parametrize("z", [0.5, 2.0])
def test_laplace_series_matches_quadrature(i, k, z):
    ctx = EllipticContext.from_modulus(k)
    series = laplace_f_series(i, z, ctx)
    assert laplace_f_quadrature(i, z, ctx) == pytest.approx(series, rel=1e-9)
    assert laplace_f(i, z, ctx, cross_check=True) == series


def test_laplace_leading_behaviour(ctx):
    # corrections are O((1 + k^2) / z^2)
    z = 1000.0
    assert laplace_f(1, z, ctx) * z == pytest.approx(1.0, rel=1e-4)
    assert laplace_f(3, z, ctx) * z * z == pytest.approx(1.0, rel=1e-4)
    assert laplace_f(4, z, ctx) * z * z == pytest.approx(2.0, rel=1e-4)


def test_laplace_arguments_checked(ctx):
    with pytest.raises(ParameterError):
        laplace_f(5, 1.0, ctx)
    with pytest.raises(ParameterError):
        laplace_f_series(1, 0.0, ctx)


@pytest.mark.parametrize("i", [3, 4])
def test_elliptic_jfraction_at_large_argument(ctx, i):
    z = 8.0
    assert elliptic_jfraction_value(i, ctx, z, 15) == pytest.approx(laplace_f(i, z, ctx), rel=1e-8)


def test_elliptic_jfraction_leading_coefficients(ctx):
    f3 = elliptic_jfraction(3, ctx, 2)
    assert f3.a_sq == pytest.approx((1.0, 1 * 4 * 3 * 0.25))
    assert f3.b == pytest.approx((-1.25, -9 * 1.25))
    with pytest.raises(ParameterError):
        elliptic_jfraction(1, ctx, 2)


def test_carlitz_jfraction_shape(ctx):
    fraction = carlitz_jfraction("C_alpha", ctx, 3)
    assert fraction.a_sq == pytest.approx((1.0, 1.0, 1.0))
    assert fraction.b == (0.0, 0.0, 0.0)
    with pytest.raises(ParameterError):
        carlitz_jfraction("E_gamma", ctx, 3)


@pytest.mark.parametrize("k, depth", [(0.3, 30), (0.5, 30), (0.7, 60)])
@pytest.mark.parametrize("which", sorted(CARLITZ_PAIRING))
def test_carlitz_fraction_matches_paired_transform(k, depth, which):
    ctx = EllipticContext.from_modulus(k)
    index = CARLITZ_PAIRING[which]
    for z in (1.0, 2.0, 4.0):
        value = carlitz_cf_approximant(which, ctx, z, depth)
        assert value == pytest.approx(laplace_f(index, z, ctx), rel=1e-8)


@pytest.mark.parametrize("which", sorted(CARLITZ_PAIRING))
def test_carlitz_fraction_deepens_until_settled(which):
    ctx = EllipticContext.from_modulus(0.7)
    index = CARLITZ_PAIRING[which]
    for z in (1.0, 2.0, 4.0):
        value, depth, gap = carlitz_cf_converged(which, ctx, z)
        assert depth >= 60
        assert gap <= 1e-8 * abs(value)
        assert value == pytest.approx(laplace_f(index, z, ctx), rel=1e-8)


def test_carlitz_fraction_depth_cap(ctx):
    with pytest.raises(ConvergenceError):
        carlitz_cf_converged("D_beta", ctx, 1.0, n=2, max_depth=4)


def test_pairing_rederived(ctx):
    matches = check_carlitz_pairing(ctx)
    assert matches["C_alpha"].transform == "F_1"
    assert matches["D_beta"].transform == "F_2"
    assert all(match.convention == "imaginary" for match in matches.values())


def test_carlitz_cf_convention_checked(ctx):
    with pytest.raises(ParameterError):
        carlitz_cf_approximant("C_alpha", ctx, 1.0, 5, convention="diagonal")


@pytest.mark.parametrize("which", ["C_alpha", "D_beta"])
def test_carlitz_measure_is_symmetric_with_unit_mass(ctx, which):
    measure = carlitz_measure(which, ctx)
    assert measure.total_mass == pytest.approx(1.0, rel=1e-14)
    assert measure.moment_oracle(1) == pytest.approx(0.0, abs=1e-15)
    positions = [x for x, _ in measure.atoms]
    assert positions == pytest.approx([-x for x in reversed(positions)])


def test_carlitz_measure_second_moment(ctx):
    # -cn''(0) = 1 and -dn''(0) = k^2
    assert carlitz_measure("C_alpha", ctx).moment_oracle(2) == pytest.approx(1.0, rel=1e-12)
    assert carlitz_measure("D_beta", ctx).moment_oracle(2) == pytest.approx(0.25, rel=1e-12)
