import math

import numpy as np
import pytest

from src.special.errors import NodeError, ParameterError
from src.special.orthopoly import Family, FamilyTag, MeasureDescriptor, family_coeffs
from src.special.quadrature import (
    QuadRule, chebyshev_u_to_monomial, gap_bound_verify, gauss_convergence_harness, gauss_rule,
    geronimus_check, kronrod_rule, markov_stieltjes_verify, markov_transform_check,
    monomial_to_chebyshev_t, nested_sum_verify, posse_verify, recurrence_enclosure, stieltjes_poly,
)

# 15-point Gauss-Kronrod for Legendre: outermost node and its weight
GK15_NODE = 0.991455371120812639206854697526329
GK15_WEIGHT = 0.022935322010529224963732008058970


def test_gauss_two_point_legendre(legendre):
    rule = gauss_rule(family_coeffs(legendre, 2), 2, measure=legendre.measure())
    assert rule.nodes == pytest.approx([-1 / math.sqrt(3), 1 / math.sqrt(3)])
    assert rule.weights == pytest.approx([1.0, 1.0])
    assert rule.exactness == 3


@pytest.mark.parametrize("family", [
    Family(FamilyTag.LEGENDRE),
    Family(FamilyTag.HERMITE),
    Family(FamilyTag.LAGUERRE, alpha=1.5),
    Family(FamilyTag.JACOBI, alpha=0.5, beta=-0.5),
    Family(FamilyTag.CHEBYSHEV_U),
], ids=lambda f: f.tag.value)
def test_gauss_exactness_certified(family):
    n = 8
    rule = gauss_rule(family_coeffs(family, n), n, measure=family.measure())
    assert rule.exactness == 2 * n - 1
    assert rule.mass == pytest.approx(family_coeffs(family, 1).mass, rel=1e-13)
    assert np.all(np.diff(rule.nodes) > 0)


def test_one_point_rule(legendre):
    rule = gauss_rule(family_coeffs(legendre, 1), 1)
    assert rule.nodes == pytest.approx([0.0])
    assert rule.weights == pytest.approx([2.0])


def test_quad_rule_validation():
    with pytest.raises(ParameterError):
        QuadRule([0.0, 1.0], [1.0, -1.0])
    with pytest.raises(ParameterError):
        QuadRule([1.0, 0.0], [1.0, 1.0])
    with pytest.raises(ParameterError):
        QuadRule([0.0], [1.0, 1.0])


def test_rule_arrays_are_read_only(legendre):
    rule = gauss_rule(family_coeffs(legendre, 3), 3)
    with pytest.raises(ValueError):
        rule.nodes[0] = 0.0


def test_markov_stieltjes_legendre(legendre, legendre_rc):
    rule = gauss_rule(legendre_rc, 30, measure=legendre.measure())
    checks = markov_stieltjes_verify(rule)
    assert len(checks) == 30
    assert all(check.passed for check in checks)


def test_markov_stieltjes_with_explicit_cdf():
    family = Family(FamilyTag.HERMITE)
    measure = family.measure()
    rule = gauss_rule(family_coeffs(family, 12), 12, measure=measure)
    assert all(check.passed for check in markov_stieltjes_verify(rule, cdf=measure.cdf))


def test_markov_stieltjes_needs_measure(legendre_rc):
    with pytest.raises(ParameterError):
        markov_stieltjes_verify(gauss_rule(legendre_rc, 5))


@pytest.mark.parametrize("family", [
    Family(FamilyTag.LEGENDRE), Family(FamilyTag.LAGUERRE), Family(FamilyTag.CARLITZ_C, k=0.5),
], ids=lambda f: f.tag.value)
def test_nested_sums(family):
    checks = nested_sum_verify(family_coeffs(family, 11), 10)
    assert all(check.passed for check in checks)


def test_nested_sums_need_an_extra_level(legendre):
    with pytest.raises(ParameterError):
        nested_sum_verify(family_coeffs(legendre, 10), 10)


def test_gap_bounds(legendre, legendre_rc):
    rule = gauss_rule(legendre_rc, 10, measure=legendre.measure())
    checks = gap_bound_verify(rule)
    assert len(checks) == 10
    assert all(check.passed for check in checks)
    assert gap_bound_verify(gauss_rule(legendre_rc, 1, measure=legendre.measure())) == []


def test_gap_bounds_hermite_uses_infinite_support():
    family = Family(FamilyTag.HERMITE)
    rule = gauss_rule(family_coeffs(family, 10), 10, measure=family.measure())
    assert all(check.passed for check in gap_bound_verify(rule))


@pytest.mark.parametrize("k", range(1, 9))
def test_posse_with_exponential(legendre, legendre_rc, k):
    rule = gauss_rule(legendre_rc, 8, measure=legendre.measure())
    check = posse_verify(rule, math.exp, k)
    assert check.passed
    assert check.lower <= check.middle <= check.upper


def test_posse_index_checked(legendre, legendre_rc):
    rule = gauss_rule(legendre_rc, 4, measure=legendre.measure())
    with pytest.raises(ParameterError):
        posse_verify(rule, math.exp, 5)


def test_stieltjes_poly_degree_two(legendre_rc):
    poly = stieltjes_poly(legendre_rc, 1)
    assert poly.degree == 2
    assert poly.coeffs == pytest.approx((-0.6, 0.0, 1.0), abs=1e-13)


def test_kronrod_three_point(legendre, legendre_rc):
    rule = kronrod_rule(legendre_rc, 1, measure=legendre.measure())
    assert rule.nodes == pytest.approx([-math.sqrt(0.6), 0.0, math.sqrt(0.6)])
    assert rule.weights == pytest.approx([5 / 9, 8 / 9, 5 / 9])
    assert rule.exactness >= 4


def test_kronrod_fifteen_point(legendre, legendre_rc):
    rule = kronrod_rule(legendre_rc, 7, measure=legendre.measure())
    assert len(rule.nodes) == 15
    assert rule.nodes[-1] == pytest.approx(GK15_NODE, abs=1e-12)
    assert rule.weights[-1] == pytest.approx(GK15_WEIGHT, abs=1e-12)
    assert rule.exactness >= 22
    assert rule.as_rule().mass == pytest.approx(2.0)


def test_kronrod_interlaces_gauss_nodes(legendre_rc):
    rule = kronrod_rule(legendre_rc, 5)
    merged = np.sort(np.concatenate([rule.gauss_nodes, rule.added_nodes]))
    assert np.all(rule.added_nodes[:-1] < rule.gauss_nodes)
    assert np.all(rule.gauss_nodes < rule.added_nodes[1:])
    assert rule.nodes == pytest.approx(merged)


def test_kronrod_needs_levels(legendre):
    with pytest.raises(ParameterError):
        kronrod_rule(family_coeffs(legendre, 5), 3)


def test_chebyshev_conversions():
    assert monomial_to_chebyshev_t([0.0, 0.0, 1.0]) == pytest.approx((1.0, 0.0, 0.5))
    assert chebyshev_u_to_monomial([0.0, 0.0, 1.0]).coef == pytest.approx([-1.0, 0.0, 4.0])


@pytest.mark.parametrize("n", [2, 4, 6])
def test_geronimus_orthogonality(legendre_rc, n):
    report = geronimus_check(legendre_rc, n)
    assert len(report.residuals) == n
    assert max(report.residuals) < 1e-10
    assert report.normalization != 0


def test_convergence_harness_errors_shrink(legendre_rc):
    rows = gauss_convergence_harness(legendre_rc, np.exp, [2, 4, 8], reference=2 * math.sinh(1))
    errors = [row.error for row in rows]
    assert errors[0] > errors[1] > errors[2]
    assert errors[2] < 1e-13


def test_markov_transform_check(legendre_rc):
    rows = markov_transform_check(legendre_rc, 2.0, [5, 10, 15])
    for row in rows:
        assert row.error == pytest.approx(row.convergent_error, abs=1e-12)
    assert rows[-1].error < 1e-12


CLASSICAL = [
    Family(FamilyTag.LEGENDRE),
    Family(FamilyTag.CHEBYSHEV_T),
    Family(FamilyTag.CHEBYSHEV_U),
    Family(FamilyTag.HERMITE),
    Family(FamilyTag.LAGUERRE),
]


@pytest.mark.parametrize("family", CLASSICAL, ids=lambda f: f.tag.value)
@pytest.mark.parametrize("n", range(1, 33))
def test_gauss_exactness_across_degrees(family, n):
    rule = gauss_rule(family_coeffs(family, n), n, measure=family.measure())
    assert rule.exactness == 2 * n - 1


@pytest.mark.parametrize("family", [Family(FamilyTag.HERMITE), Family(FamilyTag.LAGUERRE)],
                         ids=lambda f: f.tag.value)
def test_tail_weights_pass_crosscheck(family):
    rule = gauss_rule(family_coeffs(family, 32), 32, measure=family.measure())
    assert min(rule.weights) < 1e-12
    assert rule.mass == pytest.approx(family_coeffs(family, 1).mass, rel=1e-13)


def test_markov_stieltjes_two_point_legendre(legendre):
    rule = gauss_rule(family_coeffs(legendre, 2), 2, measure=legendre.measure())
    checks = markov_stieltjes_verify(rule)
    assert [check.index for check in checks] == [1, 2]
    second = checks[1]
    assert (second.lower, second.middle, second.upper) == pytest.approx((1.0, 1 + 1 / math.sqrt(3), 2.0))
    assert all(check.passed for check in checks)


@pytest.mark.parametrize("n", range(1, 11))
def test_kronrod_exactness_across_degrees(legendre, legendre_rc, n):
    rule = kronrod_rule(legendre_rc, n, measure=legendre.measure())
    assert len(rule.nodes) == 2 * n + 1
    assert rule.exactness >= 3 * n + 1


def test_recurrence_enclosure_covers_kronrod_nodes(legendre_rc):
    lo, hi = recurrence_enclosure(legendre_rc)
    assert lo == pytest.approx(-hi)
    # widest Gershgorin row is the second one
    assert hi == pytest.approx(legendre_rc.a[0] + legendre_rc.a[1])
    rule = kronrod_rule(legendre_rc, 10)
    assert np.all((rule.nodes > lo) & (rule.nodes < hi))


def test_kronrod_rejects_zeros_outside_support():
    # E_2 = x^2 - 4x - 2 for the one-point Laguerre rule; 2 - sqrt(6) < 0
    family = Family(FamilyTag.LAGUERRE)
    rc = family_coeffs(family, 4)
    assert recurrence_enclosure(rc)[0] == pytest.approx(0.0)
    for measure in (family.measure(), None):
        with pytest.raises(NodeError) as info:
            kronrod_rule(rc, 1, measure=measure)
        assert info.value.zeros == pytest.approx([2 - math.sqrt(6)])


def test_convergence_harness_takes_a_measure(legendre):
    rows = gauss_convergence_harness(legendre.measure(), np.exp, [2, 4, 8], reference=2 * math.sinh(1))
    assert [row.n for row in rows] == [2, 4, 8]
    assert rows[-1].error < 1e-13


def test_convergence_harness_abs_is_algebraic(legendre):
    rows = gauss_convergence_harness(legendre.measure(), np.abs, [2, 4, 8, 16, 32], reference=1.0)
    errors = [row.error for row in rows]
    assert errors[0] == pytest.approx(2 / math.sqrt(3) - 1)
    assert all(b < a for a, b in zip(errors, errors[1:]))
    assert all(b / a > 0.1 for a, b in zip(errors, errors[1:]))


def test_convergence_harness_needs_a_recurrence():
    measure = MeasureDescriptor.discrete([0.0, 1.0], [0.5, 0.5])
    with pytest.raises(ParameterError):
        gauss_convergence_harness(measure, np.exp, [2])
