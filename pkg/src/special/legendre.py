"""Legendre polynomials: zero bounds, the asymptotic expansion in
cos((n+k+1/2)theta - (k+1/2)pi/2) with its remainder bound, the Mehler
limit and functions of the second kind.

Second kind, interior branch:

    Q_n(x) = 1/2 P_n(x) log((1+x)/(1-x)) - W_{n-1}(x)

where (k+1) W_k = (2k+1) x W_{k-1} - k W_{k-2}, W_{-1} = 0, W_0 = 1.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import special
from scipy.optimize import brentq

from src.config import Config
from src.special.errors import CrossCheckError, NodeError, ParameterError

logger = logging.getLogger(__name__)

Q_ZEROS_MAX_DEGREE = 30


@dataclass(frozen=True)
class StieltjesExpansion:
    n: int
    m: int
    theta: float
    value: float
    bound: float
    prefactor: float


def legendre_p(n: int, x):
    """P_n by the three-term recurrence; scalar or array x"""
    if n < 0:
        raise ParameterError(f"degree must be non-negative, got {n}")
    x = np.asarray(x, dtype=float)
    prev, cur = np.zeros_like(x), np.ones_like(x)
    for k in range(n):
        prev, cur = cur, ((2 * k + 1) * x * cur - k * prev) / (k + 1)
    inside = np.abs(x) <= 1
    if np.any(np.abs(cur[inside]) > 1 + 1e-12):
        raise CrossCheckError(f"|P_{n}| exceeds 1 on [-1, 1]", float(np.max(np.abs(cur[inside]))) - 1)
    return float(cur) if cur.ndim == 0 else cur


def zero_bounds(n: int, k: int):
    """Brackets for the k-th largest zero of P_n: (Bruns, Stieltjes or None)"""
    if not 1 <= k <= n:
        raise ParameterError(f"k must lie in [1, {n}], got {k}")
    bruns = (math.cos(2 * k * math.pi / (2 * n + 1)), math.cos((2 * k - 1) * math.pi / (2 * n + 1)))
    stieltjes = None
    if k <= n / 2:
        stieltjes = (math.cos(k * math.pi / (n + 1)), math.cos((2 * k - 1) * math.pi / (2 * n)))
    return bruns, stieltjes


def expansion_coefficients(n: int, count: int):
    """b_0..b_{count-1}; b_k depends on n through (2n+3)...(2n+2k+1)"""
    coeffs = [1.0]
    for k in range(1, count):
        coeffs.append(coeffs[-1] * (2 * k - 1) ** 2 / (2 * k * (2 * n + 2 * k + 1)))
    return coeffs


def expansion_prefactor(n: int) -> float:
    """4/pi * 2^n n! / (3 * 5 * ... * (2n+1)), in log space"""
    return math.exp(math.log(4 / math.pi) + 2 * n * math.log(2)
                    + 2 * special.gammaln(n + 1) - special.gammaln(2 * n + 2))


def stieltjes_expansion(n: int, theta: float, m: int) -> StieltjesExpansion:
    if not 0 < theta < math.pi:
        raise ParameterError(f"theta must lie in (0, pi), got {theta}")
    if m < 1:
        raise ParameterError(f"need at least one term, got {m}")
    sin = math.sin(theta)
    b = expansion_coefficients(n, m + 1)
    prefactor = expansion_prefactor(n)
    terms = [b[k] * math.cos((n + k + 0.5) * theta - (k + 0.5) * math.pi / 2)
             / (2 * sin) ** (k + 0.5) for k in range(m)]
    big_m = 1.0 / abs(math.cos(theta)) if sin * sin <= 0.5 else 2.0 * sin
    bound = b[m] * prefactor * big_m / (2 * sin) ** (m + 0.5)
    return StieltjesExpansion(n, m, theta, prefactor * math.fsum(terms), bound, prefactor)


def bessel_j0(x: float) -> float:
    """Power series of J_0, stopped when the term ratio drops below 1e-16"""
    quarter = x * x / 4.0
    term, terms = 1.0, [1.0]
    k = 0
    while True:
        k += 1
        term *= -quarter / (k * k)
        terms.append(term)
        if abs(term) <= Config.SERIES_TAIL_TOL * abs(math.fsum(terms)) and k > quarter:
            break
    return math.fsum(terms)


def mehler_check(theta: float, n_list):
    """Rows (n, |P_n(cos(theta/n)) - J_0(theta)|); the differences must shrink"""
    if theta < 0:
        raise ParameterError(f"theta must be non-negative, got {theta}")
    target = bessel_j0(theta)
    rows = [(n, abs(legendre_p(n, math.cos(theta / n)) - target)) for n in n_list]
    for (n_prev, previous), (n, current) in zip(rows, rows[1:]):
        if current > previous and current > 1e-15:
            raise CrossCheckError(f"mehler difference grew from n={n_prev} to n={n}",
                                  current - previous)
    return rows


def associated_legendre_w(n: int, x):
    """W_n, the numerator polynomial in the second-kind functions"""
    x = np.asarray(x, dtype=float)
    prev, cur = np.zeros_like(x), np.ones_like(x)
    if n < 0:
        return prev
    for k in range(1, n + 1):
        prev, cur = cur, ((2 * k + 1) * x * cur - k * prev) / (k + 1)
    return cur


def _second_kind(n, x, log_ratio):
    value = 0.5 * legendre_p(n, x) * log_ratio - associated_legendre_w(n - 1, x)
    return float(value) if np.ndim(value) == 0 else value


def legendre_q(n: int, x):
    """Q_n on (-1, 1)"""
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) >= 1):
        raise ParameterError("legendre_q needs |x| < 1; use legendre_q_exterior")
    return _second_kind(n, x, np.log((1 + x) / (1 - x)))


def legendre_q_exterior(n: int, x):
    """Q_n for |x| > 1"""
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) <= 1):
        raise ParameterError("legendre_q_exterior needs |x| > 1")
    return _second_kind(n, x, np.log((x + 1) / (x - 1)))


def legendre_q_integral(n: int, x: float, nodes=None) -> float:
    """1/2 integral_{-1}^{1} P_n(y)/(x - y) dy by Gauss-Legendre, |x| > 1"""
    from src.special.quadrature import legendre_rule

    if abs(x) <= 1:
        raise ParameterError("the integral form needs |x| > 1")
    rule = legendre_rule(nodes or Config.TRANSFORM_NODES)
    return 0.5 * rule.integrate(lambda y: legendre_p(n, y) / (x - y))


def q_consistency(n: int, x: float = 2.0) -> float:
    """|closed form - integral| of Q_n at an exterior point"""
    return abs(legendre_q_exterior(n, x) - legendre_q_integral(n, x))


def _sign_change_roots(n, points):
    theta = (np.arange(points) + 0.5) * math.pi / points
    grid = np.sort(np.cos(theta))
    values = legendre_q(n, grid)
    roots = []
    for left, right, f_left, f_right in zip(grid, grid[1:], values, values[1:]):
        if f_left == 0:
            roots.append(float(left))
        elif f_left * f_right < 0:
            roots.append(brentq(lambda t: legendre_q(n, t), left, right, xtol=1e-15, rtol=1e-15))
    return roots


def q_zeros(n: int):
    """The n+1 zeros of Q_n in (-1, 1), ascending"""
    from src.special.orthopoly import Family, FamilyTag, family_coeffs, zeros

    if not 0 <= n <= Q_ZEROS_MAX_DEGREE:
        raise ParameterError(f"degree must lie in [0, {Q_ZEROS_MAX_DEGREE}], got {n}")
    points = 40 * (n + 1)
    roots = _sign_change_roots(n, points)
    if len(roots) != n + 1:
        logger.info("Q_%d: found %d zeros, refining the grid", n, len(roots))
        roots = _sign_change_roots(n, 8 * points)
    if len(roots) != n + 1:
        raise NodeError(f"Q_{n} should have {n + 1} zeros, found {len(roots)}", tuple(roots))
    if n >= 1:
        p_zeros = zeros(family_coeffs(Family(FamilyTag.LEGENDRE), n), n)
        for i, z in enumerate(p_zeros):
            if not roots[i] < z < roots[i + 1]:
                raise NodeError(f"zeros of Q_{n} and P_{n} do not interlace at {i}", tuple(roots))
    return tuple(roots)
