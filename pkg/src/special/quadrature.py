"""Gauss and Gauss-Kronrod rules, Christoffel numbers and the bracket
inequalities they satisfy.

Nodes are ascending, so the k-th bracket below is stated for the k
smallest nodes. Exactness is always certified against moments.
"""
import functools
import logging
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import Polynomial, chebyshev
from scipy.integrate import IntegrationWarning, quad

from src.config import Config
from src.special.contfrac import JFraction, j_convergent
from src.special.errors import (
    CrossCheckError, NodeError, ParameterError, SingularSystemError,
)
from src.special.orthopoly import (
    Family, FamilyTag, MeasureDescriptor, RecurrenceCoeffs, eval_orthonormal,
    family_coeffs, jacobi_eigensystem, recurrence_moments, zeros,
)

logger = logging.getLogger(__name__)


def _frozen(values):
    array = np.array(values, dtype=float)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class QuadRule:
    nodes: np.ndarray
    weights: np.ndarray
    exactness: int = -1
    measure: Optional[MeasureDescriptor] = None

    def __post_init__(self):
        object.__setattr__(self, "nodes", _frozen(self.nodes))
        object.__setattr__(self, "weights", _frozen(self.weights))
        if self.nodes.shape != self.weights.shape or self.nodes.ndim != 1:
            raise ParameterError("nodes and weights must be matching vectors")
        if np.any(self.weights <= 0):
            raise ParameterError("quadrature weights must be positive")
        if np.any(np.diff(self.nodes) <= 0):
            raise ParameterError("nodes must be strictly increasing")

    def __len__(self):
        return len(self.nodes)

    def integrate(self, f):
        return math.fsum(self.weights * np.asarray(f(self.nodes), dtype=float))

    @property
    def mass(self):
        return math.fsum(self.weights)


@dataclass(frozen=True, eq=False)
class KronrodRule:
    gauss_nodes: np.ndarray
    added_nodes: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray
    exactness: int
    condition: float

    def as_rule(self, measure=None):
        return QuadRule(self.nodes, self.weights, self.exactness, measure)


@dataclass(frozen=True)
class StieltjesPoly:
    degree: int
    coeffs: tuple
    base_degree: int
    ortho_coeffs: tuple = ()
    residual: float = 0.0

    def __call__(self, x):
        return Polynomial(self.coeffs)(x)


@dataclass(frozen=True)
class BracketCheck:
    index: int
    lower: float
    middle: float
    upper: float
    slack: float
    passed: bool


@dataclass(frozen=True)
class GeronimusReport:
    residuals: tuple
    normalization: float


@dataclass(frozen=True)
class HarnessRow:
    n: int
    value: float
    error: float
    convergent_error: Optional[float] = None


def moment_scale(nodes, weights, k):
    return math.fsum(weights * np.abs(nodes) ** k)


def certify_exactness(nodes, weights, moments, max_degree, tol=None):
    """Highest d <= max_degree with every monomial up to d integrated correctly"""
    tol = Config.EXACTNESS_TOL if tol is None else tol
    degree = -1
    for k in range(max_degree + 1):
        approx = math.fsum(weights * nodes ** k)
        scale = max(moment_scale(nodes, weights, k), abs(moments[k]))
        if abs(approx - moments[k]) > tol * scale:
            break
        degree = k
    return degree


def _reference_moments(rc, measure, kmax):
    if measure is not None and measure.moment_oracle is not None:
        return [measure.moment_oracle(k) for k in range(kmax + 1)]
    return recurrence_moments(rc, kmax)


def gauss_rule(rc: RecurrenceCoeffs, n: int, measure=None, certify=True) -> QuadRule:
    """n-point Gauss rule with both weight formulas cross-checked.

    The two weight formulas are compared as max |difference| / mass, not
    weight by weight: the eigenvector components are accurate to a fixed
    fraction of the mass, so tail weights far below it (Hermite, Laguerre)
    carry no relative accuracy on that path.
    """
    nodes, vectors = jacobi_eigensystem(rc, n)
    order = np.argsort(nodes)
    nodes = nodes[order]
    eigen_weights = rc.mass * vectors[0, order] ** 2
    values = eval_orthonormal(rc, nodes, n - 1)
    weights = 1.0 / np.sum(values ** 2, axis=0)
    discrepancy = float(np.max(np.abs(eigen_weights - weights))) / rc.mass
    if discrepancy > Config.WEIGHT_CROSSCHECK_TOL:
        raise CrossCheckError("christoffel weights", discrepancy, Config.WEIGHT_CROSSCHECK_TOL)
    exactness = -1
    if certify:
        moments = _reference_moments(rc, measure, 2 * n - 1)
        exactness = certify_exactness(nodes, weights, moments, 2 * n - 1)
        if exactness < 2 * n - 1:
            logger.warning("%d-point rule certified only to degree %d", n, exactness)
    return QuadRule(nodes, weights, exactness, measure)


@functools.lru_cache(maxsize=64)
def legendre_rule(n: int) -> QuadRule:
    return gauss_rule(family_coeffs(Family(FamilyTag.LEGENDRE), n), n, certify=False)


def _measure_of(rule, measure):
    measure = measure or rule.measure
    if measure is None:
        raise ParameterError("a measure (or cdf) is required for this check")
    return measure


def _check_mass(rule, total):
    if abs(total - rule.mass) > 1e-8 * rule.mass:
        raise CrossCheckError("cdf mass", abs(total - rule.mass), 1e-8 * rule.mass)


def markov_stieltjes_verify(rule: QuadRule, cdf: Optional[Callable] = None, measure=None):
    """sum_{j<k} w_j < mu[a, x_k) <= mu[a, x_k] < sum_{j<=k} w_j for every k"""
    if cdf is not None:
        left = right = cdf
        hi = measure.support[1] if measure else (rule.measure.support[1] if rule.measure else math.inf)
        total = cdf(hi)
    else:
        measure = _measure_of(rule, measure)
        left, right = measure.cdf_left, measure.cdf_right
        total = measure.total_mass
    _check_mass(rule, total)
    partial = np.concatenate([[0.0], np.cumsum(rule.weights)])
    checks = []
    for k, x in enumerate(rule.nodes, start=1):
        below, above = left(x), right(x)
        slack = min(below - partial[k - 1], partial[k] - above)
        checks.append(BracketCheck(k, float(partial[k - 1]), float(below), float(partial[k]),
                                   float(slack), slack > 0 and above >= below))
    return checks


def nested_sum_verify(rc: RecurrenceCoeffs, n: int):
    """sum_{j<k} w_{j,n} < sum_{j<=k} w_{j,n+1} < sum_{j<=k} w_{j,n}"""
    if rc.levels < n + 1:
        raise ParameterError(f"need {n + 1} levels, have {rc.levels}")
    coarse = np.concatenate([[0.0], np.cumsum(gauss_rule(rc, n, certify=False).weights)])
    fine = np.cumsum(gauss_rule(rc, n + 1, certify=False).weights)
    checks = []
    for k in range(1, n + 1):
        slack = min(fine[k - 1] - coarse[k - 1], coarse[k] - fine[k - 1])
        checks.append(BracketCheck(k, float(coarse[k - 1]), float(fine[k - 1]), float(coarse[k]),
                                   float(slack), slack > 0))
    return checks


def gap_bound_verify(rule: QuadRule, measure=None):
    """w_j < mu(x_{j-1}, x_{j+1}); outermost nodes use the support endpoints"""
    if len(rule) < 2:
        return []
    measure = _measure_of(rule, measure)
    lo, hi = measure.support
    nodes = rule.nodes
    checks = []
    for j, weight in enumerate(rule.weights):
        left = nodes[j - 1] if j > 0 else lo
        right = nodes[j + 1] if j + 1 < len(nodes) else hi
        mass = measure.open_interval_mass(left, right)
        slack = mass - weight
        checks.append(BracketCheck(j + 1, 0.0, float(weight), float(mass), float(slack), slack > 0))
    return checks


def _reference_integral(f, measure, upper):
    if measure.atoms is not None:
        return math.fsum(w * f(p) for p, w in measure.atoms if p <= upper)
    lo = measure.support[0]
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            value, error = quad(lambda x: f(x) * float(measure.density(np.array([x]))[0]),
                                lo, upper, epsabs=1e-13, epsrel=1e-12, limit=200)
        except IntegrationWarning as e:
            raise CrossCheckError(f"reference integral on [{lo}, {upper}]: {e}", math.inf) from e
    return value


def posse_verify(rule: QuadRule, f: Callable, k: int, measure=None) -> BracketCheck:
    """sum_{j<k} w_j f(x_j) <= integral_a^{x_k} f dmu <= sum_{j<=k} w_j f(x_j)"""
    if not 1 <= k <= len(rule):
        raise ParameterError(f"k must lie in [1, {len(rule)}], got {k}")
    measure = _measure_of(rule, measure)
    values = np.array([f(x) for x in rule.nodes]) * rule.weights
    lower = math.fsum(values[:k - 1])
    upper = math.fsum(values[:k])
    middle = _reference_integral(f, measure, rule.nodes[k - 1])
    slack = min(middle - lower, upper - middle)
    return BracketCheck(k, lower, middle, upper, slack, slack > -1e-12 * max(1.0, abs(upper)))


def _orthonormal_polys(rc, n):
    """p_0..p_n as numpy polynomials"""
    polys = [Polynomial([1.0 / math.sqrt(rc.mass)])]
    x = Polynomial([0.0, 1.0])
    prev = Polynomial([0.0])
    for k in range(n):
        following = ((x - rc.b[k]) * polys[k] - (rc.a[k - 1] if k else 0.0) * prev) / rc.a[k]
        prev = polys[k]
        polys.append(following)
    return polys


def stieltjes_poly(rc: RecurrenceCoeffs, n: int) -> StieltjesPoly:
    """Monic E_{n+1} with integral p_n E_{n+1} x^k dmu = 0 for k = 0..n"""
    size = math.ceil((3 * n + 2) / 2)
    needed = max(size, n + 1)
    if rc.levels < needed:
        raise ParameterError(f"stieltjes_poly({n}) needs {needed} levels, have {rc.levels}")
    rule = gauss_rule(rc, size, certify=False)
    values = eval_orthonormal(rc, rule.nodes, n + 1)
    weighted = rule.weights * values[n]
    # test functions p_0..p_n span the same space as 1, x, ..., x^n
    triple = np.einsum("j,kj,ij->ki", weighted, values[:n + 1], values)
    system = triple[:, :n + 1]
    condition = float(np.linalg.cond(system))
    if not np.isfinite(condition) or condition > 1e14:
        raise SingularSystemError(f"stieltjes polynomial of degree {n + 1}", condition)
    ortho = np.append(np.linalg.solve(system, -triple[:, n + 1]), 1.0)
    polys = _orthonormal_polys(rc, n + 1)
    total = sum((c * p for c, p in zip(ortho, polys)), Polynomial([0.0]))
    lead = total.coef[-1]
    monic = Polynomial(total.coef / lead)

    # residual on the coefficient side: the rule nodes may be zeros of E_{n+1}
    residual = 0.0
    for row in triple * ortho[None, :]:
        scale = math.fsum(np.abs(row)) or 1.0
        residual = max(residual, abs(math.fsum(row)) / scale)
    if residual > Config.EXACTNESS_TOL:
        raise CrossCheckError(f"orthogonality of E_{n + 1}", residual, Config.EXACTNESS_TOL)
    return StieltjesPoly(n + 1, tuple(monic.coef), n, tuple(ortho / lead), residual)


def recurrence_enclosure(rc: RecurrenceCoeffs):
    """Gershgorin interval of the Jacobi matrix over every available level"""
    b = np.asarray(rc.b)
    radius = np.asarray(rc.a) + np.concatenate([[0.0], rc.a[:-1]])
    return float(np.min(b - radius)), float(np.max(b + radius))


def kronrod_rule(rc: RecurrenceCoeffs, n: int, measure=None) -> KronrodRule:
    """Gauss nodes of p_n plus the zeros of E_{n+1}, with certified exactness"""
    if rc.levels < 2 * n + 2:
        raise ParameterError(f"kronrod_rule({n}) needs {2 * n + 2} levels, have {rc.levels}")
    gauss_nodes = zeros(rc, n)
    poly = stieltjes_poly(rc, n)
    monic = Polynomial(poly.coeffs)
    roots = np.roots(poly.coeffs[::-1])
    if np.any(np.abs(roots.imag) > 1e-8 * (1.0 + np.abs(roots.real))):
        raise NodeError("Stieltjes polynomial has complex zeros", roots)
    added = np.sort(roots.real)
    slope = monic.deriv()
    for _ in range(3):
        added = added - monic(added) / slope(added)
    lo, hi = measure.support if measure is not None else recurrence_enclosure(rc)
    outside = added[(added <= lo) | (added >= hi)]
    if outside.size:
        raise NodeError("Stieltjes zeros outside the support", outside)
    distance = np.min(np.abs(added[:, None] - gauss_nodes[None, :]))
    if distance < 1e-10:
        raise NodeError("Stieltjes zeros coincide with Gauss nodes", added)
    nodes = np.sort(np.concatenate([gauss_nodes, added]))
    if np.any(np.diff(nodes) <= 0):
        raise NodeError("Stieltjes zeros are not simple", added)

    # exactness on p_0..p_{2n}; integral of p_k is sqrt(mass) for k = 0, else zero
    basis = eval_orthonormal(rc, nodes, 2 * n)
    rhs = np.zeros(2 * n + 1)
    rhs[0] = math.sqrt(rc.mass)
    condition = float(np.linalg.cond(basis))
    if not np.isfinite(condition) or condition > 1e14:
        raise SingularSystemError(f"kronrod weights for n={n}", condition)
    if n > 10:
        logger.warning("kronrod_rule(%d): weight system condition %.3e", n, condition)
    weights = np.linalg.solve(basis, rhs)
    if np.any(weights <= 0):
        raise NodeError("Kronrod extension has non-positive weights", weights)

    moments = _reference_moments(rc, measure, 4 * n + 1)
    exactness = certify_exactness(nodes, weights, moments, 4 * n + 1)
    if exactness < 3 * n + 1:
        logger.warning("kronrod_rule(%d) certified only to degree %d", n, exactness)
    return KronrodRule(_frozen(gauss_nodes), _frozen(added), _frozen(nodes),
                       _frozen(weights), exactness, condition)


def monomial_to_chebyshev_t(coeffs):
    """Coefficients c with p = c_0/2 + sum_{k>=1} c_k T_k"""
    tcoeffs = np.array(chebyshev.poly2cheb(coeffs), dtype=float)
    tcoeffs[0] *= 2.0
    return tuple(tcoeffs)


def geronimus_from_stieltjes(tcoeffs):
    """E = c_0/2 + sum c_k T_k  ->  S = sum_k c_{k+1} U_k"""
    if len(tcoeffs) < 2:
        raise ParameterError("need at least c_0 and c_1")
    return tuple(tcoeffs[1:])


def chebyshev_u_to_monomial(ucoeffs) -> Polynomial:
    x = Polynomial([0.0, 1.0])
    previous, current = Polynomial([0.0]), Polynomial([1.0])
    total = Polynomial([0.0])
    for c in ucoeffs:
        total = total + c * current
        previous, current = current, 2 * x * current - previous
    return total


def geronimus_polynomial(rc: RecurrenceCoeffs, n: int) -> Polynomial:
    poly = stieltjes_poly(rc, n)
    return chebyshev_u_to_monomial(geronimus_from_stieltjes(monomial_to_chebyshev_t(poly.coeffs)))


def geronimus_check(rc: RecurrenceCoeffs, n: int) -> GeronimusReport:
    """Residuals of integral p_n S_n T_k dmu for 0 < k <= n, and integral p_n S_n dmu"""
    size = math.ceil((3 * n + 1) / 2) + 1
    rule = gauss_rule(rc, size, certify=False)
    s_values = geronimus_polynomial(rc, n)(rule.nodes)
    base = rule.weights * eval_orthonormal(rc, rule.nodes, n)[n] * s_values
    residuals = []
    for k in range(1, n + 1):
        terms = base * chebyshev.chebval(rule.nodes, [0.0] * k + [1.0])
        scale = math.fsum(np.abs(terms)) or 1.0
        residuals.append(abs(math.fsum(terms)) / scale)
    return GeronimusReport(tuple(residuals), math.fsum(base))


def cauchy_jfraction(rc: RecurrenceCoeffs, n: int) -> JFraction:
    """J-fraction whose n-th convergent is sum w_j/(z - x_j) of the n-point rule"""
    return JFraction((rc.mass,) + tuple(v * v for v in rc.a[:n - 1]), rc.b[:n])


def gauss_convergence_harness(source, f: Callable, n_list, reference=None, pole=None):
    """Error of the n-point Gauss rule for each n; with pole=z, f is 1/(z - x)
    and the n-th convergent error is reported alongside.

    source is a MeasureDescriptor with a recurrence, or RecurrenceCoeffs.
    """
    n_list = list(n_list)
    if isinstance(source, MeasureDescriptor):
        if source.recurrence is None:
            raise ParameterError(f"measure {source.name!r} has no recurrence")
        rc = source.recurrence(2 * max(n_list))
    else:
        rc = source
    if pole is not None:
        f = lambda x: 1.0 / (pole - x)
    if reference is None:
        size = 2 * max(n_list)
        if rc.levels < size:
            raise ParameterError(f"reference rule needs {size} levels, have {rc.levels}")
        reference = gauss_rule(rc, size, certify=False).integrate(f)
    rows = []
    for n in n_list:
        value = gauss_rule(rc, n, certify=False).integrate(f)
        convergent_error = None
        if pole is not None:
            convergent_error = abs(reference - j_convergent(cauchy_jfraction(rc, n), pole, n))
        rows.append(HarnessRow(n, value, abs(value - reference), convergent_error))
    return rows


def markov_transform_check(rc: RecurrenceCoeffs, z, n_list):
    """Markov case f = 1/(z - x): the Gauss sum and the n-th convergent coincide"""
    rows = gauss_convergence_harness(rc, None, n_list, pole=z)
    for row in rows:
        gap = abs(row.error - row.convergent_error)
        if gap > Config.PADE_MATCH_TOL * max(1.0, abs(row.value)):
            raise CrossCheckError(f"markov n={row.n}", gap, Config.PADE_MATCH_TOL)
    return rows
