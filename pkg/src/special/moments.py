"""Moment problems: Hankel solvability, Hausdorff monotonicity, Carleman
evidence, Stieltjes transforms, Pade moment matching and the
Stieltjes-Wigert indeterminacy demonstration.

Measure callables passed in through a MeasureDescriptor must be reentrant;
operations here may be called from several verify workers at once.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from src.config import Config
from src.special.contfrac import JFraction, Trend, j_convergent_polys, trend_label
from src.special.errors import (
    CoefficientError, CrossCheckError, ParameterError, PoleError,
)
from src.special.orthopoly import (
    Family, FamilyTag, MeasureDescriptor, RecurrenceCoeffs, eval_orthonormal,
    family_coeffs, hankel_ldl,
)

logger = logging.getLogger(__name__)


class MomentKind(str, Enum):
    STIELTJES = "stieltjes"
    HAMBURGER = "hamburger"
    HAUSDORFF = "hausdorff"


@dataclass(frozen=True)
class MomentSequence:
    values: tuple
    kind: MomentKind = MomentKind.HAMBURGER
    interval: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        object.__setattr__(self, "kind", MomentKind(self.kind))
        if not self.values:
            raise ParameterError("a moment sequence needs mu_0")
        if not self.values[0] > 0:
            raise ParameterError(f"mu_0 must be positive, got {self.values[0]}")
        if self.kind is MomentKind.HAUSDORFF and self.interval is None:
            object.__setattr__(self, "interval", (0.0, 1.0))
        if self.interval is not None:
            lo, hi = (float(v) for v in self.interval)
            if not lo < hi:
                raise ParameterError(f"bad interval {self.interval}")
            object.__setattr__(self, "interval", (lo, hi))

    def __len__(self):
        return len(self.values)

    @classmethod
    def from_measure(cls, md: MeasureDescriptor, count, kind=MomentKind.HAMBURGER):
        if md.moment_oracle is None:
            raise ParameterError(f"{md.name or 'measure'} has no moment oracle")
        return cls(tuple(md.moment_oracle(k) for k in range(count)), kind)

    @classmethod
    def from_family(cls, family: Family, count):
        kind = MomentKind.HAMBURGER
        if family.tag in (FamilyTag.LAGUERRE, FamilyTag.STIELTJES_WIGERT):
            kind = MomentKind.STIELTJES
        return cls.from_measure(family.measure(), count, kind)


class Verdict(str, Enum):
    POSITIVE_DEFINITE = "positive_definite"
    FAILED = "failed_at"


@dataclass(frozen=True)
class SolvabilityReport:
    level_reached: int
    pivots: tuple
    verdict: Verdict
    shifted: bool
    failed_level: Optional[int] = None
    note: str = ""

    @property
    def passed(self):
        return self.verdict is Verdict.POSITIVE_DEFINITE

    def describe(self):
        if self.passed:
            return f"positive_definite through level {self.level_reached}"
        text = f"failed_at({self.failed_level})"
        return f"{text} {self.note}" if self.note else text


@dataclass(frozen=True)
class MonotonicityReport:
    consistent: bool
    minimum: float
    violation: Optional[tuple] = None


@dataclass(frozen=True)
class CarlemanReport:
    terms: tuple
    partial_sums: tuple
    trend: Trend


@dataclass(frozen=True)
class TransformResult:
    value: complex
    error_estimate: float


@dataclass(frozen=True)
class MomentIdentityResult:
    numeric: float
    closed_form: float
    deviation: float


def _solvability(values, shifted):
    size = (len(values) + 1) // 2
    if size < 1:
        raise ParameterError("not enough moments for the 1 x 1 Hankel test")
    factor = hankel_ldl(values, size)
    if factor.positive_definite:
        return SolvabilityReport(size, factor.pivots, Verdict.POSITIVE_DEFINITE, shifted)
    return SolvabilityReport(factor.failed_level - 1, factor.pivots, Verdict.FAILED, shifted,
                             factor.failed_level, factor.note)


def hankel_solvability(m: MomentSequence):
    """(unshifted, shifted) reports; shifted is None unless kind is stieltjes"""
    unshifted = _solvability(m.values, shifted=False)
    shifted = None
    if m.kind is MomentKind.STIELTJES:
        if len(m.values) < 2:
            raise ParameterError("the shifted test needs mu_1")
        shifted = _solvability(m.values[1:], shifted=True)
    return unshifted, shifted


def hausdorff_monotonicity(m: MomentSequence, depth: int) -> MonotonicityReport:
    """Minimum of (-1)^k Delta^k mu_n over k <= depth"""
    if m.kind is not MomentKind.HAUSDORFF or m.interval != (0.0, 1.0):
        raise ParameterError("complete monotonicity applies to hausdorff moments on [0, 1]")
    if not 0 <= depth < len(m.values):
        raise ParameterError(f"depth {depth} exceeds the {len(m.values)} available moments")
    values = np.array(m.values)
    minimum = math.inf
    violation = None
    for k in range(depth + 1):
        differences = (-1) ** k * np.diff(values, k)
        low = int(np.argmin(differences))
        minimum = min(minimum, float(differences[low]))
        if violation is None and differences[low] < -Config.HAUSDORFF_TOL:
            violation = (k, int(np.nonzero(differences < -Config.HAUSDORFF_TOL)[0][0]))
    return MonotonicityReport(violation is None, minimum, violation)


def carleman_diagnostic(m: MomentSequence, horizon: int) -> CarlemanReport:
    """Partial sums of mu_{2k}^{-1/(2k)}; advisory only"""
    if not 1 <= horizon or 2 * horizon >= len(m.values):
        raise ParameterError(f"horizon {horizon} needs mu_{2 * horizon}")
    terms = []
    for k in range(1, horizon + 1):
        value = m.values[2 * k]
        if value <= 0:
            raise CoefficientError(f"mu_{2 * k} = {value} is not positive")
        terms.append(math.exp(-math.log(value) / (2 * k)))
    return CarlemanReport(tuple(terms), tuple(np.cumsum(terms)), trend_label(terms))


def carleman_from_even_moments(even, horizon):
    """Same diagnostic from mu_2, mu_4, ... alone (odd moments irrelevant)"""
    values = [1.0]
    for value in even[:horizon]:
        values.extend([0.0, value])
    return carleman_diagnostic(MomentSequence(values), horizon)


def orthonormal_sum_diagnostic(rc: RecurrenceCoeffs, x, horizon: int) -> CarlemanReport:
    """Partial sums of p_k(x)^2 with the shared trend labels"""
    values = eval_orthonormal(rc, x, horizon)
    terms = [float(abs(v) ** 2) for v in values]
    return CarlemanReport(tuple(terms), tuple(np.cumsum(terms)), trend_label(terms))


def _on_singular_set(md, z):
    if abs(complex(z).imag) > 0:
        return False
    lo, hi = md.support
    t = -complex(z).real
    if md.atoms is not None:
        return any(t == p for p, _ in md.atoms)
    return lo <= t <= hi


def _gauss_sum(md, z, n):
    # Use lazy imports to avoid circular dependencies
    from src.special.quadrature import gauss_rule
    rule = gauss_rule(md.recurrence(n), n, certify=False)
    return np.sum(rule.weights / (z + rule.nodes))


def _truncated_support(md):
    lo, hi = md.support
    peak = float(np.max(md.density(md.spot_grid())))
    threshold = 1e-16 * peak
    if math.isinf(lo):
        lo = -1.0
        while md.density(np.array([lo]))[0] > threshold:
            lo *= 2.0
    if math.isinf(hi):
        hi = 1.0
        while md.density(np.array([hi]))[0] > threshold:
            hi *= 2.0
    return lo, hi


def _panel_sum(md, z, lo, hi, panels, order=20):
    from src.special.quadrature import legendre_rule
    rule = legendre_rule(order)
    edges = np.linspace(lo, hi, panels + 1)
    total = 0.0
    for left, right in zip(edges[:-1], edges[1:]):
        half = 0.5 * (right - left)
        t = left + half * (rule.nodes + 1.0)
        total = total + half * np.sum(rule.weights * md.density(t) / (z + t))
    return total


def stieltjes_transform(md: MeasureDescriptor, z, nodes=None) -> TransformResult:
    """S(mu; z) = integral of dmu(t)/(z + t), with an error estimate from two rule sizes"""
    if _on_singular_set(md, z):
        raise PoleError(z, 0, 0.0)
    if md.atoms is not None:
        value = sum(w / (z + p) for p, w in md.atoms)
        return TransformResult(value, 0.0)
    nodes = nodes or Config.TRANSFORM_NODES
    if md.recurrence is not None:
        coarse = _gauss_sum(md, z, nodes)
        fine = _gauss_sum(md, z, 2 * nodes)
        return TransformResult(complex(fine) if np.iscomplexobj(fine) else float(fine),
                               float(abs(fine - coarse)))
    if md.density is None:
        raise ParameterError("measure has neither atoms, a recurrence nor a density")
    lo, hi = _truncated_support(md)
    logger.debug("transform support truncated to [%g, %g]", lo, hi)
    panels = max(8, nodes // 4)
    coarse = _panel_sum(md, z, lo, hi, panels)
    fine = _panel_sum(md, z, lo, hi, 2 * panels)
    return TransformResult(complex(fine) if np.iscomplexobj(fine) else float(fine),
                           float(abs(fine - coarse)))


def stieltjes_oriented_jfraction(rc: RecurrenceCoeffs, n: int) -> JFraction:
    """J-fraction whose n-th convergent approximates S(mu; z) = sum (-1)^k mu_k / z^(k+1)"""
    if not 1 <= n <= rc.levels:
        raise ParameterError(f"n must lie in [1, {rc.levels}], got {n}")
    a_sq = (rc.mass,) + tuple(v * v for v in rc.a[:n - 1])
    return JFraction(a_sq, tuple(-v for v in rc.b[:n]))


def _series_coefficients(numerator, denominator, count):
    """Coefficients s_k of numerator/denominator = sum s_k / z^(k+1)"""
    degree = denominator.degree()
    lead = denominator.coef[-1]
    if abs(lead) < 1e-300:
        raise CrossCheckError("pade long division", abs(lead))
    den = denominator.coef[::-1]
    num = np.zeros(degree)
    coef = numerator.coef
    num[degree - len(coef):] = coef[::-1]
    series = []
    for k in range(count):
        acc = num[k] if k < degree else 0.0
        acc -= sum(den[i] * series[k - i] for i in range(1, min(k, degree) + 1))
        series.append(acc / lead)
    return series


def pade_match_check(rc: RecurrenceCoeffs, m: MomentSequence, n: int) -> int:
    """Number of leading expansion coefficients of the n-th convergent equal to (-1)^k mu_k"""
    if n == 0:
        return 0
    numerator, denominator = j_convergent_polys(stieltjes_oriented_jfraction(rc, n), n)
    series = _series_coefficients(numerator, denominator, len(m.values))
    matched = 0
    scale = 0.0
    for k, (term, moment) in enumerate(zip(series, m.values)):
        scale = max(scale, abs(moment))
        if abs(term - (-1) ** k * moment) > Config.PADE_MATCH_TOL * scale:
            break
        matched += 1
    return matched


def sw_moment_identity(lam: float, k: int, nodes=40) -> MomentIdentityResult:
    """Moment k of u^{-log u}[1 + lam sin(2 pi log u)] against sqrt(pi) e^{(k+1)^2/4}"""
    if abs(lam) > 1:
        raise ParameterError(f"|lambda| must not exceed 1, got {lam}")
    if k < 0:
        raise ParameterError(f"k must be non-negative, got {k}")
    from src.special.quadrature import gauss_rule
    rule = gauss_rule(family_coeffs(Family(FamilyTag.HERMITE), nodes), nodes, certify=False)
    # u = e^t, then t = s + (k+1)/2
    shift = (k + 1) / 2.0
    integrand = 1.0 + lam * np.sin(2.0 * math.pi * (rule.nodes + shift))
    growth = math.exp((k + 1) ** 2 / 4.0)
    numeric = growth * math.fsum(rule.weights * integrand)
    closed = math.sqrt(math.pi) * growth
    return MomentIdentityResult(numeric, closed, abs(numeric - closed) / closed)


def sw_weight(u, lam=0.0, k=1.0):
    """exp(-k^2 log^2 u)[1 + lam sin(2 pi log u)] for u > 0"""
    log_u = np.log(np.asarray(u, dtype=float))
    return np.exp(-(k * log_u) ** 2) * (1.0 + lam * np.sin(2.0 * math.pi * log_u))


def sw_moments(q: float, count: int) -> MomentSequence:
    """Moments of the normalised Stieltjes-Wigert measure, q^{-(j+1)^2/2}"""
    return MomentSequence.from_family(Family(FamilyTag.STIELTJES_WIGERT, q=q), count)
