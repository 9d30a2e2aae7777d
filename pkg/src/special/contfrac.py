"""S- and J-fractions: representation, contraction, convergents and
coefficient-driven determinacy evidence.

Convergents use the numerator/denominator recursion

    X_k = d_k X_{k-1} + e_k X_{k-2},  A_{-1} = 1, A_0 = 0, B_{-1} = 0, B_0 = 1

with partial numerators e_k and partial denominators d_k. For an
S-fraction e_k = 1 and d_k alternates between c_k z (odd k) and c_k
(even k). For a J-fraction e_1 = a_0^2, e_k = -a_{k-1}^2 and
d_k = z - b_{k-1}. With these seeds

    A_n B_{n-1} - A_{n-1} B_n = (-1)^(n-1) e_1 e_2 ... e_n.

All arithmetic is generic, so Fraction inputs stay exact.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Sequence

import numpy as np
from numpy.polynomial import Polynomial

from src.config import Config
from src.special.errors import CoefficientError, ParameterError, PoleError
from src.special.qseries import stieltjes_wigert_c

logger = logging.getLogger(__name__)


class Trend(str, Enum):
    GROWING = "growing"
    LEVELING = "leveling"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SFraction:
    """1/(c_1 z + 1/(c_2 + 1/(c_3 z + ...)))"""
    c: tuple
    stieltjes_mode: bool = True

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(self.c))
        if not self.c:
            raise CoefficientError("an S-fraction needs at least one coefficient")
        for index, value in enumerate(self.c, start=1):
            if value == 0:
                raise CoefficientError(f"c_{index} is zero")
            if self.stieltjes_mode and value < 0:
                raise CoefficientError(f"c_{index} = {value} is negative in Stieltjes mode")

    def __len__(self):
        return len(self.c)

    @classmethod
    def stieltjes_wigert(cls, q, m):
        return cls(stieltjes_wigert_c(q, m))


@dataclass(frozen=True)
class JFraction:
    """a_0^2/(z - b_0 - a_1^2/(z - b_1 - a_2^2/(z - b_2 - ...)))"""
    a_sq: tuple
    b: tuple
    stieltjes_mode: bool = False

    def __post_init__(self):
        object.__setattr__(self, "a_sq", tuple(self.a_sq))
        object.__setattr__(self, "b", tuple(self.b))
        if len(self.a_sq) - len(self.b) not in (0, 1):
            raise CoefficientError(
                f"len(a_sq)={len(self.a_sq)} must equal len(b)={len(self.b)} or exceed it by one")
        if not self.b:
            raise CoefficientError("a J-fraction needs at least one level")
        for index, value in enumerate(self.a_sq):
            if value == 0:
                raise CoefficientError(f"a_{index}^2 is zero")
            if self.stieltjes_mode and value < 0:
                raise CoefficientError(f"a_{index}^2 = {value} is negative in Stieltjes mode")
        if self.stieltjes_mode:
            for index, value in enumerate(self.b):
                if value >= 0:
                    raise CoefficientError(f"b_{index} = {value} is not negative in Stieltjes mode")

    @property
    def depth(self):
        """Largest n for which the n-th convergent is defined"""
        return min(len(self.a_sq), len(self.b))


@dataclass(frozen=True)
class ConvergentPair:
    numerator: Any
    denominator: Any
    n: int
    prev_numerator: Any = 0
    prev_denominator: Any = 1
    log_scale: float = 0.0
    pole_floor: float = 0.0
    z: Any = None

    @property
    def is_pole(self):
        return abs(self.denominator) < self.pole_floor

    @property
    def value(self):
        if self.is_pole:
            raise PoleError(self.z, self.n, abs(self.denominator))
        return self.numerator / self.denominator


@dataclass(frozen=True)
class DeterminacyReport:
    partial_sum: float
    trend: Trend
    horizon: int


@dataclass(frozen=True)
class BracketReport:
    holds: bool
    min_gap: float
    violations: tuple = ()


def _recurse(numerators, denominators, z=None):
    """Run the two-term recursion over the given partial numerators and denominators"""
    a_prev, a_cur = 1, 0
    b_prev, b_cur = 0, 1
    history = 1
    log_scale = 0.0
    n = 0
    for e, d in zip(numerators, denominators):
        a_prev, a_cur = a_cur, d * a_cur + e * a_prev
        b_prev, b_cur = b_cur, d * b_cur + e * b_prev
        n += 1
        history = max(history, abs(b_cur))
        scale = max(abs(a_cur), abs(b_cur), abs(a_prev), abs(b_prev))
        if scale > Config.CONVERGENT_RESCALE:
            a_prev, a_cur, b_prev, b_cur = (v / scale for v in (a_prev, a_cur, b_prev, b_cur))
            history = history / scale
            log_scale += math.log(scale)
            logger.debug("rescaled convergent at level %d by %.3e", n, float(scale))
    return ConvergentPair(
        numerator=a_cur, denominator=b_cur, n=n,
        prev_numerator=a_prev, prev_denominator=b_prev,
        log_scale=log_scale, pole_floor=Config.POLE_THRESHOLD * history, z=z,
    )


def _s_terms(s, z, n):
    numerators = [1] * n
    denominators = [c * z if k % 2 == 0 else c for k, c in enumerate(s.c[:n])]
    return numerators, denominators


def _j_terms(j, z, n):
    numerators = [j.a_sq[0]] + [-a for a in j.a_sq[1:n]]
    denominators = [z - b for b in j.b[:n]]
    return numerators, denominators


def s_convergent_pair(s: SFraction, z, n: int) -> ConvergentPair:
    if not 1 <= n <= len(s.c):
        raise ParameterError(f"n must lie in [1, {len(s.c)}], got {n}")
    return _recurse(*_s_terms(s, z, n), z=z)


def s_convergent(s: SFraction, z, n: int):
    """Value of the S-fraction truncated after c_n"""
    return s_convergent_pair(s, z, n).value


def j_convergent_pair(j: JFraction, z, n: int) -> ConvergentPair:
    if not 0 <= n <= j.depth:
        raise ParameterError(f"n must lie in [0, {j.depth}], got {n}")
    return _recurse(*_j_terms(j, z, n), z=z)


def j_convergent(j: JFraction, z, n: int):
    """n-th convergent of the J-fraction at z"""
    return j_convergent_pair(j, z, n).value


def j_convergent_polys(j: JFraction, n: int):
    """Numerator and denominator of the n-th convergent as polynomials in z"""
    if not 0 <= n <= j.depth:
        raise ParameterError(f"n must lie in [0, {j.depth}], got {n}")
    numerators, _ = _j_terms(j, 0.0, n)
    a_prev, a_cur = Polynomial([1.0]), Polynomial([0.0])
    b_prev, b_cur = Polynomial([0.0]), Polynomial([1.0])
    for e, b in zip(numerators, j.b[:n]):
        d = Polynomial([-float(b), 1.0])
        a_prev, a_cur = a_cur, d * a_cur + float(e) * a_prev
        b_prev, b_cur = b_cur, d * b_cur + float(e) * b_prev
    return a_cur, b_cur


def partial_numerators(j: JFraction, n: int):
    return _j_terms(j, 0, n)[0]


def determinant_defect(j: JFraction, z, n: int):
    """Relative defect of A_n B_{n-1} - A_{n-1} B_n = (-1)^(n-1) prod e_k"""
    if n < 1:
        raise ParameterError("the determinant identity needs n >= 1")
    pair = j_convergent_pair(j, z, n)
    expected = (-1) ** (n - 1)
    for e in partial_numerators(j, n):
        expected = expected * e
    observed = (pair.numerator * pair.prev_denominator
                - pair.prev_numerator * pair.denominator)
    if pair.log_scale:
        observed = observed * math.exp(2.0 * pair.log_scale)
    return abs(observed - expected) / abs(expected)


def contract(s: SFraction) -> JFraction:
    """Even contraction: the n-th convergent of the result is the 2n-th of s"""
    c = s.c
    m = len(c)
    if m < 3:
        raise CoefficientError(f"contraction needs at least 3 coefficients, got {m}")
    if m % 2 == 0:
        raise CoefficientError(f"contraction needs an odd number of coefficients, got {m}")
    if any(value == 0 for value in c):
        raise CoefficientError("zero coefficient in contraction")

    def at(index):
        return c[index - 1]

    a_sq = [1 / at(1)]
    b = [-1 / (at(1) * at(2))]
    n = 1
    while 2 * n + 1 <= m:
        a_sq.append(1 / (at(2 * n - 1) * at(2 * n) ** 2 * at(2 * n + 1)))
        if 2 * n + 2 <= m:
            b.append(-1 / (at(2 * n) * at(2 * n + 1)) - 1 / (at(2 * n + 1) * at(2 * n + 2)))
        n += 1
    return JFraction(tuple(a_sq), tuple(b), stieltjes_mode=s.stieltjes_mode)


def trend_label(terms: Sequence[float]) -> Trend:
    """Compare the last tenth of the terms with the first tenth"""
    if not terms:
        return Trend.INCONCLUSIVE
    block = max(1, len(terms) // 10)
    first = math.fsum(terms[:block])
    last = math.fsum(terms[-block:])
    if first <= 0:
        return Trend.INCONCLUSIVE
    ratio = last / first
    if ratio < Config.TREND_LEVELING:
        return Trend.LEVELING
    if ratio > Config.TREND_GROWING:
        return Trend.GROWING
    return Trend.INCONCLUSIVE


def determinacy_diagnostic(s: SFraction, horizon: int) -> DeterminacyReport:
    """Evidence on the divergence of sum c_n; never a verdict"""
    if any(value <= 0 for value in s.c):
        raise CoefficientError("determinacy diagnostic needs positive coefficients")
    if not 1 <= horizon <= len(s.c):
        raise ParameterError(f"horizon must lie in [1, {len(s.c)}], got {horizon}")
    terms = [float(value) for value in s.c[:horizon]]
    return DeterminacyReport(math.fsum(terms), trend_label(terms), horizon)


def convergent_brackets(s: SFraction, z: float, n_max: int) -> BracketReport:
    """Odd convergents decrease, even ones increase and every odd one
    stays above every even one (positive coefficients, real z > 0)"""
    if z <= 0:
        raise ParameterError("bracketing holds for real z > 0")
    values = [s_convergent(s, z, n) for n in range(1, n_max + 1)]
    odd, even = values[0::2], values[1::2]
    slack = 4 * np.finfo(float).eps
    violations = []
    for name, seq, sign in (("odd", odd, -1), ("even", even, 1)):
        for k in range(1, len(seq)):
            if sign * (seq[k] - seq[k - 1]) < -slack * abs(seq[k]):
                violations.append(f"{name} convergent {k} not monotone")
    min_gap = min(odd) - max(even) if even else math.inf
    if min_gap < -slack * abs(min(odd)):
        violations.append("odd and even convergents cross")
    return BracketReport(not violations, min_gap, tuple(violations))


def indeterminacy_gap(s: SFraction, z, n: int):
    """|S_{2n+1}(z) - S_{2n}(z)|, bounded away from zero when sum c_n converges"""
    return abs(s_convergent(s, z, 2 * n + 1) - s_convergent(s, z, 2 * n))


def stieltjes_wigert_sfraction(q, m) -> SFraction:
    return SFraction.stieltjes_wigert(q, m)
