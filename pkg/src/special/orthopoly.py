"""Three-term recurrences in orthonormal form.

Convention: z p_k = a_{k+1} p_{k+1} + b_k p_k + a_k p_{k-1}, p_{-1} = 0,
p_0 = 1/sqrt(mass). Hermite uses the weight exp(-x^2).
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import mpmath
import numpy as np
from scipy import special
from scipy.linalg import LinAlgError, eigh_tridiagonal
from scipy.optimize import brentq

from src.config import Config
from src.special.contfrac import SFraction, contract
from src.special.errors import (
    ConvergenceError, FactorizationError, ParameterError,
)
from src.special.qseries import check_nome, q_pochhammer, wigert_k

logger = logging.getLogger(__name__)

DEFAULT_SW_NOME = math.exp(-0.5)


@dataclass(frozen=True)
class RecurrenceCoeffs:
    """Off-diagonal a_1..a_N, diagonal b_0..b_{N-1} and total mass"""
    a: tuple
    b: tuple
    mass: float

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))
        object.__setattr__(self, "mass", float(self.mass))
        if len(self.a) != len(self.b) or not self.a:
            raise ParameterError(
                f"need N >= 1 levels with len(a) == len(b), got {len(self.a)} and {len(self.b)}")
        if any(not v > 0 for v in self.a):
            raise ParameterError("off-diagonal coefficients must be positive")
        if not self.mass > 0:
            raise ParameterError(f"mass must be positive, got {self.mass}")

    @property
    def levels(self):
        return len(self.b)

    def truncate(self, n):
        if not 1 <= n <= self.levels:
            raise ParameterError(f"cannot truncate {self.levels} levels to {n}")
        return RecurrenceCoeffs(self.a[:n], self.b[:n], self.mass)

    def to_monic(self):
        """(alpha, beta) of p_{k+1} = (x - alpha_k) p_k - beta_k p_{k-1}, beta_0 = mass"""
        beta = (self.mass,) + tuple(v * v for v in self.a)
        return self.b, beta

    @classmethod
    def from_monic(cls, alpha, beta):
        if len(beta) != len(alpha) + 1:
            raise ParameterError("monic form needs len(beta) == len(alpha) + 1")
        return cls(tuple(math.sqrt(v) for v in beta[1:]), tuple(alpha), beta[0])


@dataclass(frozen=True)
class MeasureDescriptor:
    """Positive measure given by a density or by finitely many atoms"""
    support: tuple
    density: Optional[Callable] = None
    cdf: Optional[Callable] = None
    moment_oracle: Optional[Callable] = None
    mass: Optional[float] = None
    atoms: Optional[tuple] = None
    recurrence: Optional[Callable] = field(default=None, compare=False)
    name: str = ""

    def __post_init__(self):
        lo, hi = self.support
        if not lo < hi:
            raise ParameterError(f"empty support {self.support}")
        if self.atoms is not None:
            atoms = tuple(sorted((float(x), float(w)) for x, w in self.atoms))
            if any(w <= 0 for _, w in atoms):
                raise ParameterError("atom masses must be positive")
            object.__setattr__(self, "atoms", atoms)
            if self.mass is None:
                object.__setattr__(self, "mass", math.fsum(w for _, w in atoms))
        if self.density is not None:
            grid = self.spot_grid()
            with np.errstate(all="ignore"):
                values = np.asarray(self.density(grid), dtype=float)
            if np.any(values < 0):
                raise ParameterError(f"density of {self.name or 'measure'} is negative on its support")

    def spot_grid(self):
        lo, hi = self.support
        offsets = np.array([1e-3, 0.1, 0.5, 1.0, 2.0, 5.0])
        if math.isinf(lo) and math.isinf(hi):
            return np.concatenate([-offsets[::-1], [0.0], offsets])
        if math.isinf(hi):
            return lo + offsets
        if math.isinf(lo):
            return hi - offsets
        return np.linspace(lo, hi, 35)[1:-1]

    @classmethod
    def uniform(cls, lo, hi):
        width = hi - lo
        return cls(
            support=(lo, hi),
            density=lambda x: np.ones_like(np.asarray(x, dtype=float)),
            cdf=lambda x: float(np.clip(x, lo, hi)) - lo,
            moment_oracle=lambda k: (hi ** (k + 1) - lo ** (k + 1)) / (k + 1),
            mass=width,
            name=f"uniform[{lo},{hi}]",
        )

    @classmethod
    def discrete(cls, points, weights, name="discrete"):
        atoms = tuple(zip(points, weights))
        lo = min(points)
        hi = max(points)
        if lo == hi:
            lo, hi = lo - 0.5, hi + 0.5
        return cls(support=(lo, hi), atoms=atoms, name=name,
                   moment_oracle=lambda k: math.fsum(w * x ** k for x, w in atoms))

    @property
    def total_mass(self):
        if self.mass is not None:
            return self.mass
        if self.cdf is not None:
            return self.cdf(self.support[1])
        raise ParameterError("measure has neither a mass nor a cdf")

    def cdf_right(self, x):
        """mu[a, x]"""
        if self.atoms is not None:
            return math.fsum(w for p, w in self.atoms if p <= x)
        return self.cdf(x)

    def cdf_left(self, x):
        """mu[a, x)"""
        if self.atoms is not None:
            return math.fsum(w for p, w in self.atoms if p < x)
        return self.cdf(x)

    def open_interval_mass(self, lo, hi):
        """mu(lo, hi)"""
        return self.cdf_left(hi) - self.cdf_right(lo)


class FamilyTag(str, Enum):
    JACOBI = "jacobi"
    LAGUERRE = "laguerre"
    HERMITE = "hermite"
    LEGENDRE = "legendre"
    CHEBYSHEV_T = "chebyshev_t"
    CHEBYSHEV_U = "chebyshev_u"
    STIELTJES_WIGERT = "stieltjes_wigert"
    CARLITZ_C = "carlitz_c"
    CARLITZ_D = "carlitz_d"


PARAM_ALIASES = {"α": "alpha", "β": "beta", "a": "alpha", "b": "beta"}


@dataclass(frozen=True)
class Family:
    tag: FamilyTag
    alpha: float = 0.0
    beta: float = 0.0
    q: float = DEFAULT_SW_NOME
    k: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "tag", FamilyTag(self.tag))
        if self.tag is FamilyTag.JACOBI and not (self.alpha > -1 and self.beta > -1):
            raise ParameterError(f"jacobi needs alpha, beta > -1, got {self.alpha}, {self.beta}")
        if self.tag is FamilyTag.LAGUERRE and not self.alpha > -1:
            raise ParameterError(f"laguerre needs alpha > -1, got {self.alpha}")
        if self.tag is FamilyTag.STIELTJES_WIGERT:
            check_nome(self.q)
        if self.tag in (FamilyTag.CARLITZ_C, FamilyTag.CARLITZ_D) and not 0 < self.k < 1:
            raise ParameterError(f"carlitz families need 0 < k < 1, got {self.k}")

    @classmethod
    def parse(cls, name, params=None):
        """Build a family from its CLI name and a parameter mapping"""
        try:
            tag = FamilyTag(name)
        except ValueError:
            raise ParameterError(f"unknown family {name!r}") from None
        values = Config.get_family_defaults(tag.value)
        for key, value in (params or {}).items():
            key = PARAM_ALIASES.get(key, key)
            if key not in values:
                raise ParameterError(f"family {name} takes no parameter {key!r}")
            values[key] = float(value)
        return cls(tag, **values)

    def measure(self) -> MeasureDescriptor:
        """Orthogonality measure with closed-form cdf and moments where available"""
        tag = self.tag
        recurrence = lambda n: family_coeffs(self, n)
        if tag in (FamilyTag.CARLITZ_C, FamilyTag.CARLITZ_D):
            # Use lazy imports to avoid circular dependencies
            from src.special.elliptic import EllipticContext, carlitz_measure
            which = "C_alpha" if tag is FamilyTag.CARLITZ_C else "D_beta"
            base = carlitz_measure(which, EllipticContext.from_modulus(self.k))
            return MeasureDescriptor(base.support, atoms=base.atoms,
                                     moment_oracle=base.moment_oracle,
                                     recurrence=recurrence, name=tag.value)
        if tag is FamilyTag.LEGENDRE:
            return MeasureDescriptor(
                (-1.0, 1.0),
                density=lambda x: np.ones_like(np.asarray(x, dtype=float)),
                cdf=lambda x: float(np.clip(x, -1.0, 1.0)) + 1.0,
                moment_oracle=lambda k: 2.0 / (k + 1) if k % 2 == 0 else 0.0,
                mass=2.0, recurrence=recurrence, name=tag.value)
        if tag is FamilyTag.CHEBYSHEV_T:
            return MeasureDescriptor(
                (-1.0, 1.0),
                density=lambda x: 1.0 / np.sqrt(1.0 - np.asarray(x, dtype=float) ** 2),
                cdf=lambda x: math.asin(min(1.0, max(-1.0, x))) + math.pi / 2,
                moment_oracle=lambda k: math.pi * math.comb(k, k // 2) / 2 ** k if k % 2 == 0 else 0.0,
                mass=math.pi, recurrence=recurrence, name=tag.value)
        if tag is FamilyTag.CHEBYSHEV_U:
            def cdf_u(x):
                x = min(1.0, max(-1.0, x))
                return 0.5 * (x * math.sqrt(1.0 - x * x) + math.asin(x)) + math.pi / 4
            return MeasureDescriptor(
                (-1.0, 1.0),
                density=lambda x: np.sqrt(np.clip(1.0 - np.asarray(x, dtype=float) ** 2, 0.0, None)),
                cdf=cdf_u,
                moment_oracle=lambda k: (math.pi * math.comb(k, k // 2) / (2 ** k * (k + 2))
                                         if k % 2 == 0 else 0.0),
                mass=math.pi / 2, recurrence=recurrence, name=tag.value)
        if tag is FamilyTag.HERMITE:
            return MeasureDescriptor(
                (-math.inf, math.inf),
                density=lambda x: np.exp(-np.asarray(x, dtype=float) ** 2),
                cdf=lambda x: 0.5 * math.sqrt(math.pi) * (1.0 + math.erf(x)),
                moment_oracle=lambda k: math.gamma((k + 1) / 2) if k % 2 == 0 else 0.0,
                mass=math.sqrt(math.pi), recurrence=recurrence, name=tag.value)
        if tag is FamilyTag.LAGUERRE:
            alpha = self.alpha
            return MeasureDescriptor(
                (0.0, math.inf),
                density=lambda x: np.asarray(x, dtype=float) ** alpha * np.exp(-np.asarray(x, dtype=float)),
                cdf=lambda x: math.gamma(alpha + 1) * special.gammainc(alpha + 1, max(x, 0.0)),
                moment_oracle=lambda k: math.exp(special.gammaln(k + alpha + 1)),
                mass=math.gamma(alpha + 1), recurrence=recurrence, name=tag.value)
        if tag is FamilyTag.JACOBI:
            alpha, beta = self.alpha, self.beta
            mass = _jacobi_mass(alpha, beta)
            return MeasureDescriptor(
                (-1.0, 1.0),
                density=lambda x: ((1.0 - np.asarray(x, dtype=float)) ** alpha
                                   * (1.0 + np.asarray(x, dtype=float)) ** beta),
                cdf=lambda x: mass * special.betainc(beta + 1, alpha + 1,
                                                     min(1.0, max(0.0, (x + 1.0) / 2.0))),
                moment_oracle=lambda k: _jacobi_moment(alpha, beta, k),
                mass=mass, recurrence=recurrence, name=tag.value)
        # Stieltjes-Wigert, normalised so the mass matches the S-fraction
        q = self.q
        width = wigert_k(q)

        def sw_density(x):
            x = np.asarray(x, dtype=float)
            with np.errstate(divide="ignore"):
                return np.where(x > 0, width / math.sqrt(math.pi)
                                * np.exp(-width ** 2 * np.log(np.where(x > 0, x, 1.0)) ** 2), 0.0)

        def sw_cdf(x):
            if x <= 0:
                return 0.0
            return 0.5 * q ** -0.5 * (1.0 + math.erf(width * math.log(x) - 1.0 / (2.0 * width)))

        return MeasureDescriptor(
            (0.0, math.inf), density=sw_density, cdf=sw_cdf,
            moment_oracle=lambda j: q ** (-((j + 1) ** 2) / 2.0),
            mass=q ** -0.5, recurrence=recurrence, name=tag.value)


def _jacobi_mass(alpha, beta):
    return math.exp((alpha + beta + 1) * math.log(2.0) + special.gammaln(alpha + 1)
                    + special.gammaln(beta + 1) - special.gammaln(alpha + beta + 2))


def _jacobi_moment(alpha, beta, k):
    # Alternating binomial sum; 60 digits absorb the cancellation for k <= 100
    with mpmath.workdps(60):
        alpha_mp, beta_mp = mpmath.mpf(alpha), mpmath.mpf(beta)
        total = mpmath.fsum(
            mpmath.binomial(k, i) * mpmath.mpf(2) ** i * (-1) ** (k - i)
            * mpmath.beta(i + beta_mp + 1, alpha_mp + 1)
            for i in range(k + 1))
        return float(mpmath.mpf(2) ** (alpha_mp + beta_mp + 1) * total)


def _jacobi_coeffs(alpha, beta, n):
    s = alpha + beta
    b = [(beta - alpha) / (s + 2)]
    for j in range(1, n):
        b.append((beta * beta - alpha * alpha) / ((2 * j + s) * (2 * j + s + 2)))
    a = [math.sqrt(4 * (1 + alpha) * (1 + beta) / ((2 + s) ** 2 * (3 + s)))]
    for j in range(2, n + 1):
        num = 4 * j * (j + alpha) * (j + beta) * (j + s)
        den = (2 * j + s) ** 2 * (2 * j + s + 1) * (2 * j + s - 1)
        a.append(math.sqrt(num / den))
    return RecurrenceCoeffs(a, b, _jacobi_mass(alpha, beta))


def _sw_coeffs(q, n):
    j = contract(SFraction.stieltjes_wigert(q, 2 * n + 1))
    # measure on (0, inf): reflect the J-fraction diagonal
    return RecurrenceCoeffs([math.sqrt(v) for v in j.a_sq[1:n + 1]],
                            [-v for v in j.b[:n]], j.a_sq[0])


def carlitz_numerators(which, k, n):
    """alpha_1..alpha_n (C family) or beta_1..beta_n (D family)"""
    values = []
    for m in range(1, n + 1):
        odd = m % 2 == 1
        if which == "C_alpha":
            values.append(m * m if odd else m * m * k * k)
        elif which == "D_beta":
            values.append(m * m * k * k if odd else m * m)
        else:
            raise ParameterError(f"unknown Carlitz family {which!r}")
    return values


def family_coeffs(f: Family, n: int) -> RecurrenceCoeffs:
    """Orthonormal recurrence coefficients for the first n levels"""
    if n < 1:
        raise ParameterError(f"n must be at least 1, got {n}")
    tag = f.tag
    if tag is FamilyTag.LEGENDRE:
        a = [j / math.sqrt(4 * j * j - 1) for j in range(1, n + 1)]
        return RecurrenceCoeffs(a, [0.0] * n, 2.0)
    if tag is FamilyTag.CHEBYSHEV_T:
        a = [math.sqrt(0.5)] + [0.5] * (n - 1)
        return RecurrenceCoeffs(a, [0.0] * n, math.pi)
    if tag is FamilyTag.CHEBYSHEV_U:
        return RecurrenceCoeffs([0.5] * n, [0.0] * n, math.pi / 2)
    if tag is FamilyTag.HERMITE:
        a = [math.sqrt(j / 2.0) for j in range(1, n + 1)]
        return RecurrenceCoeffs(a, [0.0] * n, math.sqrt(math.pi))
    if tag is FamilyTag.LAGUERRE:
        alpha = f.alpha
        a = [math.sqrt(j * (j + alpha)) for j in range(1, n + 1)]
        b = [2 * j + alpha + 1 for j in range(n)]
        return RecurrenceCoeffs(a, b, math.gamma(alpha + 1))
    if tag is FamilyTag.JACOBI:
        return _jacobi_coeffs(f.alpha, f.beta, n)
    if tag is FamilyTag.STIELTJES_WIGERT:
        return _sw_coeffs(f.q, n)
    which = "C_alpha" if tag is FamilyTag.CARLITZ_C else "D_beta"
    a = [math.sqrt(v) for v in carlitz_numerators(which, f.k, n)]
    return RecurrenceCoeffs(a, [0.0] * n, 1.0)


def eval_orthonormal(rc: RecurrenceCoeffs, z, n: int):
    """Array of p_0(z)..p_n(z); z may be a scalar or an array"""
    if not 0 <= n <= len(rc.a):
        raise ParameterError(f"n must lie in [0, {len(rc.a)}], got {n}")
    z = np.asarray(z)
    dtype = np.result_type(z.dtype, np.float64)
    values = np.empty((n + 1,) + z.shape, dtype=dtype)
    values[0] = 1.0 / math.sqrt(rc.mass)
    if n >= 1:
        values[1] = (z - rc.b[0]) * values[0] / rc.a[0]
    for k in range(1, n):
        values[k + 1] = ((z - rc.b[k]) * values[k] - rc.a[k - 1] * values[k - 1]) / rc.a[k]
    return values


def jacobi_matrix(rc: RecurrenceCoeffs, n: int):
    if not 1 <= n <= rc.levels:
        raise ParameterError(f"n must lie in [1, {rc.levels}], got {n}")
    off = np.array(rc.a[:n - 1])
    return np.diag(np.array(rc.b[:n])) + np.diag(off, 1) + np.diag(off, -1)


def jacobi_eigensystem(rc: RecurrenceCoeffs, n: int, vectors=True):
    """Eigenvalues (ascending) and optionally eigenvectors of the n x n Jacobi matrix"""
    if not 1 <= n <= rc.levels:
        raise ParameterError(f"n must lie in [1, {rc.levels}], got {n}")
    if n == 1:
        nodes = np.array([rc.b[0]])
        return (nodes, np.ones((1, 1))) if vectors else nodes
    try:
        result = eigh_tridiagonal(np.array(rc.b[:n]), np.array(rc.a[:n - 1]),
                                  eigvals_only=not vectors)
    except LinAlgError as e:
        raise ConvergenceError(f"tridiagonal eigenproblem failed: {e}") from e
    return result


def zeros(rc: RecurrenceCoeffs, n: int):
    """Zeros of p_n, ascending"""
    nodes = np.sort(jacobi_eigensystem(rc, n, vectors=False))
    if n > 1:
        gaps = np.diff(nodes)
        floor = Config.NODE_SEPARATION_TOL * np.maximum(1.0, np.abs(nodes[1:]))
        if np.any(gaps <= floor):
            logger.warning("zeros of p_%d closer than the separation tolerance", n)
    return nodes


def bracketed_zeros(rc: RecurrenceCoeffs, n: int, points_per_zero=200):
    """Zeros of p_n by sign changes and Brent's method"""
    b = np.array(rc.b[:n])
    a = np.concatenate([[0.0], rc.a[:n - 1], [0.0]])
    lo = float(np.min(b - a[:-1] - a[1:])) - 1e-9
    hi = float(np.max(b + a[:-1] + a[1:])) + 1e-9
    grid = np.linspace(lo, hi, points_per_zero * n + 1)
    values = eval_orthonormal(rc, grid, n)[n]

    def p_n(x):
        return float(eval_orthonormal(rc, x, n)[n])

    found = []
    for i in range(len(grid) - 1):
        if values[i] == 0.0:
            found.append(grid[i])
        elif values[i] * values[i + 1] < 0:
            found.append(brentq(p_n, grid[i], grid[i + 1], xtol=1e-15,
                                rtol=4 * np.finfo(float).eps))
    if len(found) != n:
        raise ConvergenceError(f"bracketing found {len(found)} zeros of p_{n}")
    return np.array(found)


@dataclass(frozen=True)
class HankelFactor:
    lower: tuple
    pivots: tuple
    failed_level: Optional[int] = None
    note: str = ""

    @property
    def positive_definite(self):
        return self.failed_level is None


def hankel_ldl(values, size, tol=None, precision=None):
    """Unit-lower LDL^T of [mu_{i+j}], stopping at the first bad pivot.

    Levels count from 1 (the 1 x 1 leading block).
    """
    tol = Config.HANKEL_PIVOT_TOL if tol is None else tol
    precision = precision or Config.DEFAULT_PRECISION
    if precision not in Config.PRECISIONS:
        raise ParameterError(f"unknown precision {precision!r}")
    if size < 1 or len(values) < 2 * size - 1:
        raise ParameterError(f"{len(values)} moments cannot fill a {size} x {size} Hankel matrix")
    if precision == "extended":
        with mpmath.workdps(Config.EXTENDED_DIGITS):
            return _ldl(list(map(mpmath.mpf, values)), size, tol, mpmath.fsum)
    return _ldl([float(v) for v in values], size, tol, math.fsum)


def _ldl(values, size, tol, fsum):
    lower = [[0] * size for _ in range(size)]
    pivots = []
    scale = 0
    for i in range(size):
        scale = max(scale, max(abs(v) for v in values[:2 * i + 1]))
        lower[i][i] = 1
        for j in range(i):
            lower[i][j] = (values[i + j] - fsum(lower[i][k] * lower[j][k] * pivots[k]
                                                for k in range(j))) / pivots[j]
        pivot = values[2 * i] - fsum(lower[i][k] ** 2 * pivots[k] for k in range(i))
        pivots.append(pivot)
        if abs(pivot) <= tol * scale:
            note = "ill-conditioned"
        elif pivot < 0:
            note = "negative pivot"
        else:
            continue
        logger.debug("Hankel pivot %d = %s (%s)", i + 1, pivot, note)
        return HankelFactor(tuple(map(tuple, lower)), tuple(float(p) for p in pivots), i + 1, note)
    return HankelFactor(tuple(map(tuple, lower)), tuple(float(p) for p in pivots))


def moments_to_coeffs(m, precision=None) -> RecurrenceCoeffs:
    """Recurrence coefficients from mu_0..mu_{2N} through the Hankel factorization"""
    values = list(getattr(m, "values", m))
    levels = (len(values) - 1) // 2
    if levels < 1:
        raise ParameterError("need at least mu_0, mu_1, mu_2")
    factor = hankel_ldl(values, levels + 1, precision=precision)
    if not factor.positive_definite:
        raise FactorizationError(factor.failed_level, factor.pivots, factor.note)
    lower, pivots = factor.lower, factor.pivots
    b = [float(lower[j + 1][j] - (lower[j][j - 1] if j > 0 else 0)) for j in range(levels)]
    a = [math.sqrt(pivots[j + 1] / pivots[j]) for j in range(levels)]
    logger.debug("moments_to_coeffs: smallest pivot %.3e", min(pivots))
    return RecurrenceCoeffs(a, b, float(values[0]))


def recurrence_moments(rc: RecurrenceCoeffs, kmax: int):
    """mu_0..mu_kmax implied by the recurrence, mass * (J^k)_{00}"""
    size = kmax // 2 + 1
    if size > rc.levels:
        raise ParameterError(f"moments up to {kmax} need {size} levels, have {rc.levels}")
    matrix = jacobi_matrix(rc, size)
    vector = np.zeros(size)
    vector[0] = 1.0
    result = []
    for _ in range(kmax + 1):
        result.append(rc.mass * vector[0])
        vector = matrix @ vector
    return np.array(result)


def sw_polynomial(q: float, n: int, x: float) -> float:
    """Explicit Stieltjes-Wigert polynomial, orthogonal for exp(-k^2 log^2 x), q = exp(-1/(2k^2))"""
    check_nome(q)
    terms = [
        q_pochhammer(q ** -n, q, j) / q_pochhammer(q, q, j) * q ** (j * j / 2.0) * (q ** (n + 1) * x) ** j
        for j in range(n + 1)
    ]
    return math.fsum(terms)
