"""Electrostatic equilibria of unit charges in logarithmic interaction.

Energy of free charges x_1..x_n against fixed charges q_f at a_f:

    E(x) = -sum_{i<j} log|x_i - x_j| - sum_i sum_f q_f log|x_i - a_f|

Centroid and inertia constraints are enforced as equalities with a
Lagrange multiplier; the minimisers sit on the constraint boundary.
grad_norm is the infinity norm of the Lagrangian gradient divided by the
largest single force term, so it is scale free.
"""
import itertools
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
from numpy.polynomial import Polynomial
from scipy import special
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from src.config import Config
from src.special.errors import (
    ConvergenceError, InfeasibleError, ParameterError,
)

logger = logging.getLogger(__name__)


class ConstraintKind(str, Enum):
    NONE = "none"
    CENTROID = "centroid_max"
    INERTIA = "inertia_max"


@dataclass(frozen=True)
class Constraint:
    kind: ConstraintKind = ConstraintKind.NONE
    bound: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ConstraintKind(self.kind))
        if self.kind is not ConstraintKind.NONE and not (self.bound and self.bound > 0):
            raise ParameterError(f"{self.kind.value} needs a positive bound, got {self.bound}")

    @classmethod
    def parse(cls, text):
        """'centroid:K' or 'inertia:L'"""
        if not text:
            return cls()
        name, _, value = text.partition(":")
        kinds = {"centroid": ConstraintKind.CENTROID, "inertia": ConstraintKind.INERTIA}
        if name not in kinds or not value:
            raise ParameterError(f"constraint must be centroid:K or inertia:L, got {text!r}")
        return cls(kinds[name], float(value))

    @property
    def active(self):
        return self.kind is not ConstraintKind.NONE

    def value(self, x):
        if self.kind is ConstraintKind.CENTROID:
            return float(np.mean(x))
        return float(np.mean(x ** 2))

    def gradient(self, x):
        if self.kind is ConstraintKind.CENTROID:
            return np.full(len(x), 1.0 / len(x))
        return 2.0 * x / len(x)

    def hessian(self, x):
        if self.kind is ConstraintKind.CENTROID:
            return np.zeros((len(x), len(x)))
        return 2.0 * np.eye(len(x)) / len(x)


@dataclass(frozen=True)
class ChargeSystem:
    n: int
    fixed: tuple = ()
    constraint: Constraint = field(default_factory=Constraint)
    domain: tuple = (-1.0, 1.0)
    cells: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "fixed", tuple((float(a), float(r)) for a, r in self.fixed))
        if self.n < 1:
            raise ParameterError(f"need at least one free charge, got {self.n}")
        positions = [a for a, _ in self.fixed]
        if len(set(positions)) != len(positions):
            raise ParameterError("fixed charges must sit at distinct positions")
        if any(r <= 0 for _, r in self.fixed):
            raise ParameterError("fixed charges must be positive")
        lo, hi = self.domain
        if not lo < hi:
            raise ParameterError(f"empty domain {self.domain}")
        if (math.isinf(lo) or math.isinf(hi)) and not self.constraint.active:
            raise ParameterError("an unbounded domain needs a centroid or inertia constraint")
        if self.cells is not None and len(self.cells) != self.n:
            raise ParameterError("one cell per free charge is required")

    @classmethod
    def jacobi(cls, n, p, q):
        """Charge p at +1 and q at -1; equilibrium at the zeros of P_n^{(2p-1, 2q-1)}"""
        return cls(n, ((-1.0, q), (1.0, p)))

    @classmethod
    def laguerre(cls, n, p, centroid):
        return cls(n, ((0.0, p),), Constraint(ConstraintKind.CENTROID, centroid), (0.0, math.inf))

    @classmethod
    def hermite(cls, n, inertia):
        if n < 2:
            raise ParameterError("the inertia problem needs at least two charges")
        return cls(n, (), Constraint(ConstraintKind.INERTIA, inertia), (-math.inf, math.inf))

    @classmethod
    def heine_stieltjes(cls, charges, composition):
        """n_j free charges confined to (a_{j-1}, a_j) between fixed charges"""
        charges = tuple((float(a), float(r)) for a, r in charges)
        if len(charges) < 2:
            raise ParameterError("need at least two fixed charges")
        if any(b[0] <= a[0] for a, b in zip(charges, charges[1:])):
            raise ParameterError("fixed charge positions must increase")
        if len(composition) != len(charges) - 1 or any(c < 0 for c in composition):
            raise ParameterError(f"composition {composition} does not fit {len(charges) - 1} intervals")
        cells = []
        for (left, _), (right, _), count in zip(charges, charges[1:], composition):
            cells.extend([(left, right)] * count)
        return cls(sum(composition), charges, Constraint(),
                   (charges[0][0], charges[-1][0]), tuple(cells))


@dataclass(frozen=True)
class EquilibriumResult:
    positions: tuple
    energy: float
    grad_norm: float
    multiplier: Optional[float]
    iterations: int

    @property
    def boundary_active(self):
        return self.multiplier is not None and self.multiplier > 0


def _pair_gaps(x):
    gaps = x[:, None] - x[None, :]
    np.fill_diagonal(gaps, np.inf)
    return gaps


def energy(x, s: ChargeSystem) -> float:
    """Logarithmic energy; +inf when two charges coincide"""
    x = np.sort(np.asarray(x, dtype=float))
    if np.any(np.diff(x) == 0):
        logger.debug("coincident free charges")
        return math.inf
    terms = [-math.log(x[j] - x[i]) for i in range(len(x)) for j in range(i + 1, len(x))]
    for a, r in s.fixed:
        distance = np.abs(x - a)
        if np.any(distance == 0):
            logger.debug("free charge on the fixed charge at %g", a)
            return math.inf
        terms.extend(-r * np.log(distance))
    return math.fsum(terms)


def gradient(x, s: ChargeSystem):
    """Partial derivatives of the energy, constraint excluded"""
    x = np.asarray(x, dtype=float)
    grad = -np.sum(1.0 / _pair_gaps(x), axis=1)
    for a, r in s.fixed:
        grad -= r / (x - a)
    return grad


def _force_scale(x, s):
    scale = np.sum(np.abs(1.0 / _pair_gaps(x)), axis=1)
    for a, r in s.fixed:
        scale += np.abs(r / (x - a))
    return max(1.0, float(np.max(scale)))


def hessian(x, s: ChargeSystem):
    x = np.asarray(x, dtype=float)
    inverse_sq = 1.0 / _pair_gaps(x) ** 2
    matrix = -inverse_sq
    diagonal = np.sum(inverse_sq, axis=1)
    for a, r in s.fixed:
        diagonal += r / (x - a) ** 2
    np.fill_diagonal(matrix, diagonal)
    return matrix


def stationarity_residual(x, s: ChargeSystem) -> float:
    return float(np.max(np.abs(gradient(x, s))))


def _chebyshev_points(n, lo, hi):
    t = np.sort(np.cos((2 * np.arange(1, n + 1) - 1) * math.pi / (2 * n)))
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * t


def default_init(s: ChargeSystem):
    """Chebyshev points scaled into the domain (and onto the constraint)"""
    if s.cells is not None:
        x = np.empty(s.n)
        start = 0
        for cell, group in itertools.groupby(s.cells):
            count = len(list(group))
            x[start:start + count] = _chebyshev_points(count, *cell)
            start += count
        return x
    t = _chebyshev_points(s.n, -1.0, 1.0)
    if s.constraint.kind is ConstraintKind.CENTROID:
        return s.domain[0] + s.constraint.bound * (1.0 + t)
    if s.constraint.kind is ConstraintKind.INERTIA:
        return math.sqrt(2.0 * s.constraint.bound) * t
    return _chebyshev_points(s.n, *s.domain)


def _admissible(x, s):
    if np.any(np.diff(x) <= 0):
        return False
    lo, hi = s.domain
    if x[0] <= lo or x[-1] >= hi:
        return False
    if s.cells is not None:
        bounds = np.array(s.cells)
        if np.any(x <= bounds[:, 0]) or np.any(x >= bounds[:, 1]):
            return False
    return math.isfinite(energy(x, s))


def equilibrium(s: ChargeSystem, init=None, tol=None, max_iter=None) -> EquilibriumResult:
    """Damped Newton on the (constrained) energy, ordering preserved"""
    tol = Config.EQUILIBRIUM_TOL if tol is None else tol
    max_iter = max_iter or Config.EQUILIBRIUM_MAX_ITER
    x = np.array(default_init(s) if init is None else init, dtype=float)
    if x.shape != (s.n,):
        raise ParameterError(f"init must hold {s.n} positions")
    if not _admissible(x, s):
        raise InfeasibleError("init must be strictly increasing inside the domain")
    constraint = s.constraint
    if constraint.active and constraint.value(x) > constraint.bound * (1.0 + 1e-12):
        raise InfeasibleError(f"init violates {constraint.kind.value} <= {constraint.bound}")

    multiplier = 0.0
    if constraint.active:
        dg = constraint.gradient(x)
        multiplier = -float(gradient(x, s) @ dg) / float(dg @ dg)

    def residual(x, multiplier):
        grad = gradient(x, s)
        if not constraint.active:
            return grad, np.empty(0)
        return grad + multiplier * constraint.gradient(x), np.array([constraint.value(x) - constraint.bound])

    iterations = 0
    grad, gap = residual(x, multiplier)
    while True:
        norm = float(np.max(np.abs(grad))) / _force_scale(x, s)
        if norm <= tol and np.all(np.abs(gap) <= tol * constraint.bound if constraint.active else True):
            break
        if iterations >= max_iter:
            raise ConvergenceError(f"equilibrium did not converge in {max_iter} iterations",
                                   iterations, norm)
        iterations += 1
        matrix = hessian(x, s)
        if constraint.active:
            dg = constraint.gradient(x)
            size = s.n + 1
            kkt = np.zeros((size, size))
            kkt[:s.n, :s.n] = matrix + multiplier * constraint.hessian(x)
            kkt[:s.n, s.n] = dg
            kkt[s.n, :s.n] = dg
            step = np.linalg.solve(kkt, -np.concatenate([grad, gap]))
            dx, dmult = step[:s.n], step[s.n]
        else:
            dx, dmult = np.linalg.solve(matrix, -grad), 0.0

        merit = math.hypot(float(np.linalg.norm(grad)), float(np.linalg.norm(gap)))
        current = energy(x, s)
        t = 1.0
        while t > 1e-14:
            trial = x + t * dx
            if _admissible(trial, s):
                trial_mult = multiplier + t * dmult
                trial_grad, trial_gap = residual(trial, trial_mult)
                trial_merit = math.hypot(float(np.linalg.norm(trial_grad)), float(np.linalg.norm(trial_gap)))
                if trial_merit < merit or (not constraint.active and energy(trial, s) < current):
                    x, multiplier, grad, gap = trial, trial_mult, trial_grad, trial_gap
                    break
            t *= 0.5
        else:
            if norm <= 1e3 * tol:
                logger.debug("equilibrium stalled at grad_norm %.3e", norm)
                break
            raise ConvergenceError("line search failed", iterations, norm)

    if constraint.active and multiplier <= 0:
        logger.warning("multiplier %.3e does not confirm an active %s constraint",
                       multiplier, constraint.kind.value)
    logger.debug("equilibrium converged in %d iterations", iterations)
    return EquilibriumResult(tuple(x), energy(x, s), norm,
                             multiplier if constraint.active else None, iterations)


def composition_count(n: int, p: int) -> int:
    """Number of ways to place n charges in p intervals"""
    return math.comb(n + p - 1, n)


def enumerate_compositions(n: int, p: int):
    for bars in itertools.combinations(range(n + p - 1), p - 1):
        edges = (-1,) + bars + (n + p - 1,)
        yield tuple(edges[i + 1] - edges[i] - 1 for i in range(p))


def heine_stieltjes_equilibria(charges, composition, tol=None) -> EquilibriumResult:
    return equilibrium(ChargeSystem.heine_stieltjes(charges, composition), tol=tol)


def van_vleck_polynomial(result: EquilibriumResult, charges):
    """C with A y'' + 2B y' + C y = 0 for y = prod (x - x_k); returns (C, residual)"""
    positions = [a for a, _ in charges]
    a_poly = Polynomial.fromroots(positions)
    b_poly = sum((r * Polynomial.fromroots([p for p in positions if p != a]) for a, r in charges),
                 Polynomial([0.0]))
    y = Polynomial.fromroots(result.positions)
    numerator = a_poly * y.deriv(2) + 2 * b_poly * y.deriv()
    quotient, remainder = divmod(numerator, y)
    residual = float(np.max(np.abs(remainder.coef)) / np.max(np.abs(numerator.coef)))
    return -quotient, residual


def _ks_distance(zs, cdf):
    zs = np.sort(np.asarray(zs, dtype=float))
    n = len(zs)
    values = np.array([cdf(z) for z in zs])
    steps = np.arange(1, n + 1) / n
    return float(max(np.max(np.abs(steps - values)), np.max(np.abs(steps - 1.0 / n - values))))


def arcsine_distance(zs) -> float:
    """Kolmogorov distance between the zero counting measure and the arcsine law"""
    zs = np.asarray(zs, dtype=float)
    if np.any(np.abs(zs) > 1):
        raise ParameterError("zeros must lie in [-1, 1]")
    return _ks_distance(zs, lambda x: 0.5 + math.asin(x) / math.pi)


def semicircle_cdf(t):
    t = min(1.0, max(-1.0, t))
    return 0.5 + (t * math.sqrt(1.0 - t * t) + math.asin(t)) / math.pi


def semicircle_distance(zs) -> float:
    return _ks_distance(zs, semicircle_cdf)


def freud_constant(alpha: float) -> float:
    """c(alpha) = (sqrt(pi) Gamma((alpha+1)/2) / Gamma(alpha/2))^(1/alpha)"""
    if alpha <= 0:
        raise ParameterError(f"alpha must be positive, got {alpha}")
    return math.exp((0.5 * math.log(math.pi) + special.gammaln((alpha + 1) / 2)
                     - special.gammaln(alpha / 2)) / alpha)


def freud_scale(alpha: float, n: int) -> float:
    return freud_constant(alpha) * n ** (1.0 / alpha)


def nevai_ullman_density(alpha: float, t: float) -> float:
    """(alpha/pi) integral_{|t|}^1 y^{alpha-1}/sqrt(y^2 - t^2) dy"""
    if alpha <= 0:
        raise ParameterError(f"alpha must be positive, got {alpha}")
    if abs(t) > 1:
        raise ParameterError(f"|t| must not exceed 1, got {t}")
    if abs(t) == 1:
        return 0.0
    if t == 0:
        return alpha / (math.pi * (alpha - 1)) if alpha > 1 else math.inf
    # y^2 = t^2 + s^2 removes the inverse square root
    exponent = (alpha - 2) / 2.0
    value, _ = quad(lambda s: (t * t + s * s) ** exponent, 0.0, math.sqrt(1.0 - t * t),
                    epsabs=1e-14, epsrel=1e-12)
    return alpha / math.pi * value


def discriminant(x) -> float:
    x = np.asarray(x, dtype=float)
    return math.prod(abs(x[j] - x[i]) for i in range(len(x)) for j in range(i + 1, len(x)))


def _log_discriminant(x):
    return math.fsum(math.log(abs(x[j] - x[i])) for i in range(len(x)) for j in range(i + 1, len(x)))


def _normalised_diameter(points):
    pairs = math.comb(len(points), 2)
    return math.exp(_log_discriminant(points) / pairs)


def fekete(n: int, method="equilibrium", sweeps=400):
    """Points of [-1, 1] maximising the discriminant, and d_n = max D^{1/C(n,2)}"""
    if n < 2:
        raise ParameterError(f"n must be at least 2, got {n}")
    if method == "equilibrium":
        # interior Fekete points are the zeros of P'_{n-1}, unit charges at +-1
        interior = () if n == 2 else equilibrium(ChargeSystem.jacobi(n - 2, 1.0, 1.0)).positions
        points = np.array((-1.0,) + tuple(interior) + (1.0,))
        return points, _normalised_diameter(points)
    if method != "search":
        raise ParameterError(f"unknown fekete method {method!r}")
    if n > 6:
        logger.warning("coordinate search is meant for n <= 6, got %d", n)
    points = np.linspace(-1.0, 1.0, n)
    for sweep in range(sweeps):
        previous = points.copy()
        for i in range(n):
            left = points[i - 1] if i > 0 else -1.0
            right = points[i + 1] if i + 1 < n else 1.0
            others = np.delete(points, i)

            def negative(value):
                gaps = np.abs(others - value)
                return math.inf if np.any(gaps == 0) else -float(np.sum(np.log(gaps)))

            found = minimize_scalar(negative, bounds=(left, right), method="bounded",
                                    options={"xatol": 1e-12})
            if not found.success:
                raise ConvergenceError(f"golden-section search failed at point {i}")
            points[i] = found.x
        if np.max(np.abs(points - previous)) < 1e-11:
            logger.debug("fekete search converged after %d sweeps", sweep + 1)
            break
    return points, _normalised_diameter(points)


def selberg(n: int, x: float, y: float, z: float) -> float:
    """Closed form of the Selberg integral through log-Gamma"""
    if n < 1:
        raise ParameterError(f"n must be at least 1, got {n}")
    if x <= 0 or y <= 0 or z < 0:
        raise ParameterError("need x, y > 0 and z >= 0")
    total = 0.0
    for j in range(1, n + 1):
        total += (special.gammaln(x + (j - 1) * z) + special.gammaln(y + (j - 1) * z)
                  + special.gammaln(j * z + 1) - special.gammaln(x + y + (n + j - 2) * z)
                  - special.gammaln(z + 1))
    return math.exp(total)


def predicted_positions(n: int, p: float = 1.0, q: float = 1.0, constraint=None):
    """Equilibrium predicted by the classical zeros: Jacobi P^{(2p-1, 2q-1)},
    rescaled Laguerre L^{(2p-1)} or rescaled Hermite H_n"""
    from src.special.orthopoly import Family, FamilyTag, family_coeffs, zeros

    constraint = constraint or Constraint()
    if constraint.kind is ConstraintKind.CENTROID:
        alpha = 2 * p - 1
        roots = zeros(family_coeffs(Family(FamilyTag.LAGUERRE, alpha=alpha), n), n)
        return tuple(roots * constraint.bound / (n + alpha))
    if constraint.kind is ConstraintKind.INERTIA:
        roots = zeros(family_coeffs(Family(FamilyTag.HERMITE), n), n)
        return tuple(roots / math.sqrt((n - 1) / (2.0 * constraint.bound)))
    family = Family(FamilyTag.JACOBI, alpha=2 * p - 1, beta=2 * q - 1)
    return tuple(zeros(family_coeffs(family, n), n))
