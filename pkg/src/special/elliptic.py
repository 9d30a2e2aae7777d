"""Jacobian elliptic functions, complete integrals, the Laplace transforms

    F_1 = L[cn],  F_2 = L[dn],  F_3 = L[sn],  F_4 = z L[sn^2]

and the continued fractions built from the Carlitz recurrences

    C_{n+1} = x C_n - alpha_n C_{n-1},  D_{n+1} = x D_n - beta_n D_{n-1}.

The Carlitz fractions are evaluated on the imaginary axis: with G the
J-fraction, i G(iz) = integral z/(z^2 + t^2) dmu(t) for the symmetric
measure mu, which is what a cosine series transforms into.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from src.config import Config
from src.special.contfrac import JFraction, j_convergent
from src.special.errors import ConvergenceError, CrossCheckError, ParameterError, PoleError
from src.special.orthopoly import MeasureDescriptor, carlitz_numerators

logger = logging.getLogger(__name__)

CARLITZ_FAMILIES = ("C_alpha", "D_beta")

# derived by match_carlitz_pairing and frozen; check_carlitz_pairing re-derives it
CARLITZ_PAIRING = {"C_alpha": 1, "D_beta": 2}

PANEL_ORDER = 20


def _check_modulus(k):
    if not 0.0 < k < 1.0:
        raise ParameterError(f"modulus must lie in (0, 1), got {k}")


def agm(a: float, b: float, tol=None):
    """Arithmetic-geometric mean and the sequence c_1, c_2, ... of half differences"""
    tol = Config.AGM_TOL if tol is None else tol
    halves = []
    for _ in range(64):
        if abs(a - b) <= tol * a:
            break
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        halves.append(c)
    return 0.5 * (a + b), halves


def _k_of(k):
    return math.pi / (2.0 * agm(1.0, math.sqrt(1.0 - k * k))[0])


def complete_k(k: float):
    """(K, K') with K' = K(sqrt(1 - k^2))"""
    _check_modulus(k)
    return _k_of(k), math.pi / (2.0 * agm(1.0, k)[0])


def printed_k_prime(k: float) -> float:
    """K evaluated at 1 - k^2, the alternative complementary convention"""
    _check_modulus(k)
    return _k_of(1.0 - k * k)


def complete_e(k: float) -> float:
    """E = K (1 - sum_{n>=0} 2^{n-1} c_n^2), c_0 = k"""
    _check_modulus(k)
    mean, halves = agm(1.0, math.sqrt(1.0 - k * k))
    total = 0.5 * k * k + math.fsum(2.0 ** (n - 1) * c * c for n, c in enumerate(halves, start=1))
    return math.pi / (2.0 * mean) * (1.0 - total)


@dataclass(frozen=True)
class EllipticContext:
    k: float
    K: float
    K_prime: float
    q_nome: float

    def __post_init__(self):
        _check_modulus(self.k)
        if not (self.K > 0 and self.K_prime > 0 and 0 < self.q_nome < 1):
            raise ParameterError("inconsistent elliptic context")

    @classmethod
    def from_modulus(cls, k: float, convention="standard"):
        big_k, k_prime = complete_k(k)
        if convention == "printed":
            k_prime = printed_k_prime(k)
        elif convention != "standard":
            raise ParameterError(f"unknown K' convention {convention!r}")
        return cls(k, big_k, k_prime, math.exp(-math.pi * k_prime / big_k))

    @property
    def complementary(self):
        return math.sqrt(1.0 - self.k * self.k)

    def term_count(self):
        """Fourier terms needed for the nome powers to fall below the tail tolerance"""
        return max(2, math.ceil(math.log(Config.SERIES_TAIL_TOL) / math.log(self.q_nome)) + 2)


def _landen(u, k):
    u = np.asarray(u, dtype=float)
    a, b, c = [1.0], [math.sqrt(1.0 - k * k)], [k]
    while abs(c[-1]) > Config.AGM_TOL:
        a.append(0.5 * (a[-1] + b[-1]))
        c.append(0.5 * (a[-2] - b[-1]))
        b.append(math.sqrt(a[-2] * b[-1]))
    n = len(a) - 1
    phi = 2.0 ** n * a[n] * u
    for m in range(n, 0, -1):
        phi = 0.5 * (phi + np.arcsin(c[m] / a[m] * np.sin(phi)))
    sn, cn = np.sin(phi), np.cos(phi)
    return sn, cn, np.sqrt(1.0 - k * k * sn * sn)


def _scalar(values, u):
    if np.ndim(u) == 0:
        return tuple(float(v) for v in values)
    return values


def fourier_sn_cn_dn(u, ctx: EllipticContext):
    """sn, cn, dn from their nome expansions"""
    u = np.asarray(u, dtype=float)
    k, big_k, q = ctx.k, ctx.K, ctx.q_nome
    sn = np.zeros_like(u)
    cn = np.zeros_like(u)
    dn = np.full_like(u, math.pi / (2 * big_k))
    for n in range(1, ctx.term_count() + 1):
        odd = q ** (n - 0.5)
        angle = (2 * n - 1) * math.pi * u / (2 * big_k)
        sn += odd / (1 - q ** (2 * n - 1)) * np.sin(angle)
        cn += odd / (1 + q ** (2 * n - 1)) * np.cos(angle)
        dn += 2 * math.pi / big_k * q ** n / (1 + q ** (2 * n)) * np.cos(n * math.pi * u / big_k)
    scale = 2 * math.pi / (k * big_k)
    return _scalar((scale * sn, scale * cn, dn), u)


def jacobi_elliptic(u, ctx: EllipticContext, cross_check=False):
    """(sn, cn, dn) by descending Landen transformation"""
    values = _landen(u, ctx.k)
    if cross_check:
        inside = np.abs(np.asarray(u, dtype=float)) <= 4 * ctx.K
        series = fourier_sn_cn_dn(np.asarray(u, dtype=float)[inside], ctx)
        for name, exact, other in zip(("sn", "cn", "dn"), values, series):
            gap = float(np.max(np.abs(np.asarray(exact)[inside] - other), initial=0.0))
            if gap > Config.FOURIER_CROSSCHECK_TOL:
                raise CrossCheckError(f"{name} Landen vs Fourier", gap, Config.FOURIER_CROSSCHECK_TOL)
    return _scalar(values, u)


def k_prime_convention(k: float, samples=41):
    """Which K' makes the Fourier series reproduce the Landen values on [0, 4K]"""
    errors = {}
    for convention in ("standard", "printed"):
        ctx = EllipticContext.from_modulus(k, convention)
        grid = np.linspace(0.0, 4 * ctx.K, samples)
        exact = _landen(grid, k)
        series = fourier_sn_cn_dn(grid, ctx)
        errors[convention] = max(float(np.max(np.abs(e - s))) for e, s in zip(exact, series))
    chosen = min(errors, key=errors.get)
    logger.info("K' convention for k=%g: %s (errors %s)", k, chosen, errors)
    return chosen, errors


def _check_index(i):
    if i not in (1, 2, 3, 4):
        raise ParameterError(f"transform index must be 1..4, got {i}")


def laplace_f_series(i: int, z: float, ctx: EllipticContext) -> float:
    """Termwise transform of the Fourier series"""
    _check_index(i)
    if z <= 0:
        raise ParameterError(f"z must be positive, got {z}")
    k, big_k, q = ctx.k, ctx.K, ctx.q_nome
    zz = z * z
    terms = []
    if i == 2:
        terms.append(math.pi / (2 * big_k) / z)
    elif i == 4:
        terms.append((1 - complete_e(k) / big_k) / (k * k))
    for n in range(1, ctx.term_count() + 1):
        odd_freq = (2 * n - 1) * math.pi / (2 * big_k)
        freq = n * math.pi / big_k
        if i == 1:
            terms.append(2 * math.pi / (k * big_k) * q ** (n - 0.5) / (1 + q ** (2 * n - 1))
                         * z / (zz + odd_freq ** 2))
        elif i == 3:
            terms.append(2 * math.pi / (k * big_k) * q ** (n - 0.5) / (1 - q ** (2 * n - 1))
                         * odd_freq / (zz + odd_freq ** 2))
        elif i == 2:
            terms.append(2 * math.pi / big_k * q ** n / (1 + q ** (2 * n)) * z / (zz + freq ** 2))
        else:
            terms.append(-2 * math.pi ** 2 / (k * big_k) ** 2 * n * q ** n / (1 - q ** (2 * n))
                         * zz / (zz + freq ** 2))
    return math.fsum(terms)


def laplace_f_quadrature(i: int, z: float, ctx: EllipticContext) -> float:
    """Damped Gauss-Legendre quadrature on [0, T], T = max(40/z, 8K)"""
    from src.special.quadrature import legendre_rule

    _check_index(i)
    if z <= 0:
        raise ParameterError(f"z must be positive, got {z}")
    horizon = max(40.0 / z, 8.0 * ctx.K)
    panels = math.ceil(horizon / (ctx.K / 4))
    rule = legendre_rule(PANEL_ORDER)
    edges = np.linspace(0.0, horizon, panels + 1)
    half = 0.5 * np.diff(edges)
    nodes = ((edges[:-1] + half)[:, None] + half[:, None] * rule.nodes[None, :]).ravel()
    weights = (half[:, None] * rule.weights[None, :]).ravel()
    sn, cn, dn = _landen(nodes, ctx.k)
    integrand = {1: cn, 2: dn, 3: sn, 4: z * sn * sn}[i]
    return math.fsum(weights * integrand * np.exp(-z * nodes))


def laplace_f(i: int, z: float, ctx: EllipticContext, cross_check=False) -> float:
    value = laplace_f_series(i, z, ctx)
    if cross_check:
        other = laplace_f_quadrature(i, z, ctx)
        gap = abs(value - other) / max(abs(value), 1e-300)
        if gap > Config.LAPLACE_CROSSCHECK_TOL:
            raise CrossCheckError(f"F_{i} series vs quadrature", gap, Config.LAPLACE_CROSSCHECK_TOL)
    return value


def elliptic_jfraction(i: int, ctx: EllipticContext, depth: int) -> JFraction:
    """J-fraction in s = z^2 for F_3 (i=3) or F_4 (i=4)"""
    if i not in (3, 4):
        raise ParameterError(f"J-fractions exist for F_3 and F_4, got F_{i}")
    if depth < 1:
        raise ParameterError(f"depth must be at least 1, got {depth}")
    k2 = ctx.k * ctx.k
    shift = 1 if i == 3 else 2
    b = [-(2 * n + shift) ** 2 * (1 + k2) for n in range(depth)]
    if i == 3:
        a_sq = [1.0] + [(2 * n - 1) * (2 * n) ** 2 * (2 * n + 1) * k2 for n in range(1, depth)]
    else:
        a_sq = [2.0] + [(2 * n) * (2 * n + 1) ** 2 * (2 * n + 2) * k2 for n in range(1, depth)]
    return JFraction(tuple(a_sq), tuple(b), stieltjes_mode=True)


def elliptic_jfraction_value(i: int, ctx: EllipticContext, z: float, n: int) -> float:
    return j_convergent(elliptic_jfraction(i, ctx, n), z * z, n)


def carlitz_jfraction(which: str, ctx: EllipticContext, n: int) -> JFraction:
    """Zero diagonal, partial numerators alpha_n (C) or beta_n (D)"""
    if which not in CARLITZ_FAMILIES:
        raise ParameterError(f"unknown Carlitz family {which!r}")
    if n < 1:
        raise ParameterError(f"n must be at least 1, got {n}")
    return JFraction((1.0,) + tuple(carlitz_numerators(which, ctx.k, n - 1)), (0.0,) * n)


def carlitz_cf_approximant(which: str, ctx: EllipticContext, z: float, n: int,
                           convention="imaginary") -> float:
    """n-th convergent; 'imaginary' returns Re i G(iz), 'real' returns G(z)"""
    fraction = carlitz_jfraction(which, ctx, n)
    if convention == "imaginary":
        return float((1j * j_convergent(fraction, 1j * z, n)).real)
    if convention == "real":
        return float(j_convergent(fraction, z, n))
    raise ParameterError(f"unknown evaluation convention {convention!r}")


def carlitz_cf_converged(which: str, ctx: EllipticContext, z: float, n: int = 30,
                         max_depth: int = 480, tol=None):
    """Double the depth until consecutive convergents agree to tol; returns
    (value, depth, gap)"""
    tol = Config.CARLITZ_MATCH_TOL if tol is None else tol
    value = carlitz_cf_approximant(which, ctx, z, n)
    gap = math.inf
    while 2 * n <= max_depth:
        n *= 2
        value, previous = carlitz_cf_approximant(which, ctx, z, n), value
        gap = abs(value - previous)
        if gap <= tol * abs(value):
            return value, n, gap
    raise ConvergenceError(f"{which} fraction at z={z} not settled by depth {n}", n, gap)


@dataclass(frozen=True)
class CarlitzMatch:
    which: str
    transform: str
    convention: str
    discrepancy: float


def _candidates(ctx):
    return {
        "F_1": lambda z: laplace_f(1, z, ctx),
        "F_2": lambda z: laplace_f(2, z, ctx),
        "F_3": lambda z: laplace_f(3, z, ctx),
        "F_4/z": lambda z: laplace_f(4, z, ctx) / z,
    }


def match_carlitz_pairing(ctx: EllipticContext, points=(1.0, 2.0, 4.0), n=30):
    """Best-matching transform for each Carlitz family"""
    matches = {}
    for which in CARLITZ_FAMILIES:
        best = None
        for convention in ("imaginary", "real"):
            for name, transform in _candidates(ctx).items():
                try:
                    gap = max(abs(carlitz_cf_approximant(which, ctx, z, n, convention) - transform(z))
                              / abs(transform(z)) for z in points)
                except PoleError:
                    gap = math.inf
                if best is None or gap < best.discrepancy:
                    best = CarlitzMatch(which, name, convention, gap)
        logger.debug("carlitz %s matches %s (%s axis), discrepancy %.3e",
                     which, best.transform, best.convention, best.discrepancy)
        matches[which] = best
    return matches


def check_carlitz_pairing(ctx: EllipticContext, points=(1.0, 2.0, 4.0), n=30):
    """Re-derive the pairing and compare it with CARLITZ_PAIRING"""
    matches = match_carlitz_pairing(ctx, points, n)
    for which, index in CARLITZ_PAIRING.items():
        found = matches[which]
        if found.transform != f"F_{index}" or found.convention != "imaginary":
            raise CrossCheckError(f"carlitz pairing for {which}: found {found.transform}",
                                  found.discrepancy)
    return matches


def carlitz_measure(which: str, ctx: EllipticContext) -> MeasureDescriptor:
    """Symmetric discrete measure of the Carlitz family: the cosine spectrum
    of cn (C) or dn (D), each coefficient split between +-frequency"""
    if which not in CARLITZ_FAMILIES:
        raise ParameterError(f"unknown Carlitz family {which!r}")
    k, big_k, q = ctx.k, ctx.K, ctx.q_nome
    atoms = []
    if which == "D_beta":
        atoms.append((0.0, math.pi / (2 * big_k)))
    m = 1
    while True:
        if which == "C_alpha":
            freq = (2 * m - 1) * math.pi / (2 * big_k)
            mass = math.pi / (k * big_k) * q ** (m - 0.5) / (1 + q ** (2 * m - 1))
        else:
            freq = m * math.pi / big_k
            mass = math.pi / big_k * q ** m / (1 + q ** (2 * m))
        if mass < 1e-17:
            break
        atoms.extend([(-freq, mass), (freq, mass)])
        m += 1
    atoms.sort()

    def moment(j):
        return math.fsum(w * x ** j for x, w in atoms)

    return MeasureDescriptor((-math.inf, math.inf), atoms=tuple(atoms), moment_oracle=moment,
                             name=which)
