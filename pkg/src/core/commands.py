"""Subcommand handlers. Each takes the parsed arguments and returns an
OutputEnvelope; all numerics live in src.special."""
import logging
import math
from pathlib import Path

import numpy as np

from src.config import Config
from src.core.envelope import Check, MomentDocument, OutputEnvelope
from src.special import contfrac, electro, elliptic, legendre, moments, orthopoly, quadrature
from src.special.errors import ParameterError
from src.utils.workers import run_cases

logger = logging.getLogger(__name__)

HIDDEN_ARGS = ("handler", "format", "log_level")


def parse_params(text):
    """'alpha=0.5,beta=1' -> {'alpha': '0.5', 'beta': '1'}"""
    params = {}
    for item in filter(None, (part.strip() for part in (text or "").split(","))):
        key, sep, value = item.partition("=")
        if not sep or not key.strip() or not value.strip():
            raise ParameterError(f"malformed parameter {item!r}, expected name=value")
        params[key.strip()] = value.strip()
    return params


def _family(args, default=None):
    name = getattr(args, "family", None) or default
    if name is None:
        raise ParameterError("--family is required")
    return orthopoly.Family.parse(name, parse_params(getattr(args, "params", None)))


def _family_params(family):
    return {key: getattr(family, key) for key in Config.get_family_defaults(family.tag.value)}


def _tolerance(args, default):
    return default if args.tolerance is None else args.tolerance


def _envelope(command, args, results, checks=()):
    params = {key: value for key, value in vars(args).items()
              if key not in HIDDEN_ARGS and value is not None}
    return OutputEnvelope(command=command, params=params, results=results, checks=list(checks))


def _bracket_checks(prefix, brackets):
    return [Check.boolean(f"{prefix}[{b.index}]", b.passed, slack=b.slack) for b in brackets]


def cmd_gauss(args):
    family = _family(args)
    measure = family.measure()
    rule = quadrature.gauss_rule(orthopoly.family_coeffs(family, args.n), args.n, measure=measure)
    results = {
        "nodes": rule.nodes.tolist(),
        "weights": rule.weights.tolist(),
        "exactness": rule.exactness,
        "measure": {"family": family.tag.value, "params": _family_params(family)},
    }
    checks = [Check.boolean("exactness", rule.exactness >= 2 * args.n - 1,
                            slack=float(rule.exactness - 2 * args.n + 2))]
    return _envelope("gauss", args, results, checks)


def cmd_kronrod(args):
    family = _family(args, default="legendre")
    rc = orthopoly.family_coeffs(family, 2 * args.n + 2)
    rule = quadrature.kronrod_rule(rc, args.n, measure=family.measure())
    results = {
        "nodes": list(rule.nodes),
        "weights": list(rule.weights),
        "gauss_nodes": list(rule.gauss_nodes),
        "added_nodes": list(rule.added_nodes),
        "exactness": rule.exactness,
        "condition": rule.condition,
        "measure": {"family": family.tag.value, "params": _family_params(family)},
    }
    checks = [Check.boolean("exactness", rule.exactness >= 3 * args.n + 1,
                            slack=float(rule.exactness - 3 * args.n))]
    return _envelope("kronrod", args, results, checks)


def cmd_zeros(args):
    family = _family(args)
    rc = orthopoly.family_coeffs(family, args.n)
    found = orthopoly.zeros(rc, args.n)
    bracketed = orthopoly.bracketed_zeros(rc, args.n)
    error = float(np.max(np.abs(np.asarray(found) - np.asarray(bracketed))))
    scale = max(1.0, float(np.max(np.abs(found))))
    checks = [Check.tolerance("bracketed-roots", error, _tolerance(args, 1e-10), scale)]
    return _envelope("zeros", args, {"zeros": list(found)}, checks)


def cmd_moments_check(args):
    document = MomentDocument.model_validate_json(Path(args.file).read_text(encoding="utf-8"))
    kind = moments.MomentKind(args.kind) if args.kind else document.kind
    sequence = moments.MomentSequence(document.moments, kind, document.interval)
    unshifted, shifted = moments.hankel_solvability(sequence)

    def pivot_slack(report):
        return float(min(report.pivots)) if report.pivots else -1.0

    results = {"kind": kind.value, "count": len(sequence), "hankel": unshifted.describe(),
               "pivots": list(unshifted.pivots)}
    checks = [Check.boolean("hankel", unshifted.passed, slack=pivot_slack(unshifted),
                            detail=unshifted.describe())]
    if shifted is not None:
        results["shifted"] = shifted.describe()
        checks.append(Check.boolean("hankel-shifted", shifted.passed, slack=pivot_slack(shifted),
                                    detail=shifted.describe()))
    if kind is moments.MomentKind.HAUSDORFF and sequence.interval == (0.0, 1.0) and len(sequence) > 1:
        report = moments.hausdorff_monotonicity(sequence, len(sequence) - 1)
        checks.append(Check.boolean("complete-monotonicity", report.consistent, slack=report.minimum,
                                    detail=None if report.consistent else f"violation at {report.violation}"))
    if unshifted.passed and len(sequence) >= 3:
        rc = orthopoly.moments_to_coeffs(sequence, precision=args.precision)
        results["recurrence"] = {"a": list(rc.a), "b": list(rc.b), "mass": rc.mass}
    if len(sequence) >= 3 and all(v > 0 for v in sequence.values[2::2]):
        carleman = moments.carleman_diagnostic(sequence, (len(sequence) - 1) // 2)
        results["carleman"] = {"partial_sum": carleman.partial_sums[-1], "trend": carleman.trend.value}
    return _envelope("moments check", args, results, checks)


def cmd_electro(args):
    constraint = electro.Constraint.parse(args.constraint)
    if constraint.kind is electro.ConstraintKind.CENTROID:
        system = electro.ChargeSystem.laguerre(args.n, args.p, constraint.bound)
    elif constraint.kind is electro.ConstraintKind.INERTIA:
        system = electro.ChargeSystem.hermite(args.n, constraint.bound)
    else:
        system = electro.ChargeSystem.jacobi(args.n, args.p, args.q)
    result = electro.equilibrium(system, tol=args.tol)
    predicted = np.array(electro.predicted_positions(args.n, args.p, args.q, constraint))
    error = float(np.max(np.abs(np.array(result.positions) - predicted)))
    scale = max(1.0, float(np.max(np.abs(predicted))))
    checks = [Check.tolerance("classical-zeros", error, _tolerance(args, Config.POSITION_TOL), scale)]
    if constraint.active:
        checks.append(Check.boolean("boundary-active", result.boundary_active,
                                    slack=result.multiplier))
    results = {
        "positions": list(result.positions),
        "energy": result.energy,
        "grad_norm": result.grad_norm,
        "multiplier": result.multiplier,
        "iterations": result.iterations,
        "boundary_active": result.boundary_active,
    }
    return _envelope("electro", args, results, checks)


# ===== VERIFY SUITES =====

def _rule_for(family, n):
    measure = family.measure()
    return quadrature.gauss_rule(orthopoly.family_coeffs(family, n), n, measure=measure), measure


def _suite_markov(args, family, n, tol):
    def case():
        rule, measure = _rule_for(family, n)
        return _bracket_checks(f"markov-stieltjes n={n}",
                               quadrature.markov_stieltjes_verify(rule, measure=measure))
    return case


def _suite_nested(args, family, n, tol):
    def case():
        rc = orthopoly.family_coeffs(family, n + 1)
        return _bracket_checks(f"nested-sums n={n}", quadrature.nested_sum_verify(rc, n))
    return case


def _suite_gap(args, family, n, tol):
    def case():
        rule, measure = _rule_for(family, n)
        return _bracket_checks(f"gap-bounds n={n}", quadrature.gap_bound_verify(rule, measure))
    return case


def _suite_posse(args, family, n, tol):
    def case():
        rule, measure = _rule_for(family, n)
        brackets = [quadrature.posse_verify(rule, math.exp, k, measure) for k in range(1, n + 1)]
        return _bracket_checks(f"posse n={n}", brackets)
    return case


def _suite_contraction(args, family, n, tol):
    def case():
        q = family.q if family.tag is orthopoly.FamilyTag.STIELTJES_WIGERT else orthopoly.DEFAULT_SW_NOME
        z = args.z if args.z is not None else 2.0
        s = contfrac.SFraction.stieltjes_wigert(q, 2 * n + 1)
        j = contfrac.contract(s)
        checks = []
        for m in range(1, n + 1):
            expected = contfrac.s_convergent(s, z, 2 * m)
            error = abs(expected - contfrac.j_convergent(j, z, m))
            checks.append(Check.tolerance(f"contraction m={m}", error, tol, max(1.0, abs(expected))))
        return checks
    return case


def _suite_pade(args, family, n, tol):
    def case():
        rc = orthopoly.family_coeffs(family, n)
        sequence = moments.MomentSequence.from_family(family, 2 * n)
        matched = moments.pade_match_check(rc, sequence, n)
        return [Check.boolean(f"pade n={n}", matched >= 2 * n, slack=float(matched - 2 * n + 1),
                              detail=f"{matched} of {2 * n} coefficients match")]
    return case


def _suite_interlacing(args, family, n, tol):
    def case():
        rc = orthopoly.family_coeffs(family, n + 1)
        coarse = np.asarray(orthopoly.zeros(rc, n))
        fine = np.asarray(orthopoly.zeros(rc, n + 1))
        gap = float(min(np.min(coarse - fine[:-1]), np.min(fine[1:] - coarse)))
        checks = [Check.boolean(f"interlacing n={n}", gap > 0, slack=gap)]
        bracketed = np.asarray(orthopoly.bracketed_zeros(rc, n))
        scale = max(1.0, float(np.max(np.abs(coarse))))
        checks.append(Check.tolerance(f"bracketed-roots n={n}", float(np.max(np.abs(coarse - bracketed))),
                                      max(tol, 1e-10), scale))
        if family.tag is orthopoly.FamilyTag.LEGENDRE:
            for k in range(1, n + 1):
                x = coarse[n - k]
                for label, pair in zip(("bruns", "stieltjes"), legendre.zero_bounds(n, k)):
                    if pair is not None:
                        slack = float(min(x - pair[0], pair[1] - x))
                        checks.append(Check.boolean(f"{label} n={n} k={k}", slack > 0, slack=slack))
        return checks
    return case


def _suite_sw_moments(args, family, n, tol):
    def case():
        checks = []
        for lam in (-1.0, -0.5, 0.0, 0.5, 1.0):
            for k in range(n + 1):
                result = moments.sw_moment_identity(lam, k)
                checks.append(Check.tolerance(f"sw-moments lambda={lam} k={k}", result.deviation,
                                              max(tol, 1e-10)))
        return checks
    return case


def _suite_elliptic_cf(args, family, n, tol):
    def case():
        moduli = (args.k,) if args.k is not None else (0.3, 0.5, 0.7)
        checks = []
        for k in moduli:
            ctx = elliptic.EllipticContext.from_modulus(k)
            matches = elliptic.check_carlitz_pairing(ctx)
            checks.append(Check.boolean(f"carlitz-pairing k={k}", True,
                                        detail=", ".join(f"{w}->{m.transform}" for w, m in matches.items())))
            for which, index in elliptic.CARLITZ_PAIRING.items():
                for z in (1.0, 2.0, 4.0):
                    target = elliptic.laplace_f(index, z, ctx)
                    value, depth, _ = elliptic.carlitz_cf_converged(which, ctx, z, n)
                    checks.append(Check.tolerance(f"{which} k={k} z={z}", abs(value - target),
                                                  max(tol, Config.CARLITZ_MATCH_TOL), abs(target),
                                                  detail=f"depth {depth}"))
        return checks
    return case


def _suite_expansion(args, family, n, tol):
    def case():
        checks = []
        for m in (1, 2, 3):
            for theta in np.linspace(0.1, math.pi - 0.1, 50):
                expansion = legendre.stieltjes_expansion(n, float(theta), m)
                error = abs(legendre.legendre_p(n, math.cos(theta)) - expansion.value)
                slack = expansion.bound - error
                checks.append(Check.boolean(f"expansion-bound n={n} m={m} theta={theta:.4f}",
                                            slack > 0, slack=slack))
        return checks
    return case


def _suite_second_kind(args, family, n, tol):
    def case():
        roots = legendre.q_zeros(n)
        checks = [Check.boolean(f"q-zeros n={n}", len(roots) == n + 1,
                                detail=f"{len(roots)} zeros, interlacing with P_{n}")]
        checks.append(Check.tolerance(f"q-closed-form n={n}", legendre.q_consistency(n),
                                      max(tol, 1e-10)))
        return checks
    return case


def _suite_zero_distribution(args, family, n, tol):
    def case():
        if n < 8:
            raise ParameterError(f"zero-distribution needs n >= 8, got {n}")
        grid = [n // 8, n // 4, n // 2, n]
        checks = []
        for p, q in ((0.25, 0.25), (1.0, 1.0)):
            distances = [electro.arcsine_distance(electro.predicted_positions(m, p, q)) for m in grid]
            checks.append(Check.tolerance(f"arcsine p={p} q={q} n={n}", distances[-1],
                                          Config.ZERO_LAW_TOL, detail=f"distances {distances}"))
            rise = max(b - a for a, b in zip(distances, distances[1:]))
            checks.append(Check.boolean(f"arcsine-monotone p={p} q={q}", rise <= 1e-12,
                                        slack=1e-12 - rise))
        rc = orthopoly.family_coeffs(orthopoly.Family(orthopoly.FamilyTag.HERMITE), n)
        contracted = np.asarray(orthopoly.zeros(rc, n)) / electro.freud_scale(2.0, n)
        checks.append(Check.tolerance(f"semicircle n={n}", electro.semicircle_distance(contracted),
                                      Config.ZERO_LAW_TOL))
        return checks
    return case


# suite name -> (case builder, default family, default n values)
SUITES = {
    "markov-stieltjes": (_suite_markov, "legendre", (30,)),
    "nested-sums": (_suite_nested, "legendre", (10,)),
    "gap-bounds": (_suite_gap, "legendre", (10,)),
    "posse": (_suite_posse, "legendre", (8,)),
    "contraction": (_suite_contraction, "stieltjes_wigert", (10,)),
    "pade": (_suite_pade, "legendre", (4, 8)),
    "interlacing": (_suite_interlacing, "legendre", (10,)),
    "sw-moments": (_suite_sw_moments, "stieltjes_wigert", (8,)),
    "elliptic-cf": (_suite_elliptic_cf, "carlitz_c", (30,)),
    "expansion-bound": (_suite_expansion, "legendre", (10, 50)),
    "second-kind": (_suite_second_kind, "legendre", (4, 9)),
    "zero-distribution": (_suite_zero_distribution, "jacobi", (200,)),
}


def cmd_verify(args):
    builder, default_family, default_ns = SUITES[args.suite]
    family = _family(args, default=default_family)
    tol = _tolerance(args, Config.VERIFY_TOLERANCE)
    ns = args.n or default_ns
    cases = [(f"{args.suite} n={n}", builder(args, family, n, tol)) for n in ns]
    checks = run_cases(cases, args.jobs)
    results = {"suite": args.suite, "family": family.tag.value, "cases": len(cases),
               "checks": len(checks), "failed": sum(not c.passed for c in checks)}
    return _envelope("verify", args, results, checks)


def cmd_asymptotic(args):
    expansion = legendre.stieltjes_expansion(args.n, args.theta, args.m)
    exact = legendre.legendre_p(args.n, math.cos(args.theta))
    error = abs(exact - expansion.value)
    results = {"value": expansion.value, "bound": expansion.bound, "prefactor": expansion.prefactor,
               "exact": exact, "error": error}
    checks = [Check.boolean("remainder-bound", error < expansion.bound, slack=expansion.bound - error)]
    return _envelope("asymptotic legendre", args, results, checks)


def _elliptic_k(args, ctx):
    convention, errors = elliptic.k_prime_convention(args.k)
    results = {"K": ctx.K, "K_prime": ctx.K_prime, "E": elliptic.complete_e(args.k),
               "q_nome": ctx.q_nome, "printed_K_prime": elliptic.printed_k_prime(args.k),
               "convention": convention, "convention_errors": errors}
    checks = [Check.boolean("k-prime-convention", convention == "standard",
                            slack=errors["printed"] - errors["standard"])]
    return results, checks


def _elliptic_fn(args, ctx):
    u = 0.5 if args.u is None else args.u
    sn, cn, dn = elliptic.jacobi_elliptic(u, ctx)
    results = {"u": u, "sn": sn, "cn": cn, "dn": dn}
    checks = [
        Check.tolerance("sn2+cn2", abs(sn * sn + cn * cn - 1.0), 1e-12),
        Check.tolerance("dn2+k2sn2", abs(dn * dn + args.k ** 2 * sn * sn - 1.0), 1e-12),
    ]
    if abs(u) <= 4 * ctx.K:
        series = elliptic.fourier_sn_cn_dn(u, ctx)
        results["fourier"] = {"sn": series[0], "cn": series[1], "dn": series[2]}
        error = max(abs(a - b) for a, b in zip((sn, cn, dn), series))
        checks.append(Check.tolerance("fourier", error, _tolerance(args, Config.FOURIER_CROSSCHECK_TOL)))
    return results, checks


def _elliptic_laplace(args, ctx):
    z = 2.0 if args.z is None else args.z
    results, checks = {"z": z}, []
    for i in (1, 2, 3, 4):
        series = elliptic.laplace_f_series(i, z, ctx)
        damped = elliptic.laplace_f_quadrature(i, z, ctx)
        results[f"F_{i}"] = {"series": series, "quadrature": damped}
        checks.append(Check.tolerance(f"F_{i}", abs(series - damped),
                                      _tolerance(args, Config.LAPLACE_CROSSCHECK_TOL), abs(series)))
    return results, checks


def _elliptic_cf(args, ctx):
    z = 2.0 if args.z is None else args.z
    terms = args.terms or 30
    results, checks = {"z": z, "terms": terms}, []
    for which, index in elliptic.CARLITZ_PAIRING.items():
        if args.terms is None:
            value, depth, _ = elliptic.carlitz_cf_converged(which, ctx, z, terms)
        else:
            value, depth = elliptic.carlitz_cf_approximant(which, ctx, z, terms), terms
        target = elliptic.laplace_f(index, z, ctx)
        results[which] = {"approximant": value, "depth": depth, "transform": f"F_{index}",
                          "target": target}
        checks.append(Check.tolerance(which, abs(value - target),
                                      _tolerance(args, Config.CARLITZ_MATCH_TOL), abs(target)))
    for i in (3, 4):
        results[f"F_{i}_jfraction"] = elliptic.elliptic_jfraction_value(i, ctx, z, terms)
    return results, checks


ELLIPTIC_ACTIONS = {"k": _elliptic_k, "fn": _elliptic_fn, "laplace": _elliptic_laplace, "cf": _elliptic_cf}


def cmd_elliptic(args):
    ctx = elliptic.EllipticContext.from_modulus(args.k)
    results, checks = ELLIPTIC_ACTIONS[args.action](args, ctx)
    return _envelope(f"elliptic {args.action}", args, results, checks)


def cmd_selberg(args):
    value = electro.selberg(args.n, args.x, args.y, args.z)
    return _envelope("selberg", args, {"value": value})


def cmd_fekete(args):
    points, diameter = electro.fekete(args.n, args.method)
    interior = []
    for i in range(1, len(points) - 1):
        others = np.delete(points, i)
        interior.append(abs(float(np.sum(1.0 / (points[i] - others)))))
    residual = max(interior, default=0.0)
    checks = [Check.tolerance("stationarity", residual, _tolerance(args, 1e-6), float(len(points) ** 2))]
    results = {"points": list(points), "transfinite_diameter": diameter,
               "discriminant": electro.discriminant(points)}
    return _envelope("fekete", args, results, checks)
