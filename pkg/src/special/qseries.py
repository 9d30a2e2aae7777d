"""q-Pochhammer products and the Stieltjes-Wigert coefficient sequence"""
import math

from src.special.errors import ParameterError


def q_pochhammer(a, q, n):
    """(a;q)_n = (1-a)(1-aq)...(1-aq^{n-1}), with (a;q)_0 = 1"""
    if n < 0:
        raise ParameterError(f"n must be non-negative, got {n}")
    result = 1.0
    factor = a
    for _ in range(n):
        result *= 1.0 - factor
        factor *= q
    return result


def check_nome(q):
    if not 0.0 < q < 1.0:
        raise ParameterError(f"q must lie in (0, 1), got {q}")


def stieltjes_wigert_c(q, m):
    """S-fraction coefficients c_1..c_m for the Stieltjes-Wigert weight.

    c_{2n} = (q;q)_{n-1} q^n and c_{2n+1} = q^{(2n+1)/2} / (q;q)_n,
    so c_1 = q^{1/2}.
    """
    check_nome(q)
    if m < 1:
        raise ParameterError(f"need at least one coefficient, got {m}")
    coeffs = []
    for index in range(1, m + 1):
        n, odd = divmod(index, 2)
        if odd:
            coeffs.append(q ** (index / 2.0) / q_pochhammer(q, q, n))
        else:
            coeffs.append(q_pochhammer(q, q, n - 1) * q ** n)
    return tuple(coeffs)


def wigert_k(q):
    """Width parameter k of exp(-k^2 log^2 x) for the nome q = exp(-1/(2k^2))"""
    check_nome(q)
    return math.sqrt(-1.0 / (2.0 * math.log(q)))
