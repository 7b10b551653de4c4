"""Independent oracles used to fix expected values.

Everything here computes results by a route different from the package
code it checks: finite differences instead of jets, generating functions
instead of partition enumeration, the Bell triangle instead of coefficient
sums. Keep it that way.
"""

from __future__ import annotations

import math
from itertools import product

from mpmath import mp


def central_difference(f, x, k: int, h):
    """k-th central difference over half-steps; truncation error O(h^2)."""
    total = mp.mpf(0)
    for j in range(k + 1):
        total += (-1) ** j * math.comb(k, j) * f(x + (mp.mpf(k) / 2 - j) * h)
    return total / h**k


def richardson_derivative(f, x, k: int, h):
    """One Richardson step over central differences at h and h/2."""
    d1 = central_difference(f, x, k, h)
    d2 = central_difference(f, x, k, h / 2)
    return (4 * d2 - d1) / 3


def partition_count_gf(n: int) -> int:
    """Partition number via the generating function prod 1/(1-x^k)."""
    coeffs = [1] + [0] * n
    for k in range(1, n + 1):
        for i in range(k, n + 1):
            coeffs[i] += coeffs[i - k]
    return coeffs[n]


def brute_force_exponent_vectors(n: int) -> list[tuple[int, ...]]:
    """Every (i_1..i_n) with sum(k*i_k) = n by exhaustive search over the
    box 0 <= i_k <= n//k. Exponential; keep n small."""
    ranges = [range(n // k + 1) for k in range(1, n + 1)]
    out = []
    for vec in product(*ranges):
        if sum(k * i for k, i in enumerate(vec, start=1)) == n:
            out.append(vec)
    return sorted(out)


def bell_numbers(nmax: int) -> list[int]:
    """B_0..B_nmax by the Bell triangle recurrence."""
    row = [1]
    bells = [1]
    for _ in range(nmax):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        bells.append(nxt[0])
        row = nxt
    return bells


def rel_err(a, b, scale=None):
    """|a-b| relative to the larger magnitude (or a supplied scale)."""
    denom = max(abs(a), abs(b), abs(scale) if scale is not None else mp.mpf(0))
    if denom == 0:
        return mp.mpf(0)
    return abs(a - b) / denom


def random_component(rng):
    """A random (expression, kind) pair from {exp, ln(1+.), degree<=4 poly}."""
    from monolab.expr import Expr, parse

    kind = rng.choice(["exp", "log1p", "poly"])
    if kind == "exp":
        return parse("exp(x)"), kind
    if kind == "log1p":
        return parse("ln(1+x)"), kind
    coeffs = [rng.randint(-3, 3) for _ in range(5)]
    terms = []
    for power, c in enumerate(coeffs):
        if c == 0:
            continue
        if power == 0:
            terms.append(Expr.signed_const(c))
        else:
            monomial = Expr.var() if power == 1 else Expr.pow(Expr.var(), Expr.const(power))
            terms.append(monomial if c == 1 else Expr.mul(Expr.signed_const(c), monomial))
    if not terms:
        return Expr.const(0), kind
    out = terms[0]
    for t in terms[1:]:
        out = Expr.add(out, t)
    return out, kind
