"""Exact combinatorics of the higher-order chain rule (Faa di Bruno's formula).

The n-th derivative of a composition g(h(x)) expands over multiset
partitions of n: exponent vectors (i_1..i_n) with sum(k*i_k) = n. Each
partition contributes

    n!/prod_k(i_k! * (k!)^i_k) * g^(i)(h(x)) * prod_k [h^(k)(x)]^i_k,

where i = sum(i_k) is the block count and the leading coefficient is an
exact (multinomial) integer. Specializing g to exp gives the expansion of
f^(n) in terms of the derivatives of ln f, which is the workhorse for the
sign arguments in the monotonicity checks: each summand's sign is the
product of the signs of the log-derivative factors.

Coefficients are exact Python integers; derivative factors are mpf at the
requested precision. Partition lists are cached per order behind an
initialize-once table, in lexicographic order of (i_1..i_n) so that
term-level output is reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from mpmath import mp

from .core import DEFAULT_PRECISION, as_mpf, workprec
from .errors import InsufficientDerivatives, NonPositiveValue, OrderTooLarge

# Enumeration alone stays cheap far beyond the jet order cap; this bound
# keeps worst-case partition counts (p(40) = 37338) desk-scale.
PARTITION_ORDER_CAP = 40


@dataclass(frozen=True)
class MultisetPartition:
    """Exponent vector (i_1..i_n) with sum(k*i_k) = n."""

    n: int
    exponents: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1 or len(self.exponents) != self.n:
            raise ValueError(f"need exactly n={self.n} exponents")
        if any(i < 0 for i in self.exponents):
            raise ValueError("exponents must be nonnegative")
        if sum(k * i for k, i in enumerate(self.exponents, start=1)) != self.n:
            raise ValueError(f"exponents {self.exponents} do not weigh to {self.n}")

    @property
    def blocks(self) -> int:
        return sum(self.exponents)


@dataclass(frozen=True)
class BrunoTerm:
    partition: MultisetPartition
    coefficient: int  # n!/prod(i_k! * (k!)^i_k), always a positive integer


@lru_cache(maxsize=None)
def _exponent_vectors(n: int) -> tuple[tuple[int, ...], ...]:
    out: list[tuple[int, ...]] = []
    vec = [0] * n

    def descend(k: int, remaining: int):
        if k > n:
            if remaining == 0:
                out.append(tuple(vec))
            return
        limit = remaining // k
        for ik in range(limit + 1):
            vec[k - 1] = ik
            descend(k + 1, remaining - k * ik)
        vec[k - 1] = 0

    descend(1, n)
    out.sort()  # lexicographic in (i_1..i_n)
    return tuple(out)


@lru_cache(maxsize=None)
def _partition_table(n: int) -> tuple[MultisetPartition, ...]:
    return tuple(MultisetPartition(n, vec) for vec in _exponent_vectors(n))


def enumerate_partitions(n: int, order_cap: int = PARTITION_ORDER_CAP) -> tuple[MultisetPartition, ...]:
    """All multiset partitions of n, lexicographic in (i_1..i_n)."""
    if not 1 <= n <= order_cap:
        raise OrderTooLarge(f"partition order {n} outside 1..{order_cap}")
    return _partition_table(n)


def bruno_coefficient(p: MultisetPartition) -> int:
    """Exact integer n!/prod_k(i_k! * (k!)^i_k)."""
    denom = 1
    for k, ik in enumerate(p.exponents, start=1):
        if ik:
            denom *= math.factorial(ik) * math.factorial(k) ** ik
    coeff, rem = divmod(math.factorial(p.n), denom)
    assert rem == 0, "multinomial coefficient must be an integer"
    return coeff


def compose_nth(g_derivs, h_derivs, n: int, precision: int = DEFAULT_PRECISION):
    """n-th derivative of g(h(x)) from g^(i)(h(x)) and h^(k)(x).

    Both sequences are indexed by derivative order starting at 0 (the plain
    function values) and must reach order n.
    """
    if n == 0:
        return as_mpf(g_derivs[0])
    if len(g_derivs) <= n or len(h_derivs) <= n:
        raise InsufficientDerivatives(
            f"need derivative orders through {n}, got {len(g_derivs) - 1} for g "
            f"and {len(h_derivs) - 1} for h")
    with workprec(precision):
        g = [as_mpf(v) for v in g_derivs[: n + 1]]
        h = [as_mpf(v) for v in h_derivs[: n + 1]]
        terms = []
        for part in enumerate_partitions(n):
            term = mp.mpf(bruno_coefficient(part)) * g[part.blocks]
            for k, ik in enumerate(part.exponents, start=1):
                if ik:
                    term *= h[k] ** ik
            terms.append(term)
        return mp.fsum(terms)


def _log_expansion_terms(f_value, derivs_from_1, n: int):
    # shared core of exp_of_log / signed_terms; derivs_from_1[k-1] holds order k
    terms = []
    for part in enumerate_partitions(n):
        term = mp.mpf(bruno_coefficient(part)) * f_value
        for k, ik in enumerate(part.exponents, start=1):
            if ik:
                term *= derivs_from_1[k - 1] ** ik
        terms.append(term)
    return tuple(terms)


def exp_of_log(f_value, log_derivs, n: int, precision: int = DEFAULT_PRECISION):
    """f^(n)(x) reconstructed from f(x) > 0 and the derivatives of ln f.

    `log_derivs[k-1]` holds [ln f]^(k)(x) for k = 1..n. Returns the total and
    the individual partition terms (lexicographic order) so sign arguments
    can be checked term by term. f^(n) >= 0 whenever every log derivative
    is >= 0, since each term is then a product of nonnegative factors.
    """
    with workprec(precision):
        fv = as_mpf(f_value)
        if fv <= 0:
            raise NonPositiveValue(f"function value must be positive, got {mp.nstr(fv, 8)}")
        if n == 0:
            return fv, (fv,)
        if len(log_derivs) < n:
            raise InsufficientDerivatives(
                f"need log-derivative orders 1..{n}, got {len(log_derivs)}")
        derivs = [as_mpf(v) for v in log_derivs[:n]]
        terms = _log_expansion_terms(fv, derivs, n)
        return mp.fsum(terms), terms


def signed_terms(f_value, signed_log_derivs, n: int, precision: int = DEFAULT_PRECISION):
    """Partition terms of (-1)^n * f^(n)(x) from the sign-flipped log derivatives.

    `signed_log_derivs[k-1]` holds (-1)^k * [ln f]^(k)(x) for k = 1..n. The
    factor (-1)^n distributes over each partition as (-1)^(sum k*i_k), so
    every returned term is >= 0 whenever all inputs are >= 0.
    """
    with workprec(precision):
        fv = as_mpf(f_value)
        if fv <= 0:
            raise NonPositiveValue(f"function value must be positive, got {mp.nstr(fv, 8)}")
        if n == 0:
            return (fv,)
        if len(signed_log_derivs) < n:
            raise InsufficientDerivatives(
                f"need signed log-derivative orders 1..{n}, got {len(signed_log_derivs)}")
        derivs = [as_mpf(v) for v in signed_log_derivs[:n]]
        return _log_expansion_terms(fv, derivs, n)


# ---------------------------------------------------------------------------
# Symbolic term table (CLI `bruno` subcommand)
# ---------------------------------------------------------------------------

def term_table(n: int) -> tuple[BrunoTerm, ...]:
    return tuple(BrunoTerm(p, bruno_coefficient(p)) for p in enumerate_partitions(n))


def term_text(term: BrunoTerm) -> str:
    factors = [f"g^({term.partition.blocks})(h)"]
    for k, ik in enumerate(term.partition.exponents, start=1):
        if ik == 1:
            factors.append(f"h^({k})")
        elif ik > 1:
            factors.append(f"[h^({k})]^{ik}")
    return f"{term.coefficient} * " + " * ".join(factors)


def format_term_table(n: int) -> str:
    terms = term_table(n)
    lines = [
        f"# order n = {n}: {len(terms)} partition terms",
        "# term = coefficient * g^(i)(h) * prod_k [h^(k)]^i_k,"
        " coefficient = n!/prod(i_k!*(k!)^i_k), i = sum(i_k)",
    ]
    for term in terms:
        exps = ",".join(str(i) for i in term.partition.exponents)
        lines.append(f"({exps})  blocks={term.partition.blocks}  {term_text(term)}")
    return "\n".join(lines) + "\n"
