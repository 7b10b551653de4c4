"""Truncated Taylor-series (jet) arithmetic.

A jet stores the scaled coefficients c_k = f^(k)(x0)/k! of a function at a
base point, through a fixed order, at a fixed binary precision. Storing c_k
rather than the raw derivatives keeps the standard recurrences (Cauchy
product, exp, ln, division) numerically stable; the factorials re-enter
only in `derivatives_from_jet`, where they are exact integers.

All operations are pure; jets are immutable values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from mpmath import mp

from .core import DEFAULT_PRECISION, Numeric, as_mpf, workprec
from .errors import DomainError, MismatchedJets, NearSingular, OrderTooLarge
from .expr import Binding, Expr, evaluate

DEFAULT_ORDER_CAP = 16


@dataclass(frozen=True)
class Jet:
    x0: object  # mpf
    coeffs: tuple  # c_0..c_N as mpf
    precision: int = DEFAULT_PRECISION

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, k: int):
        return self.coeffs[k]

    def __add__(self, other):
        return jet_add(self, other)

    def __sub__(self, other):
        return jet_sub(self, other)

    def __mul__(self, other):
        return jet_mul(self, other)

    def __truediv__(self, other):
        return jet_div(self, other)

    def __neg__(self):
        return Jet(self.x0, tuple(-c for c in self.coeffs), self.precision)


def constant_jet(value: Numeric, x0: Numeric, order: int, precision: int = DEFAULT_PRECISION) -> Jet:
    with workprec(precision):
        zero = mp.mpf(0)
        return Jet(as_mpf(x0), (as_mpf(value),) + (zero,) * order, precision)


def variable_jet(x0: Numeric, order: int, precision: int = DEFAULT_PRECISION) -> Jet:
    with workprec(precision):
        base = as_mpf(x0)
        coeffs = [base] + [mp.mpf(0)] * order
        if order >= 1:
            coeffs[1] = mp.mpf(1)
        return Jet(base, tuple(coeffs), precision)


def _check_match(a: Jet, b: Jet):
    if a.x0 != b.x0 or a.order != b.order or a.precision != b.precision:
        raise MismatchedJets(
            f"jets disagree: x0 {a.x0}/{b.x0}, order {a.order}/{b.order}, "
            f"precision {a.precision}/{b.precision}")


def jet_add(a: Jet, b: Jet) -> Jet:
    _check_match(a, b)
    with workprec(a.precision):
        return Jet(a.x0, tuple(u + v for u, v in zip(a.coeffs, b.coeffs)), a.precision)


def jet_sub(a: Jet, b: Jet) -> Jet:
    _check_match(a, b)
    with workprec(a.precision):
        return Jet(a.x0, tuple(u - v for u, v in zip(a.coeffs, b.coeffs)), a.precision)


def jet_scale(a: Jet, s) -> Jet:
    with workprec(a.precision):
        factor = as_mpf(s)
        return Jet(a.x0, tuple(factor * c for c in a.coeffs), a.precision)


def jet_mul(a: Jet, b: Jet) -> Jet:
    """Cauchy product: c_k = sum_j a_j * b_(k-j)."""
    _check_match(a, b)
    with workprec(a.precision):
        n = a.order
        out = []
        for k in range(n + 1):
            out.append(mp.fsum(a.coeffs[j] * b.coeffs[k - j] for j in range(k + 1)))
        return Jet(a.x0, tuple(out), a.precision)


def jet_div(a: Jet, b: Jet) -> Jet:
    """Division; refuses to divide by a jet whose value is numerically zero."""
    _check_match(a, b)
    with workprec(a.precision):
        b0 = b.coeffs[0]
        if abs(b0) < mp.ldexp(1, -(b.precision // 2)):
            raise NearSingular(
                f"jet division by leading coefficient {mp.nstr(b0, 8)} "
                f"below 2^-{b.precision // 2}")
        n = a.order
        out = [a.coeffs[0] / b0]
        for k in range(1, n + 1):
            acc = a.coeffs[k] - mp.fsum(out[j] * b.coeffs[k - j] for j in range(k))
            out.append(acc / b0)
        return Jet(a.x0, tuple(out), a.precision)


def jet_exp(a: Jet) -> Jet:
    """exp via the recurrence k*b_k = sum_{j=1..k} j*a_j*b_(k-j)."""
    with workprec(a.precision):
        n = a.order
        out = [mp.exp(a.coeffs[0])]
        for k in range(1, n + 1):
            acc = mp.fsum(j * a.coeffs[j] * out[k - j] for j in range(1, k + 1))
            out.append(acc / k)
        return Jet(a.x0, tuple(out), a.precision)


def jet_ln(a: Jet) -> Jet:
    """ln via k*a_0*b_k = k*a_k - sum_{j=1..k-1} j*b_j*a_(k-j); needs a_0 > 0."""
    with workprec(a.precision):
        a0 = a.coeffs[0]
        if a0 <= 0:
            raise DomainError(f"ln of jet with nonpositive value {mp.nstr(a0, 8)}")
        n = a.order
        out = [mp.ln(a0)]
        for k in range(1, n + 1):
            acc = k * a.coeffs[k] - mp.fsum(j * out[j] * a.coeffs[k - j] for j in range(1, k))
            out.append(acc / (k * a0))
        return Jet(a.x0, tuple(out), a.precision)


def _jet_int_pow(a: Jet, n: int) -> Jet:
    if n == 0:
        return constant_jet(1, a.x0, a.order, a.precision)
    if n < 0:
        return jet_div(constant_jet(1, a.x0, a.order, a.precision), _jet_int_pow(a, -n))
    result = None
    square = a
    while n:
        if n & 1:
            result = square if result is None else jet_mul(result, square)
        n >>= 1
        if n:
            square = jet_mul(square, square)
    return result


def jet_pow(a: Jet, v: Numeric) -> Jet:
    """Constant power: integers by repeated multiplication (negative bases
    allowed), anything else as exp(v*ln a) with a_0 > 0 required."""
    with workprec(a.precision):
        value = as_mpf(v)
        if value == mp.floor(value) and abs(value) < (1 << 31):
            return _jet_int_pow(a, int(value))
        if a.coeffs[0] <= 0:
            raise DomainError(
                f"non-integer power of jet with nonpositive value {mp.nstr(a.coeffs[0], 8)}")
        return jet_exp(jet_scale(jet_ln(a), value))


def jet_lift(e: Expr, x0: Numeric, order: int, binding: Binding | None = None,
             precision: int | None = None, order_cap: int = DEFAULT_ORDER_CAP) -> Jet:
    """Lift an expression to its jet at x0 through the given order.

    Precision comes from the binding when one is supplied, else from the
    `precision` argument, else the package default.
    """
    if order < 0:
        raise ValueError(f"order must be nonnegative, got {order}")
    if order > order_cap:
        raise OrderTooLarge(f"order {order} exceeds cap {order_cap}")
    if binding is None:
        binding = Binding(precision=precision or DEFAULT_PRECISION)
    elif precision is not None and precision != binding.precision:
        binding = Binding(binding.values, precision)
    with workprec(binding.precision):
        return _lift(e, as_mpf(x0), order, binding)


def _lift(e: Expr, x0, order: int, b: Binding) -> Jet:
    kind = e.kind
    prec = b.precision
    if kind == "const":
        return constant_jet(e.value, x0, order, prec)
    if kind == "var":
        return variable_jet(x0, order, prec)
    if kind == "param":
        return constant_jet(b.get(e.name), x0, order, prec)
    if kind == "neg":
        return -_lift(e.children[0], x0, order, b)
    if kind == "exp":
        return jet_exp(_lift(e.children[0], x0, order, b))
    if kind == "ln":
        return jet_ln(_lift(e.children[0], x0, order, b))
    if kind == "pow":
        base_node, expo_node = e.children
        base = _lift(base_node, x0, order, b)
        if not expo_node.contains_var():
            return jet_pow(base, evaluate(expo_node, x0, b))  # exponent is a constant
        if base.coeffs[0] <= 0:
            raise DomainError(
                "variable power of a nonpositive base "
                f"(value {mp.nstr(base.coeffs[0], 8)})")
        exponent = _lift(expo_node, x0, order, b)
        return jet_exp(jet_mul(exponent, jet_ln(base)))
    left = _lift(e.children[0], x0, order, b)
    right = _lift(e.children[1], x0, order, b)
    if kind == "add":
        return jet_add(left, right)
    if kind == "sub":
        return jet_sub(left, right)
    if kind == "mul":
        return jet_mul(left, right)
    if kind == "div":
        return jet_div(left, right)
    raise ValueError(f"unknown node kind {kind!r}")


def derivatives_from_jet(j: Jet) -> tuple:
    """Raw derivatives d_k = k! * c_k; the factorial side is exact."""
    with workprec(j.precision):
        return tuple(math.factorial(k) * c for k, c in enumerate(j.coeffs))
