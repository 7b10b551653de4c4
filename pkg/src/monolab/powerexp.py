"""Closed-form analysis of the family F(x) = (1 + a/x)^(x+b).

On the admissible domain (x > max(0,-a) or x < min(0,-a)):

    ln F(x)    = (x+b) * ln(1 + a/x)
    [ln F]'(x) = ln(1 + a/x) - a*(x+b)/(x*(x+a))
    [ln F]''(x) = a*((2b-a)*x + a*b) / (x^2 * (x+a)^2)

Solving [ln F]' = 0 for b gives the threshold

    critical_beta(a, x) = x*((1 + x/a)*ln(1 + a/x) - 1),

whose limits (a at the finite endpoint, a/2 at infinity, 0 at x -> 0)
produce the sharp parameter boundaries of the eight-way classification
in `classify`: for each sign of a, membership of F and 1/F in the log
classes on the matching interval is equivalent to a linear condition
among {b<=a, 2b>=a, b<=0, b>=0, 2b<=a, b>=a}.

The kernels q and p are the densities appearing in the integral
representations of [ln F]''; both are decreasing, with limits
q: 1/2 at 0, 1 at -inf, 0 at +inf and p: -1/2 at 0, 0 at -inf, -1 at +inf.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp

from .core import (
    DEFAULT_PRECISION,
    Interval,
    Numeric,
    as_fraction,
    as_mpf,
    fraction_str,
    json_number,
    workprec,
)
from .errors import DomainError, InvalidParameter, PoleError
from .expr import Expr, evaluate, make_power_expr
from .mono import ClassVerdict, GridSpec, MonotoneClass, check_class

KERNEL_SERIES_CUTOFF = 2.0**-8  # below this |u|, direct evaluation loses too much


@dataclass(frozen=True)
class ParamPoint:
    """Exact parameter pair (alpha, beta), alpha nonzero."""

    alpha: Fraction
    beta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_fraction(self.alpha))
        object.__setattr__(self, "beta", as_fraction(self.beta))
        if self.alpha == 0:
            raise InvalidParameter("alpha must be nonzero")


def _split_point(p: ParamPoint, x: Numeric):
    """Common admissibility plumbing: returns (x, eps=x+alpha) as mpf."""
    xv = as_mpf(x)
    a = as_mpf(p.alpha)
    eps = xv + a
    if xv == 0 or eps == 0:
        raise PoleError(f"x = {mp.nstr(xv, 8)} is a pole (x and x+alpha must be nonzero)")
    return xv, a, eps


def log_deriv1(p: ParamPoint, x: Numeric, precision: int = DEFAULT_PRECISION):
    """First derivative of ln F: ln(1+a/x) - a*(x+b)/(x*(x+a)).

    The logarithm is computed as ln|x+a| - ln|x|, which is exact on the
    admissible domain and avoids cancellation near the finite endpoint.
    """
    with workprec(precision):
        xv, a, eps = _split_point(p, x)
        if eps / xv <= 0:
            raise DomainError(f"x = {mp.nstr(xv, 8)} is not in an admissible interval")
        b = as_mpf(p.beta)
        return (mp.ln(abs(eps)) - mp.ln(abs(xv))) - a * (xv + b) / (xv * eps)


def log_deriv2(p: ParamPoint, x: Numeric, precision: int = DEFAULT_PRECISION):
    """Second derivative of ln F: a*((2b-a)*x + a*b) / (x^2*(x+a)^2)."""
    with workprec(precision):
        xv, a, eps = _split_point(p, x)
        b = as_mpf(p.beta)
        return a * ((2 * b - a) * xv + a * b) / (xv**2 * eps**2)


def critical_beta(alpha: Numeric, x: Numeric, precision: int = DEFAULT_PRECISION):
    """The beta value at which [ln F]'(x) vanishes: x*((1+x/a)*ln(1+a/x) - 1).

    Evaluated as x*((eps/a)*(ln|eps| - ln|x|) - 1) with eps = x+a, an exact
    rearrangement that stays stable when x approaches the endpoint -a
    (where the naive form is a 0*inf product).
    """
    a_frac = as_fraction(alpha)
    if a_frac == 0:
        raise InvalidParameter("alpha must be nonzero")
    with workprec(precision):
        xv, a, eps = _split_point(ParamPoint(a_frac, Fraction(0)), x)
        if eps / xv <= 0:
            raise DomainError(f"x = {mp.nstr(xv, 8)} is not in an admissible interval")
        return xv * ((eps / a) * (mp.ln(abs(eps)) - mp.ln(abs(xv))) - 1)


# ---------------------------------------------------------------------------
# Kernels of the integral representations of [ln F]''
# ---------------------------------------------------------------------------

def q_kernel(u: Numeric, precision: int = DEFAULT_PRECISION):
    """q(u) = (e^u - u - 1)/(u*(e^u - 1)); q(0) = 1/2 via its series."""
    with workprec(precision):
        uv = as_mpf(u)
        if abs(uv) < KERNEL_SERIES_CUTOFF:
            num = mp.mpf(1) / 2 + uv / 6 + uv**2 / 24 + uv**3 / 120 + uv**4 / 720
            den = 1 + uv / 2 + uv**2 / 6 + uv**3 / 24 + uv**4 / 120
            return num / den
        em1 = mp.expm1(uv)
        return (em1 - uv) / (uv * em1)


def p_kernel(u: Numeric, precision: int = DEFAULT_PRECISION):
    """p(u) = (1 + (u-1)*e^u)/(u*(1 - e^u)); p(0) = -1/2 via its series."""
    with workprec(precision):
        uv = as_mpf(u)
        if abs(uv) < KERNEL_SERIES_CUTOFF:
            num = mp.mpf(1) / 2 + uv / 3 + uv**2 / 8 + uv**3 / 30 + uv**4 / 144
            den = 1 + uv / 2 + uv**2 / 6 + uv**3 / 24 + uv**4 / 120
            return -num / den
        return (1 + (uv - 1) * mp.exp(uv)) / (uv * (-mp.expm1(uv)))


# ---------------------------------------------------------------------------
# Eight-way parameter classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegionEntry:
    item: int  # classification case 1..4; 1 and 3 apply for alpha<0, 2 and 4 for alpha>0
    subject: str  # "f" | "reciprocal"
    klass: MonotoneClass
    interval: Interval | None
    condition: str
    applicable: bool
    holds: bool | None
    boundary: bool | None  # condition holds with equality

    def to_dict(self) -> dict:
        return {
            "item": self.item,
            "subject": self.subject,
            "class": self.klass.value,
            "interval": self.interval.display() if self.interval else None,
            "condition": self.condition,
            "applicable": self.applicable,
            "holds": self.holds,
            "boundary": self.boundary,
        }


@dataclass(frozen=True)
class RegionReport:
    alpha: Fraction
    beta: Fraction
    entries: tuple[RegionEntry, ...]  # exactly 8, ordered by (item, subject)

    def entry(self, item: int, subject: str) -> RegionEntry:
        for e in self.entries:
            if e.item == item and e.subject == subject:
                return e
        raise KeyError((item, subject))

    def to_dict(self) -> dict:
        return {
            "kind": "region_report",
            "alpha": json_number(self.alpha),
            "beta": json_number(self.beta),
            "alpha_exact": fraction_str(self.alpha),
            "beta_exact": fraction_str(self.beta),
            "entries": [e.to_dict() for e in self.entries],
        }


def _region_rows(p: ParamPoint):
    a, b = p.alpha, p.beta
    neg = a < 0
    upper = Interval(max(Fraction(0), -a), None)
    lower = Interval(None, min(Fraction(0), -a))
    # (item, subject, class, interval, condition text, lhs, rhs, applicable)
    return [
        (1, "f", MonotoneClass.LCM, upper, "beta <= alpha", b, a, "le", neg),
        (1, "reciprocal", MonotoneClass.LCM, upper, "2*beta >= alpha", 2 * b, a, "ge", neg),
        (2, "f", MonotoneClass.LCM, upper, "2*beta >= alpha", 2 * b, a, "ge", not neg),
        (2, "reciprocal", MonotoneClass.LCM, upper, "beta <= 0", b, Fraction(0), "le", not neg),
        (3, "f", MonotoneClass.LAM, lower, "beta >= 0", b, Fraction(0), "ge", neg),
        (3, "reciprocal", MonotoneClass.LAM, lower, "2*beta <= alpha", 2 * b, a, "le", neg),
        (4, "f", MonotoneClass.LAM, lower, "2*beta <= alpha", 2 * b, a, "le", not neg),
        (4, "reciprocal", MonotoneClass.LAM, lower, "beta >= alpha", b, a, "ge", not neg),
    ]


def classify(p: ParamPoint) -> RegionReport:
    """Evaluate the eight membership conditions exactly.

    For each applicable (subject, class, interval) triple the report says
    whether the condition holds and whether it does so with equality
    (`boundary`); the four cases for the other sign of alpha are marked
    not applicable.
    """
    entries = []
    for item, subject, klass, interval, text, lhs, rhs, op, applicable in _region_rows(p):
        if not applicable:
            entries.append(RegionEntry(item, subject, klass, None, text, False, None, None))
            continue
        holds = lhs <= rhs if op == "le" else lhs >= rhs
        entries.append(RegionEntry(item, subject, klass, interval, text, True,
                                   holds, lhs == rhs))
    return RegionReport(p.alpha, p.beta, tuple(entries))


# ---------------------------------------------------------------------------
# Shifted complete-monotonicity checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ShiftedCmEntry:
    subject: str  # f_minus_limit | reciprocal_minus_limit | reciprocal
    expr_text: str
    condition: str
    condition_holds: bool
    verdict: ClassVerdict

    @property
    def matches(self) -> bool:
        expected = "consistent" if self.condition_holds else "refuted"
        return self.verdict.verdict == expected

    def to_dict(self) -> dict:
        return {
            "subject": self.subject,
            "expr": self.expr_text,
            "condition": self.condition,
            "condition_holds": self.condition_holds,
            "verdict": self.verdict.to_dict(),
            "matches": self.matches,
        }


@dataclass(frozen=True)
class ShiftedCmReport:
    alpha: Fraction
    beta: Fraction
    interval: Interval
    entries: tuple[ShiftedCmEntry, ...]
    limit_value: float  # F at the far sample point
    limit_expected: float  # e^alpha
    limit_rel_err: float

    @property
    def ok(self) -> bool:
        return all(e.matches for e in self.entries)

    def to_dict(self) -> dict:
        return {
            "kind": "shifted_cm_report",
            "alpha": json_number(self.alpha),
            "beta": json_number(self.beta),
            "interval": self.interval.display(),
            "ok": self.ok,
            "entries": [e.to_dict() for e in self.entries],
            "limit_value": self.limit_value,
            "limit_expected": self.limit_expected,
            "limit_rel_err": self.limit_rel_err,
        }


def shifted_cm_check(p: ParamPoint, grid: GridSpec | None = None, max_order: int = 8,
                     precision: int = DEFAULT_PRECISION,
                     limit_x: Fraction = Fraction(10) ** 8) -> ShiftedCmReport:
    """Complete-monotonicity sweep of F minus its limit at infinity.

    F tends to e^alpha, so subtracting the limit changes only the order-0
    condition (F - e^alpha >= 0); orders >= 1 are untouched. For alpha > 0
    the companion subject is 1/F - e^(-alpha) on (0,inf); for alpha < 0 it
    is 1/F itself on (-alpha,inf). Each verdict is compared against the
    matching closed-form condition.
    """
    a, b = p.alpha, p.beta
    family = make_power_expr(a, b)
    recip = make_power_expr(a, b, reciprocal=True)
    interval = family.upper_interval
    if a > 0:
        subjects = [
            ("f_minus_limit", Expr.sub(family.expr, Expr.exp(Expr.signed_const(a))),
             "alpha <= 2*beta", a <= 2 * b),
            ("reciprocal_minus_limit", Expr.sub(recip.expr, Expr.exp(Expr.signed_const(-a))),
             "beta <= 0", b <= 0),
        ]
    else:
        subjects = [
            ("f_minus_limit", Expr.sub(family.expr, Expr.exp(Expr.signed_const(a))),
             "beta <= alpha", b <= a),
            ("reciprocal", recip.expr, "2*beta >= alpha", 2 * b >= a),
        ]
    entries = []
    for name, subject_expr, condition, holds in subjects:
        verdict = check_class(subject_expr, interval, MonotoneClass.CM,
                              max_order=max_order, grid=grid, precision=precision)
        entries.append(ShiftedCmEntry(name, str(subject_expr), condition, holds, verdict))
    with workprec(precision):
        value = evaluate(family.expr, limit_x)
        expected = mp.exp(as_mpf(a))
        rel = abs(value - expected) / abs(expected)
    return ShiftedCmReport(a, b, interval, tuple(entries),
                           float(value), float(expected), float(rel))
