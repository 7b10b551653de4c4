"""Numerical membership tests for the four monotonicity classes.

Classes and their sign rules, checked for every order k up to a cap at
every point of a log-spaced sample grid:

    cm   (-1)^k * f^(k)(x)      >= 0   for k >= 0
    am   f^(k)(x)               >= 0   for k >= 0
    lcm  (-1)^k * [ln f]^(k)(x) >= 0   for k >= 1
    lam  [ln f]^(k)(x)          >= 0   for k >= 1

A `consistent` verdict is evidence, not a proof; `refuted` carries a
witness that reproduces with a single jet evaluation and survives a
re-check at doubled precision (guarding against roundoff refutations).
The log classes are `inapplicable` when f is nonpositive somewhere on
the grid.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp

from .bruno import exp_of_log, signed_terms
from .core import DEFAULT_PRECISION, Interval, as_mpf, json_number, workprec
from .errors import DomainError, NearSingular, NonPositiveValue
from .expr import Binding, Expr
from .jets import derivatives_from_jet, jet_lift


class MonotoneClass(enum.Enum):
    CM = "cm"
    AM = "am"
    LCM = "lcm"
    LAM = "lam"

    @property
    def uses_log(self) -> bool:
        return self in (MonotoneClass.LCM, MonotoneClass.LAM)

    @property
    def alternating(self) -> bool:
        """Whether the rule carries the (-1)^k factor."""
        return self in (MonotoneClass.CM, MonotoneClass.LCM)

    @property
    def min_order(self) -> int:
        # The log classes quantify over positive orders only; the plain
        # classes include the order-0 condition f >= 0.
        return 1 if self.uses_log else 0

    def signed_value(self, k: int, derivative):
        return -derivative if (self.alternating and k % 2 == 1) else derivative


@dataclass(frozen=True)
class GridSpec:
    """Log-spaced sample points hugging both ends of an interval.

    For (a, inf) the points are a + 10^j; mirrored for (-inf, b); both
    families (deduplicated) for a bounded interval; {0} plus +-10^j for
    the whole line. Necessary-condition failures show up near endpoints
    or far out, so the sweep must reach both regimes.
    """

    exponents: tuple[int, ...] = (-6, -4, -2, -1, 0, 1, 2, 4, 6)

    def points(self, interval: Interval) -> tuple[Fraction, ...]:
        offsets = [Fraction(10) ** j for j in self.exponents]
        pts: set[Fraction] = set()
        if interval.lo is None and interval.hi is None:
            pts.add(Fraction(0))
            for d in offsets:
                pts.update((d, -d))
        else:
            if interval.lo is not None:
                pts.update(interval.lo + d for d in offsets)
            if interval.hi is not None:
                pts.update(interval.hi - d for d in offsets)
        return tuple(sorted(p for p in pts if interval.contains(p)))


@dataclass(frozen=True)
class Tolerance:
    """A value v violates 'v >= 0' only if v < -max(eps_abs, eps_rel*scale),
    where scale is the magnitude of the quantities the value came from."""

    eps_abs: float
    eps_rel: float

    @classmethod
    def from_precision(cls, bits: int) -> "Tolerance":
        return cls(eps_abs=2.0 ** -(bits // 2), eps_rel=2.0 ** -(bits // 4))

    def threshold(self, scale):
        return max(as_mpf(self.eps_abs), as_mpf(self.eps_rel) * abs(scale))

    def violates(self, value, scale) -> bool:
        return value < -self.threshold(scale)


@dataclass(frozen=True)
class Witness:
    order: int
    point: Fraction
    value: float
    margin: float  # how far beyond the tolerance threshold the sign rule fails

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "point": json_number(self.point),
            "value": self.value,
            "margin": self.margin,
        }


@dataclass(frozen=True)
class ClassVerdict:
    klass: MonotoneClass
    interval: Interval
    max_order: int
    sample_count: int
    verdict: str  # consistent | refuted | inapplicable
    witness: Witness | None = None
    failure_point: Fraction | None = None  # evaluation failure (log of f <= 0, pole)
    failure_reason: str | None = None

    def to_dict(self) -> dict:
        return {
            "kind": "class_verdict",
            "class": self.klass.value,
            "interval": self.interval.display(),
            "max_order": self.max_order,
            "sample_count": self.sample_count,
            "verdict": self.verdict,
            "witness": self.witness.to_dict() if self.witness else None,
            "failure_point": None if self.failure_point is None else json_number(self.failure_point),
            "failure_reason": self.failure_reason,
        }


def _signed_derivatives(e: Expr, klass: MonotoneClass, point: Fraction, max_order: int,
                        binding: Binding):
    """Jet-evaluate the class's subject function and apply the sign rule."""
    target = Expr.ln(e) if klass.uses_log else e
    jet = jet_lift(target, point, max_order, binding=binding)
    derivs = derivatives_from_jet(jet)
    scale = max(abs(d) for d in derivs)
    signed = [klass.signed_value(k, d) for k, d in enumerate(derivs)]
    return signed, scale


def check_class(e: Expr, interval: Interval, klass: MonotoneClass, max_order: int = 8,
                grid: GridSpec | None = None, tol: Tolerance | None = None,
                precision: int = DEFAULT_PRECISION, binding: Binding | None = None) -> ClassVerdict:
    """Sweep the class's sign rule over the grid for all orders <= max_order.

    Returns the first violation beyond tolerance as `refuted` with a witness,
    `inapplicable` when evaluation leaves the real domain (log classes on a
    nonpositive function), else `consistent`. Points are scanned in ascending
    order and orders low to high, so the outcome is deterministic.
    """
    grid = grid or GridSpec()
    if binding is None:
        binding = Binding(precision=precision)
    tol = tol or Tolerance.from_precision(binding.precision)
    points = grid.points(interval)
    with workprec(binding.precision):
        for point in points:
            try:
                signed, scale = _signed_derivatives(e, klass, point, max_order, binding)
            except (DomainError, NearSingular) as exc:
                return ClassVerdict(klass, interval, max_order, len(points), "inapplicable",
                                    failure_point=point, failure_reason=str(exc))
            for k in range(klass.min_order, max_order + 1):
                if tol.violates(signed[k], scale):
                    confirmed = _confirm_violation(e, klass, point, k, max_order, tol, binding)
                    if confirmed is None:
                        continue  # roundoff artifact; the doubled-precision value passes
                    value, threshold = confirmed
                    witness = Witness(order=k, point=point, value=float(value),
                                      margin=float(-value - threshold))
                    return ClassVerdict(klass, interval, max_order, len(points), "refuted",
                                        witness=witness)
    return ClassVerdict(klass, interval, max_order, len(points), "consistent")


def _confirm_violation(e, klass, point, k, max_order, tol, binding):
    doubled = Binding(binding.values, 2 * binding.precision)
    with workprec(doubled.precision):
        signed, scale = _signed_derivatives(e, klass, point, max_order, doubled)
        if not tol.violates(signed[k], scale):
            return None
        return signed[k], tol.threshold(scale)


# ---------------------------------------------------------------------------
# Term-level verification of the two log-class inclusions
# ---------------------------------------------------------------------------

class InclusionVariant(enum.Enum):
    LCM_TO_CM = "lcm=>cm"
    LAM_TO_AM = "lam=>am"


@dataclass(frozen=True)
class InclusionEntry:
    point: Fraction
    order: int
    min_term: float
    total: float
    reference: float
    rel_err: float
    hypothesis_ok: bool
    terms_nonnegative: bool
    total_matches: bool

    @property
    def ok(self) -> bool:
        return self.hypothesis_ok and self.terms_nonnegative and self.total_matches


@dataclass(frozen=True)
class InclusionReport:
    variant: InclusionVariant
    interval: Interval
    max_order: int
    entries: tuple[InclusionEntry, ...]

    @property
    def ok(self) -> bool:
        return all(entry.ok for entry in self.entries)

    def to_dict(self) -> dict:
        return {
            "kind": "inclusion_report",
            "variant": self.variant.value,
            "interval": self.interval.display(),
            "max_order": self.max_order,
            "ok": self.ok,
            "entries": [
                {
                    "point": json_number(e.point),
                    "order": e.order,
                    "min_term": e.min_term,
                    "total": e.total,
                    "reference": e.reference,
                    "rel_err": e.rel_err,
                    "ok": e.ok,
                }
                for e in self.entries
            ],
        }


def verify_inclusion(e: Expr, interval: Interval, variant: InclusionVariant,
                     max_order: int = 6, grid: GridSpec | None = None,
                     tol: Tolerance | None = None, precision: int = DEFAULT_PRECISION,
                     match_rel: float = 1e-25, points: tuple[Fraction, ...] | None = None,
                     binding: Binding | None = None) -> InclusionReport:
    """Recompute f^(n) (or (-1)^n f^(n)) as the partition-term sum over log
    derivatives and check, per point and order: (a) the hypothesis signs hold,
    (b) every term is nonnegative, (c) the total matches the jet derivative.

    Raises NonPositiveValue if f is not strictly positive on the grid.
    """
    grid = grid or GridSpec()
    if binding is None:
        binding = Binding(precision=precision)
    tol = tol or Tolerance.from_precision(binding.precision)
    pts = points if points is not None else grid.points(interval)
    entries: list[InclusionEntry] = []
    with workprec(binding.precision):
        for point in pts:
            f_jet = jet_lift(e, point, max_order, binding=binding)
            f_value = f_jet.coeffs[0]
            if f_value <= 0:
                raise NonPositiveValue(
                    f"subject is not positive at {json_number(point)}: {mp.nstr(f_value, 8)}")
            f_derivs = derivatives_from_jet(f_jet)
            log_derivs = derivatives_from_jet(jet_lift(Expr.ln(e), point, max_order,
                                                       binding=binding))[1:]
            log_scale = max([abs(d) for d in log_derivs], default=mp.mpf(0))
            if variant is InclusionVariant.LCM_TO_CM:
                hypothesis = [(-d if k % 2 == 1 else d) for k, d in enumerate(log_derivs, start=1)]
            else:
                hypothesis = list(log_derivs)
            hyp_ok = all(not tol.violates(h, log_scale) for h in hypothesis)
            for n in range(1, max_order + 1):
                if variant is InclusionVariant.LCM_TO_CM:
                    terms = signed_terms(f_value, hypothesis, n, precision=binding.precision)
                    total = mp.fsum(terms)
                    reference = f_derivs[n] if n % 2 == 0 else -f_derivs[n]
                else:
                    total, terms = exp_of_log(f_value, hypothesis, n, precision=binding.precision)
                    reference = f_derivs[n]
                term_scale = max(abs(t) for t in terms)
                min_term = min(terms)
                terms_ok = not tol.violates(min_term, term_scale)
                diff = abs(total - reference)
                matches = diff <= match_rel * max(abs(total), abs(reference)) or (
                    abs(total) <= tol.eps_abs and abs(reference) <= tol.eps_abs)
                entries.append(InclusionEntry(
                    point=point, order=n, min_term=float(min_term), total=float(total),
                    reference=float(reference),
                    rel_err=float(diff / max(abs(reference), mp.mpf(tol.eps_abs))),
                    hypothesis_ok=hyp_ok, terms_nonnegative=terms_ok, total_matches=matches))
    return InclusionReport(variant, interval, max_order, tuple(entries))
