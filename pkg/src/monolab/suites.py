"""Theorem-verification suites: named pass/fail assertions over fixed cases.

Shared by the CLI `verify-theorems` command, the HTTP endpoint and the
acceptance tests, so all three report identical results. Each suite returns
a list of assertions; an assertion is a (name, passed, detail) triple and
the order is deterministic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp

from .core import DEFAULT_PRECISION, Interval, fraction_str, workprec
from .expr import Expr, parse, make_power_expr
from .jets import derivatives_from_jet, jet_lift
from .mono import GridSpec, InclusionVariant, check_class, verify_inclusion
from .powerexp import ParamPoint, classify, log_deriv1, log_deriv2, shifted_cm_check


@dataclass(frozen=True)
class Assertion:
    name: str
    passed: bool
    detail: str

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def thin_points(points, count: int = 5):
    """Pick `count` roughly evenly spaced entries, always keeping both ends."""
    if len(points) <= count:
        return tuple(points)
    last = len(points) - 1
    idx = sorted({round(i * last / (count - 1)) for i in range(count)})
    return tuple(points[i] for i in idx)


# ---------------------------------------------------------------------------
# Term-sign mechanism behind the two log-class inclusions
# ---------------------------------------------------------------------------

def lam_inclusion_cases():
    f_neg = make_power_expr(-1, 2)
    f_pos = make_power_expr(1, 0)
    return [
        ("exp(x) on (-1,1)", parse("exp(x)"), Interval.parse("(-1,1)")),
        ("(1-1/x)^(x+2) on (-inf,0)", f_neg.expr, f_neg.lower_interval),
        ("(1+1/x)^x on (-inf,-1)", f_pos.expr, f_pos.lower_interval),
    ]


def lcm_inclusion_cases():
    f_pos = make_power_expr(1, 1)
    f_neg = make_power_expr(-1, Fraction(-3, 2))
    return [
        ("exp(-x) on (0,inf)", parse("exp(-x)"), Interval.parse("(0,inf)")),
        ("(1+1/x)^(x+1) on (0,inf)", f_pos.expr, f_pos.upper_interval),
        ("(1-1/x)^(x-1.5) on (1,inf)", f_neg.expr, f_neg.upper_interval),
    ]


def term_mechanism_suite(variant: InclusionVariant, max_order: int = 6,
                         precision: int = DEFAULT_PRECISION, match_rel: float = 1e-25,
                         n_points: int = 5) -> list[Assertion]:
    """Per case: every partition term respects the hypothesis sign and the
    term totals reproduce the jet derivatives."""
    cases = (lam_inclusion_cases() if variant is InclusionVariant.LAM_TO_AM
             else lcm_inclusion_cases())
    grid = GridSpec()
    out: list[Assertion] = []
    for label, expr, interval in cases:
        points = thin_points(grid.points(interval), n_points)
        report = verify_inclusion(expr, interval, variant, max_order=max_order,
                                  precision=precision, match_rel=match_rel, points=points)
        worst_term = min(e.min_term for e in report.entries)
        worst_rel = max(e.rel_err for e in report.entries)
        signs_ok = all(e.hypothesis_ok and e.terms_nonnegative for e in report.entries)
        match_ok = all(e.total_matches for e in report.entries)
        out.append(Assertion(f"term-signs[{label}]", signs_ok,
                             f"min term {worst_term:.3e} over {len(points)} points, "
                             f"orders 1..{max_order}"))
        out.append(Assertion(f"total-matches[{label}]", match_ok,
                             f"max rel err {worst_rel:.3e} (target {match_rel:.0e})"))
    return out


# ---------------------------------------------------------------------------
# Classification concordance: closed-form conditions versus numeric sweeps
# ---------------------------------------------------------------------------

def concordance_grid(alphas=(Fraction(1, 2), Fraction(1), Fraction(2),
                             Fraction(-1, 2), Fraction(-1), Fraction(-2)),
                     step: Fraction = Fraction(1, 4),
                     margin: Fraction = Fraction(3, 2),
                     exclusion: Fraction = Fraction(1, 10)):
    """(alpha, beta) pairs with beta in [alpha-margin, alpha/2+margin],
    skipping points within `exclusion` of the lines beta=alpha, beta=alpha/2
    and beta=0 where the conditions change truth value."""
    pairs = []
    for a in alphas:
        lo = a - margin
        hi = a / 2 + margin
        b = lo
        while b <= hi:
            if (abs(b - a) >= exclusion and abs(b - a / 2) >= exclusion
                    and abs(b) >= exclusion):
                pairs.append((a, b))
            b += step
    return pairs


def concordance_suite(max_order: int = 8, precision: int = DEFAULT_PRECISION,
                      grid: GridSpec | None = None, **grid_kwargs) -> list[Assertion]:
    """check_class must return `consistent` exactly where the closed-form
    condition holds and `refuted` where it fails, for every applicable
    (subject, class, interval) case at every grid parameter pair."""
    grid = grid or GridSpec()
    pairs = concordance_grid(**grid_kwargs)
    by_alpha: dict[Fraction, list[str]] = {}
    counts: dict[Fraction, int] = {}
    for a, b in pairs:
        point = ParamPoint(a, b)
        report = classify(point)
        for entry in report.entries:
            if not entry.applicable:
                continue
            subject = make_power_expr(a, b, reciprocal=(entry.subject == "reciprocal"))
            verdict = check_class(subject.expr, entry.interval, entry.klass,
                                  max_order=max_order, grid=grid, precision=precision)
            expected = "consistent" if entry.holds else "refuted"
            counts[a] = counts.get(a, 0) + 1
            if verdict.verdict != expected:
                by_alpha.setdefault(a, []).append(
                    f"beta={fraction_str(b)} item{entry.item} {entry.subject}: "
                    f"expected {expected}, got {verdict.verdict}")
    out = []
    for a in sorted(counts, key=lambda q: (q < 0, abs(q))):
        bad = by_alpha.get(a, [])
        out.append(Assertion(
            f"concordance[alpha={fraction_str(a)}]", not bad,
            f"{counts[a]} case checks" if not bad else "; ".join(bad)))
    return out


# ---------------------------------------------------------------------------
# Shifted complete monotonicity and the limit at infinity
# ---------------------------------------------------------------------------

SHIFT_POINTS = ((Fraction(1), Fraction(1)), (Fraction(1), Fraction(-1)),
                (Fraction(-1), Fraction(-2)))


def shift_suite(points=SHIFT_POINTS, max_order: int = 8,
                precision: int = DEFAULT_PRECISION,
                limit_rel: float = 1e-5) -> list[Assertion]:
    out: list[Assertion] = []
    for a, b in points:
        report = shifted_cm_check(ParamPoint(a, b), max_order=max_order, precision=precision)
        tag = f"alpha={fraction_str(a)},beta={fraction_str(b)}"
        for entry in report.entries:
            out.append(Assertion(
                f"shifted-cm[{tag}][{entry.subject}]", entry.matches,
                f"{entry.condition} is {entry.condition_holds}, "
                f"sweep says {entry.verdict.verdict}"))
        out.append(Assertion(
            f"limit-at-infinity[{tag}]", report.limit_rel_err <= limit_rel,
            f"rel err {report.limit_rel_err:.3e} vs e^alpha (target {limit_rel:.0e})"))
    return out


# ---------------------------------------------------------------------------
# Random closed-form versus jet spot checks
# ---------------------------------------------------------------------------

def spot_check_suite(seed: int = 0, count: int = 20,
                     precision: int = DEFAULT_PRECISION,
                     match_rel: float = 1e-30) -> list[Assertion]:
    """Random admissible (alpha, beta, x): the closed forms of the first two
    log derivatives must match jet differentiation of ln F."""
    rng = random.Random(seed)
    worst = 0.0
    with workprec(precision):
        for _ in range(count):
            a = Fraction(rng.choice([s for s in range(-12, 13) if s != 0]), 4)
            b = Fraction(rng.randint(-12, 12), 4)
            offset = Fraction(rng.randint(1, 9)) * Fraction(10) ** rng.randint(-2, 2)
            if rng.random() < 0.5:
                x = max(Fraction(0), -a) + offset
            else:
                x = min(Fraction(0), -a) - offset
            family = make_power_expr(a, b)
            point = ParamPoint(a, b)
            jet = jet_lift(Expr.ln(family.expr), x, 2, precision=precision)
            derivs = derivatives_from_jet(jet)
            for closed, reference in ((log_deriv1(point, x, precision), derivs[1]),
                                      (log_deriv2(point, x, precision), derivs[2])):
                scale = max(abs(reference), abs(closed), mp.mpf(1))
                worst = max(worst, float(abs(closed - reference) / scale))
    return [Assertion("closed-form-vs-jets", worst <= match_rel,
                      f"worst rel err {worst:.3e} over {count} random points "
                      f"(seed {seed}, target {match_rel:.0e})")]


# ---------------------------------------------------------------------------
# Combined runner
# ---------------------------------------------------------------------------

def run_theorem_suites(seed: int = 0, precision: int = DEFAULT_PRECISION,
                       max_order: int = 8, include_concordance: bool = True) -> dict:
    assertions: list[Assertion] = []
    assertions += term_mechanism_suite(InclusionVariant.LAM_TO_AM, precision=precision)
    assertions += term_mechanism_suite(InclusionVariant.LCM_TO_CM, precision=precision)
    if include_concordance:
        assertions += concordance_suite(max_order=max_order, precision=precision)
    assertions += shift_suite(max_order=max_order, precision=precision)
    assertions += spot_check_suite(seed=seed, precision=precision)
    failed = [a for a in assertions if not a.passed]
    return {
        "kind": "theorem_report",
        "seed": seed,
        "precision": precision,
        "assertions": [a.to_dict() for a in assertions],
        "failed": len(failed),
        "passed": not failed,
    }
