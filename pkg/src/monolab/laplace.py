"""Quadrature validation of integral identities and Laplace-type synthesis.

Integrals over [0, inf) of smooth exponentially-decaying integrands are
truncated at a T where a crude polynomial-times-exponential tail bound
drops below 2^(-precision/2), then computed by composite Gauss-Legendre
panels, doubling the panel count until two successive values agree to the
convergence target. Nodes and weights are generated at working precision
by Newton iteration on the Legendre recurrence and cached per
(node count, precision).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from mpmath import mp

from .core import DEFAULT_PRECISION, Numeric, as_fraction, as_mpf, workprec
from .errors import BranchError, InvalidParameter, QuadratureNonConvergence
from .expr import Expr
from .powerexp import ParamPoint, log_deriv2, p_kernel, q_kernel

GL_NODES = 16


@lru_cache(maxsize=None)
def _gl_nodes(n: int, precision: int):
    """Gauss-Legendre nodes/weights on [-1,1] at the given bit precision.

    Newton iteration on the Legendre three-term recurrence from the usual
    cosine initial guesses; only the positive half is computed (n even).
    """
    if n % 2:
        raise ValueError("node count must be even")
    with workprec(precision + 32):
        nodes = []
        weights = []
        for i in range(1, n // 2 + 1):
            x = mp.cos(mp.pi * (i - mp.mpf(1) / 4) / (n + mp.mpf(1) / 2))
            dp = mp.mpf(1)
            for _ in range(100):
                p0, p1 = mp.mpf(1), x
                for k in range(2, n + 1):
                    p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
                dp = n * (x * p1 - p0) / (x**2 - 1)
                dx = p1 / dp
                x -= dx
                if abs(dx) < mp.ldexp(1, -(precision + 16)):
                    break
            nodes.append(x)  # descending positive roots
            weights.append(2 / ((1 - x**2) * dp**2))
        xs = [-v for v in nodes] + list(reversed(nodes))
        ws = list(weights) + list(reversed(weights))
        return tuple(xs), tuple(ws)


def _integrate_panels(f, a, b, panels: int, precision: int):
    xs, ws = _gl_nodes(GL_NODES, precision)
    with workprec(precision):
        av, bv = as_mpf(a), as_mpf(b)
        h = (bv - av) / panels
        half = h / 2
        acc = []
        for p in range(panels):
            mid = av + h * p + half
            acc.append(mp.fsum(w * f(mid + half * x) for x, w in zip(xs, ws)))
        return half * mp.fsum(acc)


def integrate_to_convergence(f, a, b, precision: int = DEFAULT_PRECISION,
                             rel_tol: float = 1e-13, start_panels: int = 8,
                             max_doublings: int = 12):
    """Composite Gauss-Legendre with panel doubling until two successive
    refinements agree to rel_tol. Returns (value, panels)."""
    with workprec(precision):
        panels = start_panels
        prev = _integrate_panels(f, a, b, panels, precision)
        for _ in range(max_doublings):
            panels *= 2
            cur = _integrate_panels(f, a, b, panels, precision)
            scale = max(abs(cur), abs(prev), mp.ldexp(1, -(precision // 2)))
            if abs(cur - prev) <= rel_tol * scale:
                return cur, panels
            prev = cur
    raise QuadratureNonConvergence(
        f"no convergence to rel {rel_tol} after {panels} panels on [{a}, {b}]")


def exp_tail_cutoff(rate, poly_degree: int, precision: int, scale=1):
    """T such that scale * T^deg * e^(-rate*T) < 2^(-precision/2)."""
    with workprec(precision):
        c = as_mpf(rate)
        if c <= 0:
            raise InvalidParameter(f"decay rate must be positive, got {mp.nstr(c, 8)}")
        target = (precision / 2 + 8) * mp.ln(2) + mp.ln(as_mpf(scale) + 1)
        t = (target + 8) / c
        for _ in range(6):  # fixed point for the polynomial factor
            t = (target + poly_degree * mp.ln(max(t, mp.e))) / c
        return t


# ---------------------------------------------------------------------------
# Gamma via Spouge's series (a Lanczos-family scheme whose coefficients are
# computable at any working precision)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _spouge_coefficients(a: int, precision: int):
    with workprec(precision + 64):
        coeffs = [mp.sqrt(2 * mp.pi)]
        for k in range(1, a):
            c = ((-1) ** (k - 1)) * mp.power(a - k, k - mp.mpf(1) / 2) * mp.exp(a - k)
            c /= math.factorial(k - 1)
            coeffs.append(c)
        return tuple(coeffs)


def gamma_value(r: Numeric, precision: int = DEFAULT_PRECISION):
    """Gamma(r) for r > 0 by Spouge's formula.

    Gamma(z+1) = (z+a)^(z+1/2) * e^(-(z+a)) * (c_0 + sum_k c_k/(z+k)) with
    relative error below a^(-1/2) * (2*pi)^(-(a+1/2)); the parameter a is
    chosen from the requested precision. The alternating series cancels
    heavily (coefficients reach ~e^(a/2) while the sum is O(1)), so the
    evaluation carries generous guard bits.
    """
    guard = max(128, precision // 2)
    with workprec(precision + guard):
        rv = as_mpf(r)
        if rv <= 0:
            raise InvalidParameter(f"gamma_value requires r > 0, got {mp.nstr(rv, 8)}")
        a = int(0.40 * (precision + guard)) + 3
        coeffs = _spouge_coefficients(a, precision + guard)
        z = rv - 1
        series = coeffs[0] + mp.fsum(coeffs[k] / (z + k) for k in range(1, a))
        value = mp.power(z + a, z + mp.mpf(1) / 2) * mp.exp(-(z + a)) * series
    with workprec(precision):
        return +value


# ---------------------------------------------------------------------------
# Identity 1/x^r = (1/Gamma(r)) * integral_0^inf t^(r-1) e^(-x t) dt
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IdentityCheck:
    lhs: float
    rhs: float
    rel_err: float
    label: str

    def to_dict(self) -> dict:
        return {"label": self.label, "lhs": self.lhs, "rhs": self.rhs, "rel_err": self.rel_err}


def _power_substitution(r: Fraction) -> int:
    # t = s^d turns t^(r-1) dt into d*s^(d*r-1) ds; choosing d as the
    # denominator of r makes the exponent an integer, removing the endpoint
    # singularity for fractional r.
    d = r.limit_denominator(32).denominator
    return d if d <= 32 else 1


def power_identity_check(x: Numeric, r: Numeric, precision: int = DEFAULT_PRECISION) -> IdentityCheck:
    """Check 1/x^r against its Laplace-integral form (x > 0, r > 0)."""
    xf = as_fraction(x)
    rf = as_fraction(r)
    if xf <= 0 or rf <= 0:
        raise InvalidParameter("power_identity_check needs x > 0 and r > 0")
    with workprec(precision):
        xv, rv = as_mpf(xf), as_mpf(rf)
        lhs = mp.power(xv, -rv)
        T = exp_tail_cutoff(xv, max(0, math.ceil(float(rf) - 1)), precision)
        d = _power_substitution(rf)
        if d == 1:
            def integrand(t):
                return mp.power(t, rv - 1) * mp.exp(-xv * t)
            upper = T
        else:
            de = mp.mpf(d)

            def integrand(s):
                return de * mp.power(s, de * rv - 1) * mp.exp(-xv * mp.power(s, de))
            upper = mp.power(T, 1 / de)
        integral, _ = integrate_to_convergence(integrand, 0, upper, precision)
        rhs = integral / gamma_value(rf, precision)
        rel = abs(lhs - rhs) / abs(lhs)
    return IdentityCheck(float(lhs), float(rhs), float(rel), f"1/x^r at x={xf}, r={rf}")


# ---------------------------------------------------------------------------
# Integral representations of the second log derivative of the power family
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntegralCheck:
    integral: float
    closed_form: float
    rel_err: float
    branch: str  # "upper" (x > max(0,-a)) | "lower" (x < min(0,-a))
    panels: int

    def to_dict(self) -> dict:
        return {
            "integral": self.integral,
            "closed_form": self.closed_form,
            "rel_err": self.rel_err,
            "branch": self.branch,
            "panels": self.panels,
        }


def log_deriv2_integral(p: ParamPoint, x: Numeric, precision: int = DEFAULT_PRECISION) -> IntegralCheck:
    """Quadrature of the integral representation of [ln F]'' versus the
    closed form.

    Upper branch (x > max(0,-a)):
        integral_0^inf (b - a*q(a*t)) * t*(e^(a*t)-1) * e^(-(x+a)t) dt
    Lower branch (x < min(0,-a)):
        integral_0^inf (b + a*p(a*t)) * t*(1-e^(a*t)) * e^(x*t) dt
    """
    xf = as_fraction(x)
    a, b = p.alpha, p.beta
    if xf > max(Fraction(0), -a):
        branch = "upper"
    elif xf < min(Fraction(0), -a):
        branch = "lower"
    else:
        raise BranchError(
            f"x = {xf} is admissible for neither branch at alpha = {a}")
    with workprec(precision):
        av, bv, xv = as_mpf(a), as_mpf(b), as_mpf(xf)
        closed = log_deriv2(p, xf, precision)
        kernel_scale = abs(bv) + abs(av) + 1
        if branch == "upper":
            rate = xv + min(av, 0)

            def integrand(t):
                weight = bv - av * q_kernel(av * t, precision)
                return weight * t * mp.expm1(av * t) * mp.exp(-(xv + av) * t)
        else:
            rate = -xv - max(av, 0)

            def integrand(t):
                weight = bv + av * p_kernel(av * t, precision)
                return weight * t * (-mp.expm1(av * t)) * mp.exp(xv * t)
        T = exp_tail_cutoff(rate, 2, precision, scale=kernel_scale)
        value, panels = integrate_to_convergence(integrand, 0, T, precision)
        scale = max(abs(closed), abs(value), mp.ldexp(1, -(precision // 2)))
        rel = abs(value - closed) / scale
    return IntegralCheck(float(value), float(closed), float(rel), branch, panels)


# ---------------------------------------------------------------------------
# Forward synthesis of completely monotonic functions from discrete measures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiscreteMeasure:
    """Finite nonnegative measure: atoms (t_j >= 0, w_j > 0), t_j ascending."""

    atoms: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        ts = [t for t, _ in self.atoms]
        if any(t < 0 for t in ts):
            raise InvalidParameter("atom locations must be nonnegative")
        if any(w <= 0 for _, w in self.atoms):
            raise InvalidParameter("atom weights must be positive")
        if ts != sorted(ts) or len(set(ts)) != len(ts):
            raise InvalidParameter("atom locations must be distinct and ascending")

    @classmethod
    def of(cls, pairs) -> "DiscreteMeasure":
        atoms = sorted((as_fraction(t), as_fraction(w)) for t, w in pairs)
        return cls(tuple(atoms))


def bernstein_synthesize(m: DiscreteMeasure) -> Expr:
    """The Laplace transform of the measure: sum_j w_j * e^(-t_j*x).

    Atoms at t = 0 contribute plain constants. The result is completely
    monotonic on (0, inf) by construction.
    """
    terms: list[Expr] = []
    for t, w in m.atoms:
        if t == 0:
            terms.append(Expr.const(w))
            continue
        inner = Expr.var() if t == 1 else Expr.mul(Expr.const(t), Expr.var())
        e = Expr.exp(Expr.neg(inner))
        terms.append(e if w == 1 else Expr.mul(Expr.const(w), e))
    if not terms:
        return Expr.const(0)
    out = terms[0]
    for t in terms[1:]:
        out = Expr.add(out, t)
    return out


__all__ = [
    "DiscreteMeasure",
    "IdentityCheck",
    "IntegralCheck",
    "bernstein_synthesize",
    "exp_tail_cutoff",
    "gamma_value",
    "integrate_to_convergence",
    "log_deriv2_integral",
    "power_identity_check",
]
