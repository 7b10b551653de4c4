"""Extended-precision scalars, exact rationals and open intervals.

All numerics run on mpmath under an explicit binary precision (bit count).
Values cross module boundaries either as exact `Fraction`s (parameters,
grid points, interval endpoints) or as `mpf`s produced under a stated
working precision.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from mpmath import mp

from .errors import ConfigError

DEFAULT_PRECISION = 256
MIN_PRECISION = 64

Numeric = Union[int, float, str, Fraction, "mp.mpf"]


def workprec(bits: int):
    """Context manager setting the mpmath working precision in bits."""
    if bits < MIN_PRECISION:
        raise ConfigError(f"precision must be at least {MIN_PRECISION} bits, got {bits}")
    return mp.workprec(bits)


def as_fraction(value: Numeric) -> Fraction:
    """Convert exactly to a rational. Floats and mpfs are binary rationals."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        return Fraction(value)
    if isinstance(value, mp.mpf):
        sign, man, exp, _ = value._mpf_
        if man == 0 and value != 0:
            raise ConfigError(f"cannot convert non-finite value {value!r} to a rational")
        fr = Fraction(int(man)) * Fraction(2) ** exp
        return -fr if sign else fr
    raise TypeError(f"cannot convert {type(value).__name__} to Fraction")


def as_mpf(value: Numeric):
    """Convert to mpf at the *current* working precision."""
    if isinstance(value, mp.mpf):
        return value
    if isinstance(value, Fraction):
        return mp.mpf(value.numerator) / value.denominator
    if isinstance(value, str):
        try:
            return as_mpf(Fraction(value.strip()))  # exact decimals and n/d
        except (ValueError, ZeroDivisionError):
            return mp.mpf(value)  # scientific notation and the rest
    return mp.mpf(value)


def json_number(value) -> float:
    """Lossy-but-deterministic float for report payloads."""
    return float(value)


def fraction_str(q: Fraction) -> str:
    """Exact decimal text when the denominator is 2^a*5^b, else 'n/d'."""
    if q.denominator == 1:
        return str(q.numerator)
    d = q.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{q.numerator}/{q.denominator}"
    k = max(twos, fives)
    scaled = abs(q.numerator) * 10**k // q.denominator
    digits = str(scaled).rjust(k + 1, "0")
    sign = "-" if q < 0 else ""
    return f"{sign}{digits[:-k]}.{digits[-k:]}"


_INTERVAL_RE = re.compile(r"^\(\s*([^,\s]+)\s*,\s*([^,\s]+)\s*\)$")


@dataclass(frozen=True)
class Interval:
    """Open interval with exact rational or infinite endpoints.

    `lo is None` means -inf, `hi is None` means +inf.
    """

    lo: Fraction | None
    hi: Fraction | None

    def __post_init__(self):
        if self.lo is not None and self.hi is not None and self.lo >= self.hi:
            raise ConfigError(f"empty interval {self.display()}")

    @classmethod
    def parse(cls, text: str) -> "Interval":
        m = _INTERVAL_RE.match(text.strip())
        if not m:
            raise ConfigError(f"interval must look like '(lo,hi)', got {text!r}")
        return cls(_endpoint(m.group(1), low=True), _endpoint(m.group(2), low=False))

    def contains(self, x: Fraction) -> bool:
        if self.lo is not None and x <= self.lo:
            return False
        if self.hi is not None and x >= self.hi:
            return False
        return True

    def display(self) -> str:
        lo = "-inf" if self.lo is None else fraction_str(self.lo)
        hi = "inf" if self.hi is None else fraction_str(self.hi)
        return f"({lo},{hi})"


def _endpoint(token: str, low: bool) -> Fraction | None:
    t = token.strip().lower()
    if t in ("inf", "+inf") and not low:
        return None
    if t == "-inf" and low:
        return None
    if t in ("inf", "+inf", "-inf"):
        raise ConfigError(f"endpoint {token!r} on the wrong side of the interval")
    try:
        return Fraction(t)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad interval endpoint {token!r}") from exc
