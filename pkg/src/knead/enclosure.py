"""Closed intervals with exact rational endpoints.

Transcendental operations (log, ratios of logs) go through mpmath's interval
context, whose endpoints are binary floats with directed rounding; those are
converted back to exact ``Fraction`` values so nothing downstream ever sees a
rounded-to-nearest float.
"""
from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from mpmath import iv
from mpmath.libmp import to_rational


def as_fraction(x) -> Fraction:
    """Exact conversion; strings may be ``"p/q"`` or plain decimals."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        # go through repr so 1e-3 means 1/1000, not the nearest double
        return Fraction(repr(x))
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


@dataclass(frozen=True)
class Enclosure:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = as_fraction(self.lo), as_fraction(self.hi)
        if lo > hi:
            raise ValueError(f"empty enclosure [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x) -> Enclosure:
        x = as_fraction(x)
        return cls(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __contains__(self, x) -> bool:
        if isinstance(x, Enclosure):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, float):
            x = Fraction(x)
        return self.lo <= as_fraction(x) <= self.hi

    def overlaps(self, other: Enclosure) -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def hull(self, other: Enclosure) -> Enclosure:
        return Enclosure(min(self.lo, other.lo), max(self.hi, other.hi))

    def clamp(self, lo=None, hi=None) -> Enclosure:
        """Intersect with known a-priori bounds on the true value."""
        a, b = self.lo, self.hi
        if lo is not None:
            a, b = max(a, as_fraction(lo)), max(b, as_fraction(lo))
        if hi is not None:
            a, b = min(a, as_fraction(hi)), min(b, as_fraction(hi))
        return Enclosure(a, b)

    def __add__(self, other):
        o = _coerce(other)
        return Enclosure(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce(other)
        return Enclosure(self.lo - o.hi, self.hi - o.lo)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        o = _coerce(other)
        p = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Enclosure(min(p), max(p))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce(other)
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("divisor enclosure contains zero")
        return self * Enclosure(1 / o.hi, 1 / o.lo)

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def __float__(self):
        return float(self.mid)

    def to_interval(self, prec: int = 128):
        """mpmath interval guaranteed to contain this enclosure."""
        with _workprec(prec):
            lo = iv.mpf(self.lo.numerator) / self.lo.denominator
            hi = iv.mpf(self.hi.numerator) / self.hi.denominator
            return iv.mpf([lo.a, hi.b])

    @classmethod
    def from_interval(cls, x) -> Enclosure:
        a, b = x._mpi_
        return cls(_mpf_to_fraction(a), _mpf_to_fraction(b))

    def decimal(self, digits: int = 18) -> tuple[str, str]:
        """Outward-rounded decimal strings (lo rounded down, hi rounded up)."""
        return _dec(self.lo, digits, math.floor), _dec(self.hi, digits, math.ceil)

    def __repr__(self):
        lo, hi = self.decimal(12)
        return f"Enclosure[{lo}, {hi}]"


@contextmanager
def _workprec(prec: int):
    # the interval context has no workprec() of its own
    saved = iv.prec
    iv.prec = max(prec, saved)
    try:
        yield
    finally:
        iv.prec = saved


def _coerce(x) -> Enclosure:
    return x if isinstance(x, Enclosure) else Enclosure.point(x)


def _mpf_to_fraction(raw) -> Fraction:
    p, q = to_rational(raw)
    return Fraction(int(p), int(q))


def _dec(x: Fraction, digits: int, rnd) -> str:
    scale = 10 ** digits
    n = rnd(x * scale)
    sign = "-" if n < 0 else ""
    n = abs(n)
    whole, frac = divmod(n, scale)
    s = f"{sign}{whole}.{frac:0{digits}d}".rstrip("0")
    return s[:-1] if s.endswith(".") else s


def log(x: Enclosure, prec: int = 128) -> Enclosure:
    if x.lo <= 0:
        raise ValueError("log of a non-positive enclosure")
    with _workprec(prec):
        return Enclosure.from_interval(iv.log(x.to_interval(prec)))


def log_ratio(num: Enclosure, den: Enclosure, prec: int = 128) -> Enclosure:
    """Enclosure of ln(num)/ln(den) for num, den > 1."""
    if num.lo <= 1 or den.lo <= 1:
        raise ValueError("log_ratio needs both arguments above 1")
    with _workprec(prec):
        return Enclosure.from_interval(iv.log(num.to_interval(prec)) / iv.log(den.to_interval(prec)))


def log_int(n: int, prec: int = 128) -> Enclosure:
    return log(Enclosure.point(n), prec)
