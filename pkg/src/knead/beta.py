"""Greedy beta-expansions of 1 and the kneading <-> beta correspondence.

Every beta is carried as an :class:`Enclosure`; digits are emitted only when
the whole enclosure agrees on them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .enclosure import Enclosure, as_fraction, log_ratio
from .seq import Seq, is_kneading, shift

__all__ = [
    "BetaError",
    "PrecisionError",
    "DegenerateError",
    "NotKneadingError",
    "EmptyCaseError",
    "BetaShiftSpec",
    "beta_expand_one",
    "beta_from_kneading",
    "parry_bound",
    "parry_membership",
    "holder_exponent",
    "lower_bound_family",
    "dimension_lower_bound_ratio",
    "FAMILIES",
]


class BetaError(ValueError):
    code = "beta_error"


class PrecisionError(BetaError):
    code = "precision"

    def __init__(self, msg, index=None):
        super().__init__(msg)
        self.index = index


class OutOfRangeError(BetaError):
    code = "out_of_range"


class DegenerateError(BetaError):
    code = "degenerate"


class NotKneadingError(BetaError):
    code = "not_kneading"


class EmptyCaseError(BetaError):
    code = "empty_case"


@dataclass(frozen=True)
class BetaShiftSpec:
    beta: Enclosure
    digits: tuple[int, ...]
    truncated: bool

    @property
    def one_expansion(self) -> Seq:
        m = max(1, math.floor(self.beta.hi))
        return Seq(m, self.digits)


def beta_expand_one(beta: Enclosure, n: int) -> BetaShiftSpec:
    """First ``n`` greedy digits of 1 in base beta.

    The remainder is tracked as a rational interval; a digit is emitted only
    when beta * remainder has the same integer part over the whole interval.
    ``truncated`` is False exactly when the remainder became 0 (a finite
    expansion) within ``n`` digits.
    """
    if beta.lo <= 1:
        raise OutOfRangeError(f"beta must exceed 1, got lower end {beta.lo}")
    t_lo = t_hi = Fraction(1)
    digits = []
    finished = False
    for i in range(1, n + 1):
        if finished:
            digits.append(0)
            continue
        x_lo, x_hi = beta.lo * t_lo, beta.hi * t_hi
        q = math.floor(x_lo)
        if math.floor(x_hi) != q:
            raise PrecisionError(
                f"digit {i} undecidable: beta*t spans [{float(x_lo)}, {float(x_hi)}]", index=i
            )
        digits.append(q)
        t_lo, t_hi = x_lo - q, x_hi - q
        if t_hi == 0:
            finished = True
    return BetaShiftSpec(beta, tuple(digits), truncated=not finished)


def _g(s: Seq, beta: Fraction) -> Fraction:
    """sum s_i beta^-i - 1, summing the periodic tail in closed form."""
    r = 1 / beta
    total = Fraction(0)
    p = Fraction(1)
    for d in s.pre:
        p *= r
        total += d * p
    if s.per:
        head = p
        q = Fraction(0)
        pp = Fraction(1)
        for d in s.per:
            pp *= r
            q += d * pp
        total += head * q / (1 - pp)
    return total - 1


def beta_from_kneading(s: Seq, tol=Fraction(1, 10 ** 12)) -> Enclosure:
    """The unique beta > 1 with 1_beta = s, to width ``tol``, by bisection."""
    tol = as_fraction(tol)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not is_kneading(s):
        raise NotKneadingError(f"{s} is not a kneading sequence")
    if s.is_finite and sum(s.pre) <= 1:
        raise DegenerateError(f"{s} forces beta <= 1")
    s1 = s.digit(1)
    lo, hi = Fraction(max(1, s1)), Fraction(s1 + 1)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        v = _g(s, mid)
        if v > 0:
            lo = mid
        elif v < 0:
            hi = mid
        else:
            return Enclosure.point(mid)
    return Enclosure(lo, hi)


def parry_bound(one_exp: Seq) -> Seq:
    """1_beta itself, or (i_1 ... i_{M-1} (i_M - 1))^inf when 1_beta is finite."""
    if one_exp.is_finite:
        if not one_exp.pre:
            raise BetaError("0^inf is not an expansion of 1")
        w = one_exp.pre
        return Seq(one_exp.m, (), w[:-1] + (w[-1] - 1,))
    return one_exp


def parry_membership(s: Seq, one_exp: Seq, strict: bool = False) -> bool:
    """Is ``s`` in the beta-shift whose expansion of 1 is ``one_exp``?

    Default is the closure reading: sigma^n(s) <= bound for all n >= 0, which
    puts e.g. (10)^inf in the golden-mean shift.  ``strict=True`` applies
    sigma^n(s) < bound for n >= 1 literally.
    """
    if s.m != one_exp.m:
        raise ValueError("alphabet mismatch")
    if not is_kneading(one_exp):
        raise BetaError(f"{one_exp} is not a valid expansion of 1")
    bound = parry_bound(one_exp)
    if strict:
        return all(shift(s, n) < bound for n in range(1, s.tail_count() + 1))
    return all(shift(s, n) <= bound for n in range(0, s.tail_count()))


def holder_exponent(beta1: Enclosure, beta2: Enclosure) -> Enclosure:
    """Enclosure of ln(beta1)/ln(beta2), for 1 < beta1 <= beta2."""
    if beta1.lo <= 1 or beta2.lo <= 1:
        raise ValueError("holder exponent needs beta1, beta2 > 1")
    if beta1.lo > beta2.hi:
        raise ValueError("holder exponent needs beta1 <= beta2")
    if beta1 == beta2 and beta1.width == 0:
        return Enclosure(1, 1)
    return log_ratio(beta1, beta2).clamp(hi=1)


FAMILIES = ("full", "left_c", "interval_cd")


def lower_bound_family(kind: str, c: Seq | None, d: Seq | None, k: int, m: int | None = None) -> Seq:
    """k-th witness kneading sequence from the full-dimension arguments.

    * ``full``: m^k 0^inf (all kneading sequences; 1^k 0^inf when m = 1).
    * ``left_c``: sequences below the kneading sequence ``c``:
      (c1-1)^k 0^inf if c1 > 1, (10)^k 0^inf if c1 = c2 = 1,
      (1 0^(l-1))^k 0^inf if c1 = 1 and the next 1 is at position l > 2.
    * ``interval_cd``: sequences in (c, d] for kneading d:
      (c1+1)^k c1^inf if d1 >= c1 + 2, otherwise the two d1 = c1 + 1 cases.
    """
    if k < 1:
        raise ValueError("family index k must be >= 1")
    if kind == "full":
        if m is None:
            m = c.m if c is not None else 1
        return Seq(m, (m,) * k)
    if kind == "left_c":
        if c is None:
            raise ValueError("left_c family needs c")
        if not is_kneading(c):
            raise NotKneadingError(f"{c} is not kneading")
        m, c1 = c.m, c.digit(1)
        if c1 > 1:
            w = Seq(m, (c1 - 1,) * k)
        elif c == Seq(m, (1,)):
            raise EmptyCaseError("c = 10^inf: only the single kneading sequence c lies below")
        else:
            ell = next(i for i in range(2, c.tail_count() + 2) if c.digit(i) != 0)
            w = Seq(m, ((1,) + (0,) * (ell - 1)) * k)
        if not (is_kneading(w) and w < c):  # pragma: no cover
            raise AssertionError(f"left_c witness {w} not a kneading sequence below {c}")
        return w
    if kind == "interval_cd":
        if c is None or d is None:
            raise ValueError("interval_cd family needs c and d")
        if c.m != d.m:
            raise ValueError("alphabet mismatch")
        if not is_kneading(d):
            raise NotKneadingError(f"{d} is not kneading")
        m, c1, d1 = c.m, c.digit(1), d.digit(1)
        if d1 <= c1:
            raise EmptyCaseError("d1 = c1: no kneading sequence lies in (c, d]")
        if d1 >= c1 + 2:
            w = Seq(m, (c1 + 1,) * k, (c1,))
        else:
            top = c1 + 1
            j0 = next((i for i in range(2, d.tail_count() + 2) if d.digit(i) == top), None)
            if j0 is None:
                raise EmptyCaseError(f"d <= ({top}){c1}^inf: the set of kneading points is empty")
            if j0 == 2:
                run = next(i for i in range(1, d.tail_count() + 2) if d.digit(i) != top) - 1
                w = Seq(m, (top,) * (run - 1) + (c1,) * k + (top,), (c1,))
            else:
                w = Seq(m, (top,) + (c1,) * (j0 - 2 + k) + (top,), (c1,))
        if not (is_kneading(w) and c < w <= d):
            raise EmptyCaseError(f"witness {w} is not a kneading sequence in (c, d]")
        return w
    raise ValueError(f"unknown family {kind!r}; expected one of {FAMILIES}")


def dimension_lower_bound_ratio(kind, c, d, k, tol=Fraction(1, 10 ** 20), m=None) -> Enclosure:
    """ln(beta_{k-1}) / ln(beta_k) for consecutive witnesses of a family.

    The two betas are taken in increasing order, so the result is always a
    value in (0, 1]; for families whose witnesses decrease in k this is the
    ratio with numerator and denominator swapped.
    """
    if k < 2:
        raise ValueError("the ratio needs k >= 2")
    b_prev = beta_from_kneading(lower_bound_family(kind, c, d, k - 1, m), tol)
    b_cur = beta_from_kneading(lower_bound_family(kind, c, d, k, m), tol)
    if b_prev.lo > b_cur.hi:
        b_prev, b_cur = b_cur, b_prev
    return holder_exponent(b_prev, b_cur)
