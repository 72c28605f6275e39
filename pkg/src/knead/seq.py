"""Eventually periodic symbol sequences over {0, ..., m}.

A :class:`Seq` is stored as ``pre`` followed by ``per`` repeated forever.  An
empty ``per`` means the sequence ends in ``0^inf``, so finite words such as
``110^inf`` are first-class values.  Construction always canonicalises, which
makes ``==`` structural.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from math import lcm
from typing import Sequence

__all__ = [
    "Seq",
    "Word",
    "parse_seq",
    "format_seq",
    "lex_compare",
    "shift",
    "tilde_invert",
    "is_kneading",
    "minimal_kneading_above",
    "left_endpoint_stability",
    "Stability",
]


def _primitive_root(w: tuple[int, ...]) -> tuple[int, ...]:
    n = len(w)
    for p in range(1, n + 1):
        if n % p == 0 and w[:p] * (n // p) == w:
            return w[:p]
    return w


def _check_symbols(symbols, m):
    for s in symbols:
        if not 0 <= s <= m:
            raise ValueError(f"symbol {s} out of range for m={m}")


@total_ordering
@dataclass(frozen=True, eq=True)
class Seq:
    m: int
    pre: tuple[int, ...] = ()
    per: tuple[int, ...] = ()

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("alphabet bound m must be >= 1")
        pre, per = tuple(int(s) for s in self.pre), tuple(int(s) for s in self.per)
        _check_symbols(pre + per, self.m)
        per = _primitive_root(per)
        if per == (0,):
            per = ()
        if per:
            while pre and pre[-1] == per[-1]:
                per = per[-1:] + per[:-1]
                pre = pre[:-1]
        else:
            while pre and pre[-1] == 0:
                pre = pre[:-1]
        object.__setattr__(self, "pre", pre)
        object.__setattr__(self, "per", per)

    @property
    def cycle(self) -> tuple[int, ...]:
        """The repeating block, with the implicit 0^inf made explicit."""
        return self.per or (0,)

    @property
    def is_finite(self) -> bool:
        """True when the sequence ends in 0^inf."""
        return not self.per

    def digit(self, i: int) -> int:
        """1-based digit access."""
        if i < 1:
            raise IndexError("digits are indexed from 1")
        if i <= len(self.pre):
            return self.pre[i - 1]
        cyc = self.cycle
        return cyc[(i - len(self.pre) - 1) % len(cyc)]

    def prefix(self, n: int) -> tuple[int, ...]:
        if n <= len(self.pre):
            return self.pre[:n]
        cyc = self.cycle
        rest = n - len(self.pre)
        reps = rest // len(cyc) + 1
        return self.pre + (cyc * reps)[:rest]

    def tail_count(self) -> int:
        """Number of distinct tails sigma^n(x), n >= 0."""
        return len(self.pre) + len(self.cycle)

    def __lt__(self, other: Seq) -> bool:
        return lex_compare(self, other) < 0

    def __str__(self):
        return format_seq(self)

    def __repr__(self):
        return f"Seq({format_seq(self)!r}, m={self.m})"


@dataclass(frozen=True)
class Word:
    m: int
    symbols: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(int(s) for s in self.symbols))
        _check_symbols(self.symbols, self.m)

    def __len__(self):
        return len(self.symbols)

    def __str__(self):
        return _join(self.symbols, self.m)


_DIGITS = re.compile(r"^(?P<pre>[0-9,]*)(\((?P<per>[0-9,]+)\))?$")


def _split(text: str, m: int) -> tuple[int, ...]:
    if not text:
        return ()
    if m >= 10:
        parts = text.split(",")
        if any(p == "" for p in parts):
            raise ValueError(f"malformed symbol list {text!r}")
        return tuple(int(p) for p in parts)
    if "," in text:
        raise ValueError("commas are only used for m >= 10")
    return tuple(int(ch) for ch in text)


def _join(symbols: Sequence[int], m: int) -> str:
    if m >= 10:
        return ",".join(str(s) for s in symbols)
    return "".join(str(s) for s in symbols)


def parse_seq(text: str, m: int) -> Seq:
    """Parse ``digits``, ``digits(digits)`` or ``(digits)``.

    A bare digit string is followed by ``0^inf``.
    """
    s = text.strip()
    match = _DIGITS.match(s)
    if not s or match is None or (match["pre"] == "" and match["per"] is None):
        raise ValueError(f"syntax error in sequence literal {text!r}")
    return Seq(m, _split(match["pre"], m), _split(match["per"] or "", m))


def format_seq(x: Seq) -> str:
    if x.is_finite:
        return _join(x.pre, x.m) if x.pre else "0"
    return f"{_join(x.pre, x.m)}({_join(x.per, x.m)})"


def lex_compare(a: Seq, b: Seq) -> int:
    """-1, 0 or 1.  Both sequences are periodic after max(len pre) digits,
    so comparing one common period beyond that decides the order."""
    if a.m != b.m:
        raise ValueError(f"alphabet mismatch: m={a.m} vs m={b.m}")
    if a == b:
        return 0
    n = max(len(a.pre), len(b.pre)) + lcm(len(a.cycle), len(b.cycle))
    pa, pb = a.prefix(n), b.prefix(n)
    return (pa > pb) - (pa < pb)


def shift(x: Seq, n: int = 1) -> Seq:
    if n < 0:
        raise ValueError("shift count must be non-negative")
    if n <= len(x.pre):
        return Seq(x.m, x.pre[n:], x.per)
    if not x.per:
        return Seq(x.m)
    r = (n - len(x.pre)) % len(x.per)
    return Seq(x.m, (), x.per[r:] + x.per[:r])


def tilde_invert(x: Seq) -> Seq:
    m = x.m
    return Seq(m, tuple(m - s for s in x.pre), tuple(m - s for s in x.cycle))


def _tails(x: Seq):
    for n in range(1, x.tail_count() + 1):
        yield n, shift(x, n)


def is_kneading(x: Seq) -> bool:
    """sigma^n(x) < x for every n >= 1."""
    return all(t < x for _, t in _tails(x))


def minimal_kneading_above(c: Seq) -> Seq:
    """Smallest kneading sequence >= c (c itself when it is kneading)."""
    m = c.m
    if c == Seq(m, (), (m,)):
        raise ValueError("no kneading sequence lies above m^inf")
    if is_kneading(c):
        return c
    ell = next((n for n, t in _tails(c) if t >= c), None)
    if ell is None:  # pragma: no cover - contradicts is_kneading
        raise AssertionError(f"{c} has no tail >= itself but is not kneading")
    head = c.prefix(ell)
    d = Seq(m, head[:-1] + (head[-1] + 1,))
    if not is_kneading(d):  # pragma: no cover - guaranteed by construction
        raise AssertionError(f"constructed {d} from {c} is not kneading")
    return d


@dataclass(frozen=True)
class Stability:
    i0: int
    radius: Fraction


def left_endpoint_stability(c: Seq) -> Stability:
    """First index of the minimal digit of a kneading c.

    Any c' sharing the first ``i0`` digits of c gives the same survivor sets;
    ``radius`` is that neighbourhood in the metric 2^-(first differing index).
    """
    if not is_kneading(c):
        raise ValueError(f"{c} is not kneading")
    low = min(c.pre + c.cycle)
    i0 = next(i for i in range(1, c.tail_count() + 1) if c.digit(i) == low)
    return Stability(i0, Fraction(1, 2 ** i0))
