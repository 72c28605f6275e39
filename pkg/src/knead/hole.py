"""Survivor sets of the hole [c, d]: blocks, SFT sandwiches and dimension.

M'_{c,d} is the set of x with c <= sigma^n(x) <= d for every n >= 0.  A
k-block is *allowed* when each of its suffix windows lies (non-strictly)
between the equal-length prefixes of c and d.  Two graph shifts bracket the
survivor set:

* the outer shift reads allowed (k+1)-blocks, so it contains M'_{c,d};
* the inner shift uses only k-blocks strictly between c[:k] and d[:k], so all
  of its points lie strictly inside (c, d).

Dimensions are entropies divided by ln(m+1), i.e. measured in the linear
model x -> (m+1)x mod 1.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .beta import (
    DegenerateError,
    EmptyCaseError,
    beta_from_kneading,
    dimension_lower_bound_ratio,
)
from .enclosure import Enclosure, as_fraction, log_int, log_ratio
from .graph import (
    EntropyEnclosure,
    TransferGraph,
    encode,
    entropy_from_radius,
    perron_enclosure,
    perron_radius,
    sft_from_forbidden,
    trim_mask,
)
from .seq import Seq, Word, format_seq, minimal_kneading_above, parse_seq

__all__ = [
    "IntervalConstraint",
    "DimensionEnclosure",
    "CriticalClass",
    "EqualityReport",
    "allowed_blocks",
    "allowed_codes",
    "outer_sft",
    "inner_sft",
    "dimension",
    "truncation_ladder",
    "classify_critical",
    "equality_experiment",
    "default_cap",
    "depth_schedule",
    "state_graph",
    "StateGraph",
    "max_blocks",
]


def max_blocks() -> int:
    """Block budget per level, from KNEAD_MAX_BLOCKS (default 2**22)."""
    return int(os.environ.get("KNEAD_MAX_BLOCKS", 2 ** 22))


DEEP_CAP = 1024


def default_cap(m: int) -> int:
    if m == 1:
        return 18
    if m == 2:
        return 12
    return max(2, int(18 * math.log(2) / math.log(m + 1)))


class BlockBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class IntervalConstraint:
    c: Seq
    d: Seq
    m: int = None

    def __post_init__(self):
        m = self.c.m if self.m is None else self.m
        object.__setattr__(self, "m", m)
        if self.c.m != m or self.d.m != m:
            raise ValueError(f"alphabet mismatch: c.m={self.c.m}, d.m={self.d.m}, m={m}")
        if not self.c < self.d:
            raise ValueError(f"need c < d, got c={self.c}, d={self.d}")

    @classmethod
    def parse(cls, c: str, d: str, m: int) -> IntervalConstraint:
        return cls(parse_seq(c, m), parse_seq(d, m), m)

    def __str__(self):
        return f"[{format_seq(self.c)}, {format_seq(self.d)}] (m={self.m})"


def _border_tables(p: tuple[int, ...], m: int, lower: bool):
    """Transition tables for tracking suffixes that coincide with prefixes of p.

    State L is the length of the longest suffix equal to p[:L]; all shorter
    coinciding suffixes are the borders of p[:L].  Appending symbol a is
    legal when, for each of them, a >= p[j] (lower bound) or a <= p[j]
    (upper bound).  The new state is the longest j + 1 with a == p[j].
    """
    n = len(p) - 1
    fail = [0] * (n + 1)
    j = 0
    for i in range(1, n):
        while j and p[i] != p[j]:
            j = fail[j]
        if p[i] == p[j]:
            j += 1
        fail[i + 1] = j
    ok = np.ones((n + 1, m + 1), dtype=bool)
    nxt = np.zeros((n + 1, m + 1), dtype=np.int64)
    capped = np.zeros((n + 1, m + 1), dtype=np.int64)
    for L in range(n + 1):
        chain = [L]
        while chain[-1]:
            chain.append(fail[chain[-1]])
        for a in range(m + 1):
            for j in chain:
                if (a < p[j]) if lower else (a > p[j]):
                    ok[L, a] = False
                if a == p[j]:
                    nxt[L, a] = max(nxt[L, a], j + 1)
                    if j + 1 <= n:
                        capped[L, a] = max(capped[L, a], j + 1)
    return ok, nxt, capped


def _levels(ic: IntervalConstraint, kmax: int, budget: int | None = None):
    """Yield (k, sorted codes of allowed k-blocks) for k = 1..kmax."""
    m = ic.m
    budget = max_blocks() if budget is None else budget
    ok_c, nx_c, _ = _border_tables(ic.c.prefix(kmax + 1), m, lower=True)
    ok_d, nx_d, _ = _border_tables(ic.d.prefix(kmax + 1), m, lower=False)
    codes = np.zeros(1, dtype=np.int64)
    lc = np.zeros(1, dtype=np.int64)
    ld = np.zeros(1, dtype=np.int64)
    sym = np.arange(m + 1, dtype=np.int64)
    for k in range(1, kmax + 1):
        mask = ok_c[lc] & ok_d[ld]
        if int(mask.sum()) > budget:
            raise BlockBudgetExceeded(f"{int(mask.sum())} blocks of length {k} exceed the budget {budget}")
        rows, cols = np.nonzero(mask)  # row-major, so codes stay sorted
        codes = codes[rows] * (m + 1) + sym[cols]
        lc = nx_c[lc[rows], cols]
        ld = nx_d[ld[rows], cols]
        yield k, codes


def allowed_codes(ic: IntervalConstraint, k: int) -> np.ndarray:
    if k < 1:
        raise ValueError("block length must be >= 1")
    for level, codes in _levels(ic, k):
        if level == k:
            return codes
    raise AssertionError("unreachable")  # pragma: no cover


def allowed_blocks(ic: IntervalConstraint, k: int) -> set[Word]:
    """All k-blocks whose suffix windows sit between the prefixes of c and d."""
    from .graph import decode_code

    return {Word(ic.m, decode_code(c, ic.m, k)) for c in allowed_codes(ic, k)}


def _pair(ic: IntervalConstraint, k: int):
    out = {}
    for level, codes in _levels(ic, k + 1):
        if level >= k:
            out[level] = codes
    return out[k], out[k + 1]


def _outer(ic, k, vk, vk1) -> TransferGraph:
    return TransferGraph.from_blocks(ic.m, k, vk, vk1)


def _inner(ic, k, vk, vk1) -> TransferGraph:
    lo, hi = encode(ic.c.prefix(k), ic.m), encode(ic.d.prefix(k), ic.m)
    verts = vk[(vk > lo) & (vk < hi)]
    return TransferGraph.from_blocks(ic.m, k, verts, vk1)


def outer_sft(ic: IntervalConstraint, k: int) -> TransferGraph:
    """Graph shift on allowed k-blocks; contains M'_{c,d}."""
    return _outer(ic, k, *_pair(ic, k))


def inner_sft(ic: IntervalConstraint, k: int) -> TransferGraph:
    """Graph shift on k-blocks strictly between c[:k] and d[:k]; inside M'_{c,d}."""
    return _inner(ic, k, *_pair(ic, k))


@dataclass(frozen=True)
class StateGraph:
    """Deterministic automaton presentation of a depth-k window shift.

    A state is the pair (longest suffix equal to a prefix of c, longest
    suffix equal to a prefix of d).  Whenever one of these lengths is j, the
    other is determined by that prefix, so there are at most about 2(k+1)
    reachable states instead of (m+1)^k blocks.  Distinct symbols may lead to
    the same state, so edges can repeat.
    """
    m: int
    k: int
    inner: bool
    n: int
    src: np.ndarray
    dst: np.ndarray

    def entropy(self, tol=Fraction(1, 10 ** 12)) -> EntropyEnclosure:
        keep = trim_mask(self.n, self.src, self.dst)
        idx = np.cumsum(keep) - 1
        ek = keep[self.src] & keep[self.dst]
        n = int(keep.sum())
        radius = perron_radius(n, idx[self.src[ek]], idx[self.dst[ek]], as_fraction(tol) / 4)
        if radius.hi == 0:
            return EntropyEnclosure(Enclosure(0, 0), n, self.k, radius)
        radius = radius.clamp(1, self.m + 1)
        return EntropyEnclosure(entropy_from_radius(radius, self.m), n, self.k, radius)


def state_graph(ic: IntervalConstraint, k: int, inner: bool, budget: int | None = None) -> StateGraph:
    """Automaton for outer_sft(ic, k) (inner=False) or inner_sft(ic, k) (inner=True).

    Outer: tight lengths are tracked up to k, which enforces exactly the
    windows of length <= k+1.  Inner: a tight length reaching k means a
    k-window equals c[:k] or d[:k], and that transition is removed.
    """
    if k < 1:
        raise ValueError("depth must be >= 1")
    m = ic.m
    budget = max_blocks() if budget is None else budget
    depth = k - 1 if inner else k
    ok_c, nx_c, cap_c = _border_tables(ic.c.prefix(depth + 1), m, lower=True)
    ok_d, nx_d, cap_d = _border_tables(ic.d.prefix(depth + 1), m, lower=False)
    if inner:
        ok = ok_c[:, None, :] & ok_d[None, :, :] & (nx_c[:, None, :] <= depth) & (nx_d[None, :, :] <= depth)
        tc, td = nx_c, nx_d
    else:
        ok = ok_c[:, None, :] & ok_d[None, :, :]
        tc, td = cap_c, cap_d
    width = depth + 1
    seen = np.zeros(width * width, dtype=bool)
    seen[0] = True
    frontier = np.zeros(1, dtype=np.int64)
    srcs, dsts = [], []
    while len(frontier):
        lc, ld = np.divmod(frontier, width)
        rows, syms = np.nonzero(ok[lc, ld])
        nxt = tc[lc[rows], syms] * width + td[ld[rows], syms]
        srcs.append(frontier[rows])
        dsts.append(nxt)
        new = np.unique(nxt[~seen[nxt]])
        seen[new] = True
        if int(seen.sum()) > budget:
            raise BlockBudgetExceeded(f"more than {budget} automaton states at depth {k}")
        frontier = new
    states = np.flatnonzero(seen)
    src = np.searchsorted(states, np.concatenate(srcs))
    dst = np.searchsorted(states, np.concatenate(dsts))
    return StateGraph(m, k, inner, len(states), src, dst)


@dataclass(frozen=True)
class DimensionEnclosure:
    value: Enclosure
    k_reached: int
    converged: bool
    inner: EntropyEnclosure | None = None
    outer: EntropyEnclosure | None = None

    def to_json(self, digits: int = 18) -> dict:
        lo, hi = self.value.decimal(digits)
        return {"lower": lo, "upper": hi, "k": self.k_reached, "converged": self.converged}


def _scaled(h: EntropyEnclosure, m: int) -> Enclosure:
    return (h.value / log_int(m + 1)).clamp(0, 1)


def _start_depth(ic: IntervalConstraint, cap: int) -> int:
    pre = max(len(ic.c.pre), len(ic.d.pre))
    return min(cap, max(2, min(12, pre)))


def depth_schedule(k0: int, cap: int, deep_cap: int):
    """k0, k0+1, ..., cap, then doubling up to deep_cap."""
    ks = list(range(k0, cap + 1))
    k = cap
    while k < deep_cap:
        k = min(2 * k, deep_cap)
        ks.append(k)
    return ks


def dimension(
    ic: IntervalConstraint,
    tol=Fraction(1, 1000),
    cap: int | None = None,
    k0: int | None = None,
    deep_cap: int | None = None,
) -> DimensionEnclosure:
    """Sandwich dim_H M'_{c,d} between the inner and outer window shifts.

    Depth grows by one from k0 to ``cap`` and then doubles up to
    ``deep_cap`` (default 1024), stopping as soon as
    upper.hi - lower.lo <= tol.  If that never happens, or the state budget
    runs out, the last sandwich is returned with ``converged=False``; it is
    still a valid enclosure.
    """
    tol = as_fraction(tol)
    if tol <= 0:
        raise ValueError("tol must be positive")
    cap = default_cap(ic.m) if cap is None else cap
    if cap < 1:
        raise ValueError("depth cap must be >= 1")
    deep_cap = max(cap, DEEP_CAP if deep_cap is None else deep_cap)
    k_start = _start_depth(ic, cap) if k0 is None else min(k0, cap)
    lower, upper = Enclosure(0, 0), Enclosure(1, 1)
    best_in = best_out = None
    reached = 0
    ptol = tol / 64
    for k in depth_schedule(k_start, cap, deep_cap):
        try:
            g_in, g_out = state_graph(ic, k, True), state_graph(ic, k, False)
        except BlockBudgetExceeded:
            break
        h_in, h_out = g_in.entropy(ptol), g_out.entropy(ptol)
        lo, hi = _scaled(h_in, ic.m), _scaled(h_out, ic.m)
        if best_in is None or lo.lo > lower.lo:
            lower, best_in = lo, h_in
        if best_out is None or hi.hi < upper.hi:
            upper, best_out = hi, h_out
        reached = k
        if upper.hi - lower.lo <= tol:
            return DimensionEnclosure(Enclosure(lower.lo, upper.hi), k, True, best_in, best_out)
    return DimensionEnclosure(Enclosure(min(lower.lo, upper.hi), upper.hi), reached, False, best_in, best_out)


@dataclass(frozen=True)
class LadderRow:
    k: int
    lower: Enclosure  # inner-shift dimension
    upper: Enclosure  # outer-shift dimension

    @property
    def gap(self) -> Fraction:
        return self.upper.hi - self.lower.lo


def truncation_ladder(ic: IntervalConstraint, ks, tol=Fraction(1, 10 ** 9)) -> list[LadderRow]:
    """Raw inner/outer dimension enclosures at each depth in ``ks`` (no running max)."""
    rows = []
    for k in ks:
        lo = _scaled(state_graph(ic, k, True).entropy(tol), ic.m)
        hi = _scaled(state_graph(ic, k, False).entropy(tol), ic.m)
        rows.append(LadderRow(k, lo, hi))
    return rows


@dataclass(frozen=True)
class CriticalClass:
    kind: str  # "empty" | "zero" | "positive"
    d_normalized: Seq
    threshold: Seq
    n: int | None = None
    witness: TransferGraph | None = None
    witness_entropy: EntropyEnclosure | None = None
    witness_certified: bool = False

    def to_json(self) -> dict:
        out = {
            "class": self.kind,
            "d_normalized": format_seq(self.d_normalized),
            "threshold": format_seq(self.threshold),
        }
        if self.kind == "positive":
            lo, hi = self.witness_entropy.value.decimal()
            out["witness"] = {"n": self.n, "entropy": [lo, hi], "certified": self.witness_certified}
        return out


def _normalize_top(d: Seq) -> Seq:
    if d == Seq(d.m, (), (d.m,)):
        return d
    return minimal_kneading_above(d)


def witness_sft(m: int, c1: int, n: int) -> TransferGraph:
    """S_n: symbols c1 and c1+1, each c1+1 followed by at least n copies of c1."""
    top = c1 + 1
    forbidden = [(a,) for a in range(m + 1) if a not in (c1, top)]
    forbidden += [(top,) + (c1,) * i + (top,) for i in range(n)]
    return sft_from_forbidden(m, forbidden)


def classify_critical(ic: IntervalConstraint) -> CriticalClass:
    """Zero/positive dimension from the threshold (c1+1) c1^inf.

    d is first replaced by the smallest kneading sequence above it.  For the
    positive class the witness S_n uses the least n with ((c1+1) c1^n)^inf <= d;
    it is flagged certified when S_n provably sits inside M'_{c,d}, which
    additionally needs c <= c1^inf.
    """
    m, c = ic.m, ic.c
    c1 = c.digit(1)
    d_norm = _normalize_top(ic.d)
    threshold = Seq(m, (c1 + 1,), (c1,)) if c1 < m else Seq(m, (), (m,))
    if d_norm.digit(1) == c1:
        return CriticalClass("empty", d_norm, threshold)
    if d_norm <= threshold:
        return CriticalClass("zero", d_norm, threshold)
    top = c1 + 1
    bound = ic.d.tail_count() + 2
    n = next((n for n in range(1, bound + 1) if Seq(m, (), (top,) + (c1,) * n) <= ic.d), None)
    certified = n is not None and c <= Seq(m, (), (c1,))
    if n is None:
        # the normalized d admits a witness even when d itself does not
        n = next(n for n in range(1, d_norm.tail_count() + 3) if Seq(m, (), (top,) + (c1,) * n) <= d_norm)
    g = witness_sft(m, c1, n)
    h = perron_enclosure(g)
    return CriticalClass("positive", d_norm, threshold, n, g, h, certified and h.value.lo > 0)


@dataclass(frozen=True)
class EqualityRow:
    k: int
    ratio: Enclosure
    scaled: Enclosure
    gap: Fraction


@dataclass(frozen=True)
class EqualityReport:
    family: str | None
    dimension: DimensionEnclosure | None
    scale: Enclosure
    rows: list = field(default_factory=list)

    @property
    def monotone(self) -> bool:
        gaps = [r.gap for r in self.rows]
        return all(b <= a for a, b in zip(gaps, gaps[1:]))

    def to_json(self, digits: int = 18) -> dict:
        return {
            "family": self.family,
            "dimension": None if self.dimension is None else self.dimension.to_json(digits),
            "scale": list(self.scale.decimal(digits)),
            "monotone": self.monotone,
            "rows": [
                {"k": r.k, "ratio": list(r.ratio.decimal(digits)), "scaled": list(r.scaled.decimal(digits)),
                 "gap": Enclosure.point(r.gap).decimal(digits)[1]}
                for r in self.rows
            ],
        }


def equality_experiment(ic: IntervalConstraint, tol=Fraction(1, 1000), k_max: int = 8, beta_tol=Fraction(1, 10 ** 30)) -> EqualityReport:
    """Compare the M'-side dimension with the witness-ratio lower bounds.

    The M-side bound at step k is ln(beta_{k-1})/ln(beta_k) scaled by the
    dimension ln(beta_d)/ln(m+1) of the ambient beta-shift; its distance to
    the M'-side upper end should shrink with k.
    """
    m = ic.m
    cls = classify_critical(ic)
    zero = Enclosure(0, 0)
    if cls.kind == "empty":
        return EqualityReport(None, DimensionEnclosure(zero, 0, True), zero, [EqualityRow(k, zero, zero, Fraction(0)) for k in range(2, k_max + 1)])
    dim = dimension(ic, tol)
    top = Seq(m, (), (m,))
    d = cls.d_normalized
    if ic.c == Seq(m) and ic.d == top:
        kind, args, scale = "full", (None, None), Enclosure(1, 1)
    else:
        if ic.c == Seq(m):
            kind, args = "left_c", (d, None)
        else:
            kind, args = "interval_cd", (ic.c, d)
        scale = Enclosure(1, 1) if d == top else log_ratio(beta_from_kneading(d, beta_tol), Enclosure.point(m + 1)).clamp(0, 1)
    rows = []
    for k in range(2, k_max + 1):
        try:
            ratio = dimension_lower_bound_ratio(kind, *args, k, beta_tol, m=m)
        except (EmptyCaseError, DegenerateError):
            # beta_{k-1} = 1 (or no witness): the bound is trivially 0
            ratio = zero
        scaled = (ratio * scale).clamp(0, 1)
        rows.append(EqualityRow(k, ratio, scaled, dim.value.hi - scaled.lo))
    return EqualityReport(kind, dim, scale, rows)
