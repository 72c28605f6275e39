"""Piecewise-linear expanding Markov maps of the circle and their invariant sets.

Everything is exact: breakpoints, slopes and intercepts are ``Fraction``
values, and sets on the circle are finite unions of closed arcs with
rational endpoints (:class:`IntervalCover`).  The circle is [0, 1] with 0 and
1 identified; distances use d(t, s) = min(|t - s|, 1 - |t - s|).
"""
from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .enclosure import Enclosure, as_fraction
from .graph import TransferGraph, decode_code, encode, graph_blocks
from .seq import Seq, Word

__all__ = [
    "PiecewiseLinearMarkovMap",
    "IntervalCover",
    "JointVerdict",
    "MaximalityNeighborhood",
    "itinerary",
    "orbit_itinerary",
    "decode",
    "cylinder",
    "conjugacy_eval",
    "sft_cover",
    "map_image_cover",
    "cover_distance",
    "hausdorff_distance",
    "joint_check",
    "search_disjoint_eps",
    "periodic_points",
    "sequence_in_sft",
    "maximality_epsilon",
    "circle_dist",
]


class MapError(ValueError):
    pass


@dataclass(frozen=True)
class PiecewiseLinearMarkovMap:
    """Full-branch map: branch i sends [x_i, x_{i+1}) affinely onto [0, 1)."""

    breakpoints: tuple
    branches: tuple  # ((slope, intercept), ...)

    def __post_init__(self):
        xs = tuple(as_fraction(x) for x in self.breakpoints)
        br = tuple((as_fraction(s), as_fraction(b)) for s, b in self.branches)
        if len(xs) < 3 or xs[0] != 0 or xs[-1] != 1:
            raise MapError("breakpoints must run from 0 to 1 with at least two branches")
        if any(a >= b for a, b in zip(xs, xs[1:])):
            raise MapError("breakpoints must be strictly increasing")
        if len(br) != len(xs) - 1:
            raise MapError(f"{len(xs) - 1} intervals but {len(br)} branches")
        for i, (s, b) in enumerate(br):
            if s <= 0:
                raise MapError(f"branch {i} is orientation-reversing (slope {s}); only increasing branches are supported")
            if s * xs[i] + b != 0 or s * xs[i + 1] + b != 1:
                raise MapError(f"branch {i} does not map [{xs[i]}, {xs[i + 1]}) onto [0, 1)")
            if s <= 1:
                raise MapError(f"branch {i} is not expanding (slope {s})")
        object.__setattr__(self, "breakpoints", xs)
        object.__setattr__(self, "branches", br)

    @classmethod
    def linear(cls, m: int = 1) -> PiecewiseLinearMarkovMap:
        """x -> (m+1) x mod 1; m = 1 is the doubling map."""
        n = m + 1
        return cls(tuple(Fraction(i, n) for i in range(n + 1)), tuple((n, -i) for i in range(n)))

    @classmethod
    def from_breakpoints(cls, breakpoints) -> PiecewiseLinearMarkovMap:
        xs = [as_fraction(x) for x in breakpoints]
        br = []
        for a, b in zip(xs, xs[1:]):
            s = 1 / (b - a)
            br.append((s, -s * a))
        return cls(tuple(xs), tuple(br))

    @classmethod
    def from_json(cls, data) -> PiecewiseLinearMarkovMap:
        if isinstance(data, str):
            data = json.loads(data)
        try:
            xs = data["breakpoints"]
            br = [(b["slope"], b["intercept"]) for b in data["branches"]]
        except (KeyError, TypeError) as exc:
            raise MapError(f"malformed map definition: {exc}") from exc
        f = cls(tuple(xs), tuple(br))
        if "m" in data and int(data["m"]) != f.m:
            raise MapError(f"declared m={data['m']} but the map has {len(br)} branches")
        return f

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "breakpoints": [str(x) for x in self.breakpoints],
            "branches": [{"slope": str(s), "intercept": str(b)} for s, b in self.branches],
        }

    @property
    def m(self) -> int:
        return len(self.branches) - 1

    @property
    def gamma(self) -> Fraction:
        """Expansion constant: the smallest slope."""
        return min(s for s, _ in self.branches)

    def branch(self, x) -> int:
        x = as_fraction(x) % 1
        return bisect.bisect_right(self.breakpoints, x) - 1

    def __call__(self, x) -> Fraction:
        x = as_fraction(x) % 1
        s, b = self.branches[self.branch(x)]
        return s * x + b

    def inverse(self, i: int, y) -> Fraction:
        s, b = self.branches[i]
        return (as_fraction(y) - b) / s


def circle_dist(t, s) -> Fraction:
    d = abs(as_fraction(t) - as_fraction(s)) % 1
    return min(d, 1 - d)


def itinerary(f: PiecewiseLinearMarkovMap, x, k: int) -> Word:
    """First k branch indices along the orbit of x (half-open convention)."""
    x = as_fraction(x) % 1
    out = []
    for _ in range(k):
        i = f.branch(x)
        out.append(i)
        s, b = f.branches[i]
        x = s * x + b
    return Word(f.m, out)


def orbit_itinerary(f: PiecewiseLinearMarkovMap, x, max_steps: int = 4096) -> Seq | None:
    """Full itinerary as a Seq when the exact orbit of x cycles within max_steps."""
    x = as_fraction(x) % 1
    seen = {}
    symbols = []
    for n in range(max_steps):
        if x in seen:
            j = seen[x]
            return Seq(f.m, symbols[:j], symbols[j:])
        seen[x] = n
        i = f.branch(x)
        symbols.append(i)
        s, b = f.branches[i]
        x = s * x + b
    return None


def cylinder(f: PiecewiseLinearMarkovMap, w) -> tuple[Fraction, Fraction]:
    """Closed interval of points whose itinerary starts with w."""
    symbols = w.symbols if isinstance(w, Word) else tuple(w)
    lo, hi = Fraction(0), Fraction(1)
    for s in reversed(symbols):
        if not 0 <= s <= f.m:
            raise MapError(f"symbol {s} is not a branch index of this map")
        lo, hi = f.inverse(s, lo), f.inverse(s, hi)
    return lo, hi


def _compose_inverse(f, symbols):
    # y -> g_{w_1} o ... o g_{w_n}(y) as (a, b) with y -> a y + b
    a, b = Fraction(1), Fraction(0)
    for s in reversed(symbols):
        slope, icpt = f.branches[s]
        a, b = a / slope, (b - icpt) / slope
    return a, b


def decode(f: PiecewiseLinearMarkovMap, w) -> Enclosure:
    """Point (or cylinder) with itinerary w.

    A finite Word gives its cylinder, of width at most gamma^-k.  A Seq is
    decoded exactly: the periodic tail is the fixed point of the composed
    inverse branches, then the preperiod is pulled back.
    """
    if isinstance(w, Word):
        if w.m != f.m:
            raise MapError(f"word over m={w.m} for a map with m={f.m}")
        return Enclosure(*cylinder(f, w))
    if isinstance(w, Seq):
        if w.m != f.m:
            raise MapError(f"sequence over m={w.m} for a map with m={f.m}")
        a, b = _compose_inverse(f, w.cycle)
        y = b / (1 - a)
        a2, b2 = _compose_inverse(f, w.pre)
        return Enclosure.point(a2 * y + b2)
    return decode(f, Word(f.m, tuple(w)))


def conjugacy_eval(f: PiecewiseLinearMarkovMap, g: PiecewiseLinearMarkovMap, x, k: int) -> Enclosure:
    """h(x) = chi_g(chi_f^-1(x)): transport the f-itinerary of x to g.

    When the exact f-orbit of x closes up within k steps the result is the
    exact point; otherwise it is the depth-k cylinder of g.
    """
    if f.m != g.m:
        raise MapError(f"branch-count mismatch: {f.m + 1} vs {g.m + 1}")
    seq = orbit_itinerary(f, x, max_steps=k)
    if seq is not None:
        return decode(g, seq)
    return decode(g, itinerary(f, x, k))


def _normalize(arcs) -> tuple:
    pieces = []
    for lo, hi in arcs:
        lo, hi = as_fraction(lo), as_fraction(hi)
        if lo > hi:
            raise ValueError(f"arc [{lo}, {hi}] has lo > hi; split wrapping arcs first")
        if lo < 0 or hi > 1:
            raise ValueError(f"arc [{lo}, {hi}] is outside [0, 1]")
        pieces.append((lo, hi))
    pieces.sort()
    merged = []
    for lo, hi in pieces:
        if merged and lo <= merged[-1][1]:
            if hi > merged[-1][1]:
                merged[-1] = (merged[-1][0], hi)
        else:
            merged.append((lo, hi))
    return tuple(merged)


@dataclass(frozen=True)
class IntervalCover:
    """Finite union of closed arcs in [0, 1], sorted and pairwise disjoint."""

    arcs: tuple
    depth: int = 0

    def __post_init__(self):
        object.__setattr__(self, "arcs", _normalize(self.arcs))

    @classmethod
    def point(cls, x, depth: int = 0) -> IntervalCover:
        x = as_fraction(x) % 1
        return cls(((x, x),), depth)

    @classmethod
    def whole(cls, depth: int = 0) -> IntervalCover:
        return cls(((Fraction(0), Fraction(1)),), depth)

    @classmethod
    def from_json(cls, data, depth: int = 0) -> IntervalCover:
        if isinstance(data, str):
            data = json.loads(data)
        return cls(tuple((lo, hi) for lo, hi in data), depth)

    def to_json(self) -> list:
        return [[str(lo), str(hi)] for lo, hi in self.arcs]

    def __bool__(self):
        return bool(self.arcs)

    def __len__(self):
        return len(self.arcs)

    @property
    def length(self) -> Fraction:
        return sum((hi - lo for lo, hi in self.arcs), Fraction(0))

    @property
    def max_width(self) -> Fraction:
        return max((hi - lo for lo, hi in self.arcs), default=Fraction(0))

    def __contains__(self, x) -> bool:
        x = as_fraction(x) % 1
        if x == 0 and self.arcs and self.arcs[-1][1] == 1:
            return True
        i = bisect.bisect_right(self.arcs, (x, Fraction(2))) - 1
        return i >= 0 and self.arcs[i][0] <= x <= self.arcs[i][1]

    def contains_cover(self, other: IntervalCover) -> bool:
        for lo, hi in other.arcs:
            i = bisect.bisect_right(self.arcs, (lo, Fraction(2))) - 1
            if i < 0 or not (self.arcs[i][0] <= lo and hi <= self.arcs[i][1]):
                return False
        return True

    def union(self, other: IntervalCover) -> IntervalCover:
        return IntervalCover(self.arcs + other.arcs, max(self.depth, other.depth))

    def gaps(self) -> list[tuple[Fraction, Fraction]]:
        """Complementary open arcs, the wrap-around gap given as (lo, hi + 1)."""
        if not self.arcs:
            return []
        out = [(a[1], b[0]) for a, b in zip(self.arcs, self.arcs[1:]) if b[0] > a[1]]
        first, last = self.arcs[0][0], self.arcs[-1][1]
        if not (first == 0 and last == 1) and last - 1 < first:
            out.append((last, first + 1))
        return out

    def dist_to_point(self, x) -> Fraction:
        if not self.arcs:
            raise ValueError("distance to an empty cover")
        x = as_fraction(x) % 1
        if x in self:
            return Fraction(0)
        i = bisect.bisect_right(self.arcs, (x, Fraction(2))) - 1
        left = self.arcs[i] if i >= 0 else self.arcs[-1]
        right = self.arcs[i + 1] if i + 1 < len(self.arcs) else self.arcs[0]
        return min(circle_dist(x, left[1]), circle_dist(x, right[0]), circle_dist(x, left[0]), circle_dist(x, right[1]))


def cover_distance(a: IntervalCover, b: IntervalCover) -> Fraction:
    """min d(x, y) over x in a, y in b; 0 when they meet."""
    if not a or not b:
        raise ValueError("distance involving an empty cover")
    tagged = sorted([(lo, hi, 0) for lo, hi in a.arcs] + [(lo, hi, 1) for lo, hi in b.arcs])
    reach = [None, None]
    for lo, hi, t in tagged:
        other = reach[1 - t]
        if other is not None and other >= lo:
            return Fraction(0)
        reach[t] = hi if reach[t] is None else max(reach[t], hi)
    # wrap contact through 0 = 1
    if (a.arcs[0][0] == 0 and b.arcs[-1][1] == 1) or (b.arcs[0][0] == 0 and a.arcs[-1][1] == 1):
        return Fraction(0)
    best = None
    n = len(tagged)
    for i in range(n):
        lo1, hi1, t1 = tagged[i]
        lo2, hi2, t2 = tagged[(i + 1) % n]
        if t1 == t2:
            continue
        gap = lo2 - hi1 if i + 1 < n else lo2 + 1 - hi1
        best = gap if best is None else min(best, gap)
    return best


def _directed(a: IntervalCover, b: IntervalCover) -> Fraction:
    # sup over x in a of d(x, b): attained at an endpoint of a or at the
    # midpoint of a gap of b that falls inside a
    cands = [x for arc in a.arcs for x in arc]
    for lo, hi in b.gaps():
        mid = (lo + hi) / 2 % 1
        if mid in a:
            cands.append(mid)
    return max(b.dist_to_point(x) for x in cands)


def hausdorff_distance(a: IntervalCover, b: IntervalCover) -> Enclosure:
    """Exact Hausdorff distance between two arc unions on the circle."""
    if not a or not b:
        raise ValueError("Hausdorff distance needs two nonempty covers")
    return Enclosure.point(max(_directed(a, b), _directed(b, a)))


def sft_cover(f: PiecewiseLinearMarkovMap, g: TransferGraph, depth: int | None = None) -> IntervalCover:
    """Union of the depth-n cylinders of the words that occur in the graph shift."""
    if g.m != f.m:
        raise MapError(f"graph alphabet m={g.m} does not match the map (m={f.m})")
    n = g.k if depth is None else depth
    codes = graph_blocks(g, n)
    return IntervalCover(tuple(cylinder(f, decode_code(c, f.m, n)) for c in codes), n)


def _rotate(lo: Fraction, hi: Fraction, eps: Fraction):
    lo2, hi2 = lo + eps, hi + eps
    shift = math.floor(lo2)
    lo2, hi2 = lo2 - shift, hi2 - shift
    if hi2 <= 1:
        return [(lo2, hi2)]
    return [(lo2, Fraction(1)), (Fraction(0), hi2 - 1)]


def map_image_cover(f: PiecewiseLinearMarkovMap, cov: IntervalCover, eps=0) -> IntervalCover:
    """Exact image of a cover under x -> f(x) + eps (mod 1)."""
    eps = as_fraction(eps) % 1
    xs = f.breakpoints
    out = []
    for lo, hi in cov.arcs:
        for i, (s, b) in enumerate(f.branches):
            a, c = max(lo, xs[i]), min(hi, xs[i + 1])
            if a > c:
                continue
            out.extend(_rotate(s * a + b, s * c + b, eps))
    return IntervalCover(tuple(out), cov.depth)


def sequence_in_sft(x: Seq, g: TransferGraph) -> bool:
    """Is every window of x a word of the graph shift?"""
    if x.m != g.m:
        raise ValueError("alphabet mismatch")
    n = g.k + 1
    words = graph_blocks(g, n)
    length = len(x.pre) + len(x.cycle) + n
    p = x.prefix(length)
    codes = [encode(p[i : i + n], g.m) for i in range(length - n + 1)]
    return bool(np.isin(np.array(codes, dtype=np.int64), words).all())


def periodic_points(f: PiecewiseLinearMarkovMap, g: TransferGraph, max_period: int = 8):
    """(point, word) for periodic points of the graph shift, by period then position."""
    for p in range(1, max_period + 1):
        found = []
        for code in graph_blocks(g, p):
            s = Seq(g.m, (), decode_code(code, g.m, p))
            # non-primitive words were already listed at a shorter period
            if len(s.cycle) == p and sequence_in_sft(s, g):
                found.append((decode(f, s).lo, s))
        yield from sorted(found, key=lambda t: t[0])


@dataclass(frozen=True)
class JointVerdict:
    verdict: str  # "certified_disjoint" | "overlap_witness" | "inconclusive"
    eps: Fraction
    depth: int
    gap: Fraction | None = None
    witness: Fraction | None = None
    source: Fraction | None = None

    def to_json(self) -> dict:
        out = {"verdict": self.verdict, "eps": str(self.eps), "depth": self.depth}
        if self.gap is not None:
            out["gap"] = str(self.gap)
        if self.witness is not None:
            out["witness"] = str(self.witness)
            out["source"] = str(self.source)
        return out


def joint_check(f: PiecewiseLinearMarkovMap, target: TransferGraph, eps, k: int, max_period: int = 8) -> JointVerdict:
    """Decide whether (f + eps)(K) meets K, K the set realized by ``target``.

    certified_disjoint: the depth-k cover of K and the image of the
    depth-(k+1) cover (itself a depth-k resolution of (f + eps)(K)) are a
    positive distance apart.  overlap_witness: a periodic point p of K with
    f(p) + eps again in K (checked on the exact rational orbit).  Otherwise
    inconclusive.
    """
    eps = as_fraction(eps) % 1
    k = max(k, target.k)
    a = sft_cover(f, target, k)
    if not a:
        raise ValueError("the target shift is empty")
    b = map_image_cover(f, sft_cover(f, target, k + 1), eps)
    gap = cover_distance(a, b)
    if gap > 0:
        return JointVerdict("certified_disjoint", eps, k, gap=gap)
    for p, _ in periodic_points(f, target, max_period):
        q = (f(p) + eps) % 1
        it = orbit_itinerary(f, q)
        if it is not None and sequence_in_sft(it, target):
            return JointVerdict("overlap_witness", eps, k, witness=q, source=p)
    return JointVerdict("inconclusive", eps, k)


def search_disjoint_eps(f: PiecewiseLinearMarkovMap, target: TransferGraph, denominator: int = 64, k: int = 8):
    """joint_check for every eps = p/denominator; returns the list of verdicts."""
    return [joint_check(f, target, Fraction(p, denominator), k) for p in range(denominator)]


@dataclass(frozen=True)
class MaximalityNeighborhood:
    epsilon: Fraction
    r0: int
    neighborhood: IntervalCover
    allowed: tuple  # allowed r0-words as codes


def _forbidden_depth(g: TransferGraph) -> int:
    """Smallest r such that the r-blocks of the shift already determine it."""
    target = graph_blocks(g, g.k + 1)
    m = g.m
    for r in range(1, g.k + 2):
        br = graph_blocks(g, r)
        if r == 1:
            x_r = TransferGraph.from_blocks(m, 1, br, [a * (m + 1) + b for a in br for b in br])
        else:
            cand = (br[:, None] * (m + 1) + np.arange(m + 1)[None, :]).ravel()
            cand = cand[np.isin(cand % ((m + 1) ** r), br)]
            x_r = TransferGraph.from_blocks(m, r, br, cand)
        if np.array_equal(graph_blocks(x_r, g.k + 1), target):
            return r
    return g.k + 1  # pragma: no cover - the (k+1)-blocks always suffice


def maximality_epsilon(sigma: TransferGraph, f: PiecewiseLinearMarkovMap) -> MaximalityNeighborhood:
    """epsilon and the neighborhood U(Sigma) built from the W(P) case table.

    With r0 the forbidden-word depth, every allowed r0-cylinder [a, b] is
    widened by epsilon on each side whose lexicographic neighbour word
    (cyclically, 0^r0 and m^r0 being neighbours) is not allowed.  epsilon is
    a third of the smallest r0-cylinder.  The arcs returned are the
    closure of the open neighbourhood.
    """
    if sigma.m != f.m:
        raise MapError("alphabet mismatch between the shift and the map")
    g = sigma.trimmed()
    if g.n_vertices == 0:
        raise ValueError("the shift is empty")
    m = g.m
    r0 = _forbidden_depth(g)
    allowed = graph_blocks(g, r0)
    total = (m + 1) ** r0
    if len(allowed) == total:
        return MaximalityNeighborhood(Fraction(1, 2), r0, IntervalCover.whole(r0), tuple(int(c) for c in allowed))
    allowed_set = set(int(c) for c in allowed)
    cyl = {c: cylinder(f, decode_code(c, m, r0)) for c in allowed_set}
    # smallest r0-cylinder over all words, so no forbidden cylinder fits inside a widening
    eps = min(hi - lo for lo, hi in (cylinder(f, decode_code(c, m, r0)) for c in range(total))) / 3
    arcs = []
    for c, (lo, hi) in cyl.items():
        left_ok = (c - 1) % total in allowed_set
        right_ok = (c + 1) % total in allowed_set
        a = lo if left_ok else lo - eps
        b = hi if right_ok else hi + eps
        if a < 0:
            arcs += [(a + 1, Fraction(1)), (Fraction(0), b)]
        elif b > 1:
            arcs += [(a, Fraction(1)), (Fraction(0), b - 1)]
        else:
            arcs.append((a, b))
    return MaximalityNeighborhood(eps, r0, IntervalCover(tuple(arcs), r0), tuple(sorted(allowed_set)))
