"""Transfer graphs of k-block shifts and certified Perron roots.

Blocks of length k over {0..m} are stored as integer codes in base m+1 with
the first symbol most significant, so numeric order on codes is the
lexicographic order on blocks.  A :class:`TransferGraph` has one vertex per
k-block and an edge u -> v for every admissible (k+1)-block u.v[-1].
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence, eigs, splu

from .enclosure import Enclosure, as_fraction, log, log_int
from .seq import Word, _join, _split

__all__ = [
    "TransferGraph",
    "EntropyEnclosure",
    "perron_enclosure",
    "graph_blocks",
    "sft_from_forbidden",
    "full_shift_graph",
    "sft_contains",
    "perron_radius",
    "entropy_from_radius",
    "trim_mask",
    "cyclic_components",
    "encode",
    "decode_code",
]

# dense eigensolver below this many vertices, ARPACK above
_DENSE_LIMIT = 512


def encode(symbols, m: int) -> int:
    code = 0
    for s in symbols:
        code = code * (m + 1) + int(s)
    return code


def decode_code(code: int, m: int, k: int) -> tuple[int, ...]:
    out = []
    for _ in range(k):
        code, r = divmod(int(code), m + 1)
        out.append(r)
    return tuple(reversed(out))


def _check_width(m: int, k: int):
    if (m + 1) ** k >= 2 ** 62:
        raise OverflowError(f"blocks of length {k} over {m + 1} symbols do not fit in int64 codes")


@dataclass(frozen=True, eq=False)
class TransferGraph:
    m: int
    k: int
    codes: np.ndarray  # sorted vertex codes
    src: np.ndarray  # edge tails (indices into codes)
    dst: np.ndarray  # edge heads

    @classmethod
    def from_blocks(cls, m: int, k: int, vertex_codes, edge_codes, trim: bool = True) -> TransferGraph:
        """Build the overlap graph; edges whose ends are not vertices are dropped."""
        _check_width(m, k + 1)
        codes = np.unique(np.asarray(vertex_codes, dtype=np.int64))
        edges = np.unique(np.asarray(edge_codes, dtype=np.int64))
        base = np.int64((m + 1) ** k)
        head, tail = edges // (m + 1), edges % base
        i = np.searchsorted(codes, head)
        j = np.searchsorted(codes, tail)
        i_ok = (i < len(codes)) & (codes[np.minimum(i, len(codes) - 1)] == head) if len(codes) else i < 0
        j_ok = (j < len(codes)) & (codes[np.minimum(j, len(codes) - 1)] == tail) if len(codes) else j < 0
        keep = i_ok & j_ok
        g = cls(m, k, codes, i[keep].astype(np.int64), j[keep].astype(np.int64))
        return g.trimmed() if trim else g

    @property
    def n_vertices(self) -> int:
        return len(self.codes)

    @property
    def n_edges(self) -> int:
        return len(self.src)

    def __len__(self):
        return self.n_vertices

    def adjacency(self, dtype=np.int64) -> sparse.csr_matrix:
        return _adjacency(self.n_vertices, self.src, self.dst, dtype)

    def edge_codes(self) -> np.ndarray:
        return np.sort(self.codes[self.src] * (self.m + 1) + self.codes[self.dst] % (self.m + 1))

    def words(self) -> list[Word]:
        return [Word(self.m, decode_code(c, self.m, self.k)) for c in self.codes]

    def subgraph(self, keep: np.ndarray) -> TransferGraph:
        keep = np.asarray(keep, dtype=bool)
        index = np.full(self.n_vertices, -1, dtype=np.int64)
        index[keep] = np.arange(int(keep.sum()))
        ek = keep[self.src] & keep[self.dst]
        return TransferGraph(self.m, self.k, self.codes[keep], index[self.src[ek]], index[self.dst[ek]])

    def cyclic_components(self):
        """Labels of the strongly connected components and the ones carrying a cycle."""
        return cyclic_components(self.n_vertices, self.src, self.dst)

    def trimmed(self) -> TransferGraph:
        """Keep the vertices lying on some bi-infinite path."""
        keep = trim_mask(self.n_vertices, self.src, self.dst)
        return self if keep.all() else self.subgraph(keep)

    # text format: header, "vertices N", N block lines, "edges E", E index pairs
    def to_text(self) -> str:
        lines = [f"transfer-graph m={self.m} k={self.k}", f"vertices {self.n_vertices}"]
        lines += [_join(decode_code(c, self.m, self.k), self.m) for c in self.codes]
        lines.append(f"edges {self.n_edges}")
        order = np.lexsort((self.dst, self.src))
        lines += [f"{a} {b}" for a, b in zip(self.src[order], self.dst[order])]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> TransferGraph:
        lines = [ln.strip() for ln in text.strip().splitlines()]
        head = lines[0].split()
        if head[0] != "transfer-graph":
            raise ValueError("not a transfer-graph file")
        opts = dict(tok.split("=") for tok in head[1:])
        m, k = int(opts["m"]), int(opts["k"])
        nv = int(lines[1].split()[1])
        blocks = [_split(ln, m) for ln in lines[2 : 2 + nv]]
        if any(len(b) != k for b in blocks):
            raise ValueError(f"vertex block of wrong length (expected {k})")
        codes = np.array([encode(b, m) for b in blocks], dtype=np.int64)
        if np.any(np.diff(codes) <= 0):
            raise ValueError("vertex blocks must be listed in increasing order")
        ne = int(lines[2 + nv].split()[1])
        pairs = [tuple(int(t) for t in ln.split()) for ln in lines[3 + nv : 3 + nv + ne]]
        arr = np.array(pairs, dtype=np.int64).reshape(-1, 2)
        if arr.size and (arr.min() < 0 or arr.max() >= nv):
            raise ValueError("edge index out of range")
        for a, b in arr:
            if decode_code(codes[a], m, k)[1:] != decode_code(codes[b], m, k)[:-1]:
                raise ValueError(f"edge {a} -> {b} does not overlap")
        return cls(m, k, codes, arr[:, 0].copy(), arr[:, 1].copy())


def _adjacency(n, src, dst, dtype=np.int64) -> sparse.csr_matrix:
    # parallel edges add up, so multigraphs are fine
    return sparse.csr_matrix((np.ones(len(src), dtype=dtype), (src, dst)), shape=(n, n), dtype=dtype)


def cyclic_components(n, src, dst):
    if n == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    ncomp, labels = csgraph.connected_components(_adjacency(n, src, dst), directed=True, connection="strong")
    sizes = np.bincount(labels, minlength=ncomp)
    cyclic = sizes > 1
    cyclic[labels[src[src == dst]]] = True
    return labels, np.flatnonzero(cyclic)


def trim_mask(n, src, dst) -> np.ndarray:
    """Vertices that can be reached from a cycle and can reach one."""
    if n == 0:
        return np.zeros(0, dtype=bool)
    labels, cyclic = cyclic_components(n, src, dst)
    if len(cyclic) == 0:
        return np.zeros(n, dtype=bool)
    seeds = np.flatnonzero(np.isin(labels, cyclic))
    return _reachable(n, src, dst, seeds) & _reachable(n, dst, src, seeds)


def _reachable(n, src, dst, seeds) -> np.ndarray:
    # one extra vertex wired to every seed, then a single BFS
    extra = np.full(len(seeds), n, dtype=np.int64)
    rows = np.concatenate([src, extra])
    cols = np.concatenate([dst, seeds])
    a = sparse.csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n + 1, n + 1))
    order = csgraph.breadth_first_order(a, n, directed=True, return_predecessors=False)
    seen = np.zeros(n + 1, dtype=bool)
    seen[order] = True
    return seen[:n]


def full_shift_graph(m: int, k: int) -> TransferGraph:
    _check_width(m, k + 1)
    return TransferGraph.from_blocks(m, k, np.arange((m + 1) ** k), np.arange((m + 1) ** (k + 1)))


def _contains_word(codes: np.ndarray, length: int, word, m: int) -> np.ndarray:
    base = m + 1
    w = encode(word, m)
    span = base ** len(word)
    hit = np.zeros(len(codes), dtype=bool)
    for p in range(length - len(word) + 1):
        hit |= (codes // base ** (length - len(word) - p)) % span == w
    return hit


def sft_from_forbidden(m: int, words, k: int | None = None) -> TransferGraph:
    """Trimmed transfer graph of the shift avoiding ``words``.

    The block length defaults to (longest forbidden word) - 1, the smallest
    depth at which the shift is presented exactly.
    """
    words = [tuple(w.symbols) if isinstance(w, Word) else tuple(w) for w in words]
    for w in words:
        if not w:
            raise ValueError("the empty word cannot be forbidden")
        Word(m, w)
    longest = max((len(w) for w in words), default=1)
    k = max(1, longest - 1) if k is None else k
    if k + 1 < longest:
        raise ValueError(f"depth {k} too small for forbidden words of length {longest}")
    _check_width(m, k + 1)
    verts = np.arange((m + 1) ** k, dtype=np.int64)
    edges = np.arange((m + 1) ** (k + 1), dtype=np.int64)
    vbad = np.zeros(len(verts), dtype=bool)
    ebad = np.zeros(len(edges), dtype=bool)
    for w in words:
        if len(w) <= k:
            vbad |= _contains_word(verts, k, w, m)
        ebad |= _contains_word(edges, k + 1, w, m)
    return TransferGraph.from_blocks(m, k, verts[~vbad], edges[~ebad])


def graph_blocks(g: TransferGraph, n: int) -> np.ndarray:
    """Sorted codes of the length-n words read along paths of the trimmed graph."""
    g = g.trimmed()
    m, k = g.m, g.k
    if n < 1:
        raise ValueError("block length must be positive")
    _check_width(m, n)
    if g.n_vertices == 0:
        return np.zeros(0, dtype=np.int64)
    if n <= k:
        return np.unique(g.codes // (m + 1) ** (k - n))
    adj = g.adjacency().tocsr()
    indptr, targets = adj.indptr, adj.indices
    words = g.codes.copy()
    last = np.arange(g.n_vertices)
    for _ in range(n - k):
        deg = np.diff(indptr)[last]
        rep_words = np.repeat(words, deg)
        starts = np.repeat(indptr[last], deg)
        offs = np.arange(len(starts)) - np.repeat(np.cumsum(deg) - deg, deg)
        nxt = targets[starts + offs]
        words = rep_words * (m + 1) + g.codes[nxt] % (m + 1)
        # distinct (word, vertex) pairs only; the vertex is the word's k-suffix
        words, first = np.unique(words, return_index=True)
        last = nxt[first]
    return words


def sft_contains(sub: TransferGraph, sup: TransferGraph) -> bool:
    """Is the shift presented by ``sub`` contained in the one presented by ``sup``?"""
    if sub.m != sup.m:
        raise ValueError(f"alphabet mismatch: m={sub.m} vs m={sup.m}")
    n = max(sub.k, sup.k) + 1
    a, b = graph_blocks(sub, n), graph_blocks(sup, n)
    return bool(np.isin(a, b, assume_unique=True).all())


@dataclass(frozen=True)
class EntropyEnclosure:
    value: Enclosure
    graph_size: int
    k: int
    radius: Enclosure = field(default=Enclosure(1, 1))

    def to_json(self, digits: int = 18) -> dict:
        lo, hi = self.value.decimal(digits)
        rlo, rhi = self.radius.decimal(digits)
        return {"lo": lo, "hi": hi, "radius": [rlo, rhi], "graph_size": self.graph_size, "k": self.k}


def _float_perron(a: sparse.csr_matrix) -> np.ndarray:
    n = a.shape[0]
    if n == 1:
        return np.ones(1)
    if n <= _DENSE_LIMIT:
        vals, vecs = np.linalg.eig(a.toarray().astype(float))
        v = vecs[:, np.argmax(vals.real)].real
    else:
        # A + I has the Perron root strictly dominant even for periodic A
        b = (a + sparse.identity(n, dtype=a.dtype, format="csr")).astype(float)
        try:
            _, vecs = eigs(b, k=1, which="LM", v0=np.ones(n), tol=1e-14, maxiter=1000)
            v = vecs[:, 0].real
        except (ArpackError, ArpackNoConvergence):
            v = np.ones(n)
            for _ in range(200):
                w = b @ v
                w /= np.abs(w).max()
                if np.abs(w - v).max() < 1e-15:
                    v = w
                    break
                v = w
    v = np.abs(v)
    return v / v.max()


def _resolvent_perron(a: sparse.csr_matrix, iters: int = 64) -> np.ndarray:
    """Perron vector from (mu I - A)^-1 1, with mu bisected down onto lambda.

    For irreducible A the solution is positive exactly when mu > lambda, and
    it lines up with the Perron vector as mu approaches lambda.  This is the
    fallback for long thin cycles where ARPACK stalls.
    """
    n = a.shape[0]
    rows = np.asarray(a.sum(axis=1)).ravel().astype(float)
    lo, hi = rows.min(), rows.max() * (1 + 1e-9) + 1e-9
    eye = sparse.identity(n, format="csc")
    af = a.astype(float).tocsc()
    ones = np.ones(n)
    best = ones

    def solve(mu):
        try:
            return splu((mu * eye - af).tocsc()).solve(ones)
        except RuntimeError:  # exactly singular
            return None

    for _ in range(iters):
        mid = (lo + hi) / 2
        if mid in (lo, hi):
            break
        v = solve(mid)
        if v is not None and np.all(v > 0) and np.all(np.isfinite(v)):
            hi, best = mid, v
        else:
            lo = mid
    return best / best.max()


def _cw_bounds(w, v):
    """Exact min and max of w_i / v_i for positive integer vectors."""
    wo, vo = w.astype(object), v.astype(object)
    r = w.astype(float) / v.astype(float)
    i, j = int(np.argmin(r)), int(np.argmax(r))
    lo, hi = Fraction(int(wo[i]), int(vo[i])), Fraction(int(wo[j]), int(vo[j]))
    # float ratios can misorder near-ties, so check every entry exactly
    for t in np.flatnonzero(wo * lo.denominator < vo * lo.numerator):
        lo = min(lo, Fraction(int(wo[t]), int(vo[t])))
    for t in np.flatnonzero(wo * hi.denominator > vo * hi.numerator):
        hi = max(hi, Fraction(int(wo[t]), int(vo[t])))
    return lo, hi


def _component_radius(a: sparse.csr_matrix, tol: Fraction, max_iter: int) -> Enclosure:
    n = a.shape[0]
    rows = np.diff(a.indptr)
    if rows.min() == rows.max():
        return Enclosure.point(int(rows[0]))
    rowsum = int(a.sum(axis=1).max())
    scale = 62 - max(1, math.ceil(math.log2(rowsum + 1)))
    def certify(vec):
        v = np.maximum(1, np.rint(vec * 2.0 ** scale)).astype(np.int64)
        return v, *_cw_bounds(a @ v, v)

    v, lo, hi = certify(_float_perron(a))
    if hi - lo <= tol * lo:
        return Enclosure(lo, hi)
    v2, lo2, hi2 = certify(_resolvent_perron(a))
    if hi2 - lo2 < hi - lo:
        v = v2
    lo, hi = max(lo, lo2), min(hi, hi2)
    if hi - lo <= tol * lo:
        return Enclosure(lo, hi)
    # exact power iteration on A + I with Python integers
    coo = a.tocoo()
    r_idx, c_idx = coo.row, coo.col
    vo = v.astype(object)
    for _ in range(max_iter):
        w = np.zeros(n, dtype=object)
        np.add.at(w, r_idx, vo[c_idx])
        l2, h2 = _cw_bounds(w, vo)
        lo, hi = max(lo, l2), min(hi, h2)
        if hi - lo <= tol * lo:
            break
        vo = w + vo
        top = max(int(x).bit_length() for x in vo)
        if top > 256:
            shift = top - 200
            vo = np.array([max(1, int(x) >> shift) for x in vo], dtype=object)
    return Enclosure(lo, hi)


def perron_radius(n: int, src, dst, tol=Fraction(1, 10 ** 12), max_iter: int = 200) -> Enclosure:
    """Enclosure of the spectral radius of a (multi)graph given by edge lists.

    Each strongly connected component carrying a cycle gets a positive
    integer vector v and exact Collatz-Wielandt bounds
    min (Av)_i/v_i <= lambda <= max (Av)_i/v_i; the radius is the largest of
    these.  Without cycles the radius is 0.  ``tol`` bounds the relative width.
    """
    tol = as_fraction(tol)
    src, dst = np.asarray(src, dtype=np.int64), np.asarray(dst, dtype=np.int64)
    labels, cyclic = cyclic_components(n, src, dst)
    if len(cyclic) == 0:
        return Enclosure(0, 0)
    a = _adjacency(n, src, dst)
    radius = None
    for comp in cyclic:
        idx = np.flatnonzero(labels == comp)
        r = _component_radius(a[idx][:, idx].tocsr(), tol, max_iter)
        radius = r if radius is None else Enclosure(max(radius.lo, r.lo), max(radius.hi, r.hi))
    return radius


def entropy_from_radius(radius: Enclosure, m: int) -> Enclosure:
    if radius.hi <= 1:
        return Enclosure(0, 0)
    return log(radius.clamp(1, m + 1)).clamp(0, log_int(m + 1).hi)


def perron_enclosure(g: TransferGraph, tol=Fraction(1, 10 ** 12), max_iter: int = 200) -> EntropyEnclosure:
    """Certified enclosure of the topological entropy ln(lambda) of the graph shift.

    A graph without cycles has entropy exactly 0.
    """
    tol = as_fraction(tol)
    g = g.trimmed()
    # relative radius width tol/4 keeps the log width below tol for lambda >= 1
    radius = perron_radius(g.n_vertices, g.src, g.dst, tol / 4, max_iter)
    if radius.hi == 0:
        return EntropyEnclosure(Enclosure(0, 0), g.n_vertices, g.k, Enclosure(0, 0))
    radius = radius.clamp(1, g.m + 1)
    return EntropyEnclosure(entropy_from_radius(radius, g.m), g.n_vertices, g.k, radius)
