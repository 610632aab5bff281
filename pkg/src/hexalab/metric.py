"""Intrinsic chain metric d_mu: upper brackets by node-weighted shortest
paths on the chain complex, certified lower bounds, chain utilities and the
theta-chain experiment.

Weights are handled in *scaled* form: at depth ``N`` with ``mu = p/q`` a
cell of length ``l`` costs the integer ``p**l * q**(N - l)``, so every chain
weight is an integer over ``q**N`` and all comparisons are exact.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, NamedTuple, Optional, Sequence, Union

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra

from .complex import (
    ChainComplex,
    build_chain_complex,
    build_vertex_graph,
    complex_id,
    complex_word,
    level_offset,
)
from .symbolic import (
    TAILS,
    PointRep,
    canonical,
    cell_intersects,
    cells_containing,
    points_equal,
    representatives,
)

Number = Union[Fraction, float]
EXACT_MAX_DENOMINATOR = 64
FLOAT_TOL = 1e-12


@dataclass(frozen=True)
class WeightParam:
    """The weight parameter mu in (0, 1), exact when a small rational."""

    value: Number

    def __post_init__(self):
        v = self.value
        if isinstance(v, (int, Fraction)):
            v = Fraction(v)
            if v.denominator > EXACT_MAX_DENOMINATOR:
                v = float(v)
        else:
            v = float(v)
        if not 0 < v < 1:
            raise ValueError(f"mu must lie in (0, 1), got {self.value}")
        object.__setattr__(self, "value", v)

    @classmethod
    def parse(cls, text: str) -> "WeightParam":
        """``"1/2"`` or ``"0.5"``; decimals with a small exact denominator stay exact."""
        try:
            return cls(Fraction(text.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad mu literal {text!r}") from exc

    @property
    def exact(self) -> bool:
        return isinstance(self.value, Fraction)

    @property
    def metric_regime(self) -> bool:
        return self.value >= Fraction(1, 2)

    def power(self, l: int) -> Number:
        return self.value**l

    def scaled_weights(self, N: int) -> list:
        if self.exact:
            p, q = self.value.numerator, self.value.denominator
            return [p**l * q ** (N - l) for l in range(N + 1)]
        return [self.value**l for l in range(N + 1)]

    def unscale(self, total, N: int) -> Number:
        if self.exact:
            return Fraction(int(total), self.value.denominator**N)
        return float(total)

    def scale(self, x: Number, N: int):
        if self.exact:
            return Fraction(x) * self.value.denominator**N
        return float(x)

    def __str__(self) -> str:
        v = self.value
        if isinstance(v, Fraction):
            return f"{v.numerator}/{v.denominator}"
        return repr(v)


def as_mu(mu) -> WeightParam:
    if isinstance(mu, WeightParam):
        return mu
    if isinstance(mu, str):
        return WeightParam.parse(mu)
    return WeightParam(mu)


Chain = tuple  # tuple of words


class UpperResult(NamedTuple):
    value: Number
    witness: Chain


class LowerResult(NamedTuple):
    value: Number
    certificate: Optional[str]


@dataclass
class MetricEstimate:
    upper: Number
    witness: Chain
    lower: Number
    certificate: Optional[str]
    depth: int


# --- shortest paths on the chain complex ---------------------------------


@lru_cache(maxsize=None)
def _adjacency_lists(N: int) -> list:
    cc = build_chain_complex(N)
    ind = cc.indices.tolist()
    ptr = cc.indptr.tolist()
    return [ind[ptr[i] : ptr[i + 1]] for i in range(cc.n_nodes)]


@lru_cache(maxsize=None)
def _node_weights(N: int, mu: WeightParam) -> list:
    wl = mu.scaled_weights(N)
    return [wl[l] for l in range(N + 1) for _ in range(6**l)]


def dijkstra_py(
    N: int,
    mu: WeightParam,
    sources: Iterable[int],
    mask: Optional[np.ndarray] = None,
    bound=None,
) -> dict:
    """Pure-Python node-weighted Dijkstra on the depth-``N`` complex.

    Distances include the weight of the first and last cell.  ``mask``
    restricts the search to allowed node ids; ``bound`` stops once the
    frontier exceeds it.  Returns ``{node id: scaled distance}``.
    """
    adj = _adjacency_lists(N)
    w = _node_weights(N, mu)
    heap = [(w[s], s) for s in set(sources) if mask is None or mask[s]]
    heapq.heapify(heap)
    dist = {}
    tol = 0 if mu.exact else FLOAT_TOL
    while heap:
        d, u = heapq.heappop(heap)
        if u in dist:
            continue
        if bound is not None and d > bound + tol:
            break
        dist[u] = d
        for v in adj[u]:
            if v not in dist and (mask is None or mask[v]):
                heapq.heappush(heap, (d + w[v], v))
    return dist


@lru_cache(maxsize=8)
def _arc_matrix_parts(N: int, mu: WeightParam):
    cc = build_chain_complex(N)
    w = np.array(_node_weights(N, mu), dtype=np.float64)
    return cc.indptr, cc.indices, w[cc.indices], w


def _float_exact_ok(N: int, mu: WeightParam) -> bool:
    # scaled integers stay exact in float64 while sums are below 2**53
    return not mu.exact or mu.value.denominator**N * 2**10 < 2**53


def distances_from_cells(N: int, mu: WeightParam, sources: Iterable[int]) -> np.ndarray:
    """Scaled node-weighted distances from a set of cells to every cell."""
    sources = sorted(set(sources))
    if not _float_exact_ok(N, mu):
        d = dijkstra_py(N, mu, sources)
        out = np.full(level_offset(N + 1), np.inf, dtype=object)
        for k, v in d.items():
            out[k] = v
        return out
    indptr, indices, data, w = _arc_matrix_parts(N, mu)
    n = len(indptr) - 1
    # super-source row n with arcs into every source cell
    src = np.asarray(sources, dtype=indices.dtype)
    ind2 = np.concatenate([indices, src])
    dat2 = np.concatenate([data, w[src]])
    ptr2 = np.concatenate([indptr, [indptr[-1] + len(src)]])
    m = sp.csr_matrix((dat2, ind2, ptr2), shape=(n + 1, n + 1))
    d = dijkstra(m, directed=True, indices=n)[:n]
    if mu.exact:
        return np.rint(d)
    return d


def _cell_ids(p: PointRep, N: int) -> list:
    return sorted(complex_id(c) for c in cells_containing(p, N))


def _smallest_cell(p: PointRep, N: int) -> tuple:
    return min(r.expansion(N) for r in representatives(p))


def d_upper(x: PointRep, y: PointRep, N: int, mu) -> UpperResult:
    """Minimum weight over chains of cells of length <= N joining x and y.

    The witness is the lexicographically smallest minimum-weight chain.
    """
    mu = as_mu(mu)
    if N < 1:
        raise ValueError("depth must be >= 1")
    if points_equal(x, y):
        return UpperResult(Fraction(0) if mu.exact else 0.0, (_smallest_cell(x, N),))
    src = _cell_ids(x, N)
    tgt = set(_cell_ids(y, N))
    back = distances_from_cells(N, mu, tgt)
    opt = min(back[s] for s in src)
    return UpperResult(mu.unscale(opt, N), _witness(N, mu, src, tgt, back, opt))


def _close(a, b, exact: bool) -> bool:
    if exact:
        return a == b
    return abs(a - b) <= FLOAT_TOL * max(1.0, abs(a), abs(b))


def _witness(N, mu, src, tgt, back, opt) -> Chain:
    adj = _adjacency_lists(N)
    w = _node_weights(N, mu)
    cands = [s for s in src if _close(back[s], opt, mu.exact)]
    cur = min(cands, key=complex_word)
    rem = opt
    chain = [cur]
    while not (cur in tgt and _close(rem, w[cur], mu.exact)):
        rem = rem - w[cur]
        cands = [v for v in adj[cur] if _close(back[v], rem, mu.exact)]
        cur = min(cands, key=complex_word)
        chain.append(cur)
    return tuple(complex_word(c) for c in chain)


def localized_distance(x: PointRep, y: PointRep, w: Sequence[int], N: int, mu) -> Number:
    """Chain distance using only cells inside ``K_w`` (prefix ``w``) of length <= N."""
    mu = as_mu(mu)
    w = tuple(w)
    if points_equal(x, y):
        return Fraction(0) if mu.exact else 0.0
    mask = _prefix_mask(w, N)
    src = [i for i in _cell_ids(x, N) if mask[i]]
    tgt = {i for i in _cell_ids(y, N) if mask[i]}
    if not src or not tgt:
        raise ValueError("points must lie in the cell")
    dist = dijkstra_py(N, mu, tgt, mask=mask)
    return mu.unscale(min(dist[s] for s in src if s in dist), N)


@lru_cache(maxsize=64)
def _prefix_mask(w: tuple, N: int) -> np.ndarray:
    mask = np.zeros(level_offset(N + 1), dtype=bool)
    v = 0
    for s in w:
        v = 6 * v + s
    for l in range(len(w), N + 1):
        span = 6 ** (l - len(w))
        lo = level_offset(l) + v * span
        mask[lo : lo + span] = True
    return mask


# --- vertex-level distance tables ----------------------------------------


@lru_cache(maxsize=16)
def vertex_cell_table(k: int, N: int) -> np.ndarray:
    """``(|V_k|, 2N+2)`` array of complex ids of cells containing each vertex
    (rows padded by repetition)."""
    g = build_vertex_graph(k)
    width = 2 * (N + 1)
    out = np.empty((len(g.vertices), width), dtype=np.int64)
    for i, p in enumerate(g.vertices):
        ids = _cell_ids(p, N)
        ids = ids + [ids[0]] * (width - len(ids))
        out[i] = ids
    return out


def vertex_distances(x: PointRep, k: int, N: int, mu) -> list:
    """``d_upper(x, v, N)`` for every vertex ``v`` of ``V_k`` (in graph order)."""
    mu = as_mu(mu)
    d = distances_from_cells(N, mu, _cell_ids(x, N))
    table = vertex_cell_table(k, N)
    best = d[table].min(axis=1)
    g = build_vertex_graph(k)
    xc = canonical(x)
    out = [mu.unscale(b, N) for b in best]
    if xc in g.index:
        out[g.index[xc]] = Fraction(0) if mu.exact else 0.0
    return out


def metric_matrix(points: Sequence[PointRep], N: int, mu) -> list:
    mu = as_mu(mu)
    rows = []
    for x in points:
        d = distances_from_cells(N, mu, _cell_ids(x, N))
        row = []
        for y in points:
            if points_equal(x, y):
                row.append(Fraction(0) if mu.exact else 0.0)
            else:
                row.append(mu.unscale(min(d[i] for i in _cell_ids(y, N)), N))
        rows.append(row)
    return rows


# --- lower bounds ----------------------------------------------------------


def _level_cells(p: PointRep, l: int) -> set:
    return {r.expansion(l) for r in representatives(p)}


def d_lower(x: PointRep, y: PointRep, mu, cutoff: int = 12) -> LowerResult:
    """Certified lower bound on d_mu(x, y).

    Two certificates are tried and the larger bound kept:

    * ``disjoint@l``: every level-``l`` cell holding x misses every one
      holding y, so d >= mu**l.
    * ``opposite@w``: x lies in ``K_{w0}`` and y in ``K_{w3}``; opposite
      children of a cell are at distance exactly ``mu**|w|``.

    Both rely on the crossing bound, which needs ``mu >= 1/2``; below that
    no positive bound is returned.
    """
    mu = as_mu(mu)
    zero = Fraction(0) if mu.exact else 0.0
    if points_equal(x, y) or not mu.metric_regime:
        return LowerResult(zero, None)
    best, cert = zero, None
    for l in range(1, cutoff + 1):
        cx, cy = _level_cells(x, l), _level_cells(y, l)
        if not any(cell_intersects(a, b) for a in cx for b in cy):
            best, cert = mu.power(l), f"disjoint@{l}"
            break
    for rx in representatives(x):
        for ry in representatives(y):
            n = max(len(rx.prefix), len(ry.prefix)) + 1
            ex, ey = rx.expansion(n), ry.expansion(n)
            k = next((i for i in range(n) if ex[i] != ey[i]), None)
            if k is None or {ex[k], ey[k]} != {0, 3}:
                continue
            if mu.power(k) > best:
                best = mu.power(k)
                cert = "opposite@" + ("".join(map(str, ex[:k])) or "e")
    return LowerResult(best, cert)


def metric_bracket(x: PointRep, y: PointRep, N: int, mu) -> MetricEstimate:
    up = d_upper(x, y, N, mu)
    lo = d_lower(x, y, mu)
    return MetricEstimate(up.value, up.witness, lo.value, lo.certificate, N)


def ball_vertices(x: PointRep, r, k: int, N: int, mu) -> tuple:
    """Inner and outer approximations of ``V_k`` intersected with the ball
    ``B(x, r)``, as sets of vertex ids of ``H_k``."""
    mu = as_mu(mu)
    if r <= 0:
        raise ValueError("radius must be positive")
    g = build_vertex_graph(k)
    du = vertex_distances(x, k, N, mu)
    inner = {i for i, d in enumerate(du) if d < r}
    outer = set()
    for i, p in enumerate(g.vertices):
        if i in inner or d_lower(x, p, mu).value < r:
            outer.add(i)
    return inner, outer


# --- chains ----------------------------------------------------------------


def chain_weight(c: Sequence[Sequence[int]], mu) -> Number:
    mu = as_mu(mu)
    return sum((mu.power(len(w)) for w in c), Fraction(0) if mu.exact else 0.0)


def is_chain(c: Sequence[Sequence[int]]) -> bool:
    return len(c) > 0 and all(cell_intersects(a, b) for a, b in zip(c, c[1:]))


def chain_eval(c: Sequence[Sequence[int]], x: PointRep, y: PointRep, mu) -> tuple:
    """``(valid, weight)``: valid when consecutive cells meet, x is in the
    first cell and y in the last."""
    from .symbolic import point_in_cell

    c = tuple(tuple(w) for w in c)
    valid = is_chain(c) and point_in_cell(x, c[0]) and point_in_cell(y, c[-1])
    return valid, chain_weight(c, mu)


def doubling_chain(n: int) -> Chain:
    """The level-n chain of 2**n cells from ``0^inf`` to ``10^inf``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    chain = [(0,), (1,)]
    for _ in range(n - 1):
        chain = [(0,) + w for w in chain] + [(1,) + w for w in reversed(chain)]
    return tuple(chain)


def _contained(u: tuple, v: tuple) -> bool:
    """``K_u`` inside ``K_v``."""
    return u[: len(v)] == v


def oai_normalize(c: Sequence[Sequence[int]], mu=None) -> Chain:
    """Reduce a chain until only consecutive cells meet and no cell contains
    another.  Each step keeps the end containments and lowers the weight."""
    c = [tuple(w) for w in c]
    changed = True
    while changed:
        changed = False
        m = len(c)
        for i in range(m):
            for j in range(m):
                if i == j:
                    continue
                if j >= i + 2 and cell_intersects(c[i], c[j]):
                    c = c[: i + 1] + c[j:]
                elif i < j and _contained(c[i], c[j]):
                    c = c[:i] + c[j:]
                elif j < i and _contained(c[i], c[j]):
                    c = c[: j + 1] + c[i + 1 :]
                else:
                    continue
                changed = True
                break
            if changed:
                break
    return tuple(c)


def is_oai(c: Sequence[Sequence[int]]) -> bool:
    c = [tuple(w) for w in c]
    m = len(c)
    for i in range(m):
        for j in range(m):
            if i != j and _contained(c[i], c[j]):
                return False
            if j >= i + 2 and cell_intersects(c[i], c[j]):
                return False
    return True


def entry_face(cell: Sequence[int], w: Sequence[int]) -> Optional[int]:
    """Face of ``K_w`` met by the subcell ``K_cell``, or ``None``.

    A proper subcell ``w s`` meets the boundary of ``K_w`` iff ``s[1:]``
    uses only 0 and 5, and then only within the face ``s[0]``.
    """
    s = tuple(cell)[len(w) :]
    if not s or any(t not in TAILS for t in s[1:]):
        return None
    return s[0]


def crossing_min_weight(w: Sequence[int], max_len: int, mu) -> Number:
    """Minimum weight of a chain inside ``K_w`` running between two different
    faces of its boundary, using subcells of length ``|w|+1 .. max_len``."""
    mu = as_mu(mu)
    w = tuple(w)
    cells = [w + t for r in range(1, max_len - len(w) + 1) for t in product(range(6), repeat=r)]
    idx = {c: i for i, c in enumerate(cells)}
    nbr = [[idx[v] for v in cells if v != u and cell_intersects(u, v)] for u in cells]
    wt = [mu.power(len(c)) for c in cells]
    face = [entry_face(c, w) for c in cells]
    best = None
    for j1 in range(6):
        dist = {}
        heap = [(wt[i], i) for i in range(len(cells)) if face[i] == j1]
        heapq.heapify(heap)
        while heap:
            d, u = heapq.heappop(heap)
            if u in dist:
                continue
            dist[u] = d
            if face[u] is not None and face[u] != j1:
                if best is None or d < best:
                    best = d
                continue
            for v in nbr[u]:
                if v not in dist:
                    heapq.heappush(heap, (d + wt[v], v))
    return best


def min_oai_crossing(w: Sequence[int], max_len: int, mu, cap=None) -> tuple:
    """Depth-first enumeration of OAI chains crossing ``K_w`` between two
    different faces; branches stop once their weight reaches ``cap``.

    Returns ``(minimum weight found or None, number of complete chains)``.
    """
    mu = as_mu(mu)
    w = tuple(w)
    cells = [w + t for r in range(1, max_len - len(w) + 1) for t in product(range(6), repeat=r)]
    n = len(cells)
    meets = [[cell_intersects(a, b) for b in cells] for a in cells]
    nested = [[_contained(a, b) or _contained(b, a) for b in cells] for a in cells]
    wt = [mu.power(len(c)) for c in cells]
    face = [entry_face(c, w) for c in cells]
    best = [None]
    count = [0]

    def grow(path, weight, j1):
        last = path[-1]
        if len(path) > 1 and face[last] is not None and face[last] != j1:
            count[0] += 1
            if best[0] is None or weight < best[0]:
                best[0] = weight
            return
        for v in range(n):
            if v in path or not meets[last][v]:
                continue
            if any(nested[v][u] for u in path):
                continue
            if any(meets[v][u] for u in path[:-1]):
                continue
            nw = weight + wt[v]
            if cap is not None and nw >= cap:
                continue
            grow(path + [v], nw, j1)

    for s in range(n):
        if face[s] is not None:
            if cap is not None and wt[s] >= cap:
                continue
            grow([s], wt[s], face[s])
    return best[0], count[0]


def hausdorff_dim(mu) -> float:
    mu = as_mu(mu)
    if not mu.metric_regime:
        raise ValueError("Hausdorff dimension is defined here for mu in [1/2, 1)")
    return -math.log(6) / math.log(float(mu.value))


def cell_measure(w: Sequence[int]) -> Fraction:
    """Self-similar (normalised Hausdorff) measure of ``K_w``."""
    return Fraction(1, 6 ** len(tuple(w)))


# --- theta-chain profile ---------------------------------------------------


@lru_cache(maxsize=4)
def _cell_vertex_lists(k: int, N: int) -> list:
    table = vertex_cell_table(k, N)
    out = [[] for _ in range(level_offset(N + 1))]
    for v, row in enumerate(table):
        for c in set(row.tolist()):
            out[c].append(v)
    return out


def _hops(x_id: int, y_id: int, k: int, N: int, mu: WeightParam, t) -> float:
    """Fewest hops from x to y in the graph on V_k joining vertices at
    ``d_upper <= t`` (scaled threshold)."""
    table = vertex_cell_table(k, N)
    members = _cell_vertex_lists(k, N)
    seen = {x_id}
    frontier = [x_id]
    hops = 0
    while frontier:
        hops += 1
        srcs = set()
        for v in frontier:
            srcs.update(table[v].tolist())
        reached = dijkstra_py(N, mu, srcs, bound=t)
        new = []
        for c in reached:
            for v in members[c]:
                if v not in seen:
                    seen.add(v)
                    new.append(v)
        if y_id in seen:
            return hops
        frontier = new
    return math.inf


@dataclass
class ThetaProfile:
    distance: Number
    rows: list  # (n, eps) pairs

    def scaled(self, theta: float) -> list:
        """``eps(n) * n**theta / d`` per row."""
        d = float(self.distance)
        return [(n, float(e) * n**theta / d) for n, e in self.rows]


def theta_chain_profile(
    x: PointRep, y: PointRep, k: int, N: int, mu, steps: Sequence[int]
) -> ThetaProfile:
    """Smallest achievable maximal gap ``eps(n)`` over sequences
    ``x = x_0, ..., x_n = y`` with intermediate points in ``V_k``.

    Gaps are measured with ``d_upper`` at depth N; the threshold is found by
    binary search over the lattice of attainable scaled weights (bisection
    when mu is inexact).
    """
    mu = as_mu(mu)
    if points_equal(x, y):
        raise ValueError("x and y must differ")
    g = build_vertex_graph(k)
    xi, yi = g.index.get(canonical(x)), g.index.get(canonical(y))
    if xi is None or yi is None:
        raise ValueError(f"endpoints must be vertices of V_{k}")
    d = d_upper(x, y, N, mu).value
    dS = mu.scale(d, N)
    cache = {}

    def hops(t):
        if t not in cache:
            cache[t] = _hops(xi, yi, k, N, mu, t)
        return cache[t]

    rows = []
    for n in steps:
        if n < 1:
            raise ValueError("steps must be >= 1")
        if mu.exact:
            lo, hi = 0, int(dS)  # hops(hi) == 1 <= n
            while hi - lo > 1:
                mid = (lo + hi) // 2
                if hops(mid) <= n:
                    hi = mid
                else:
                    lo = mid
            rows.append((n, mu.unscale(hi, N)))
        else:
            lo, hi = 0.0, float(dS)
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                if hops(mid) <= n:
                    hi = mid
                else:
                    lo = mid
                if hi - lo <= FLOAT_TOL * hi:
                    break
            rows.append((n, hi))
    return ThetaProfile(d, rows)
