"""Approximating graphs: the cell graph G_n, the vertex graph H_n and the
multi-level chain complex over all words of length <= N.

Graphs are stored as CSR arrays (``indptr``, ``indices``) over integer node
ids; node ids follow lexicographic order so builds are reproducible.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components, shortest_path

from .symbolic import (
    TAILS,
    PointRep,
    _last_glue_index,
    canonical,
    cell_intersects,
    format_point,
    glue_set,
    parse_point,
    partner,
    same_level_neighbors,
    sorted_points,
    word,
    words,
)

SCHEMA = "hexalab-graph-v1"
MAX_CELL_LEVEL = 8
MAX_VERTEX_LEVEL = 6
MAX_COMPLEX_DEPTH = 7
EXACT_DIAMETER_NODES = 50_000
SCAN_DIAMETER_NODES = 5_000


class ResourceLimitError(ValueError):
    """A size guard was exceeded."""


class SchemaError(ValueError):
    """A cache file does not carry the expected schema tag or layout."""


def _csr_from_pairs(n: int, src, dst) -> tuple:
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    m = sp.csr_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n, n))
    m.sum_duplicates()
    m.sort_indices()
    return m.indptr.astype(np.int64), m.indices.astype(np.int32)


class _CSRGraph:
    indptr: np.ndarray
    indices: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.indptr) - 1

    @property
    def n_edges(self) -> int:
        return len(self.indices) // 2

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    def adjacency(self) -> sp.csr_matrix:
        data = np.ones(len(self.indices), dtype=np.float64)
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n_nodes,) * 2)

    def edge_list(self) -> np.ndarray:
        """Undirected edges ``(i, j)`` with ``i < j``, sorted."""
        rows = np.repeat(np.arange(self.n_nodes), np.diff(self.indptr))
        mask = rows < self.indices
        return np.stack([rows[mask], self.indices[mask]], axis=1)

    def is_connected(self) -> bool:
        n, _ = connected_components(self.adjacency(), directed=False)
        return n == 1


@dataclass(eq=False)
class SimpleGraph(_CSRGraph):
    indptr: np.ndarray
    indices: np.ndarray


def simple_graph(n: int, edges) -> SimpleGraph:
    """Undirected simple graph on ``range(n)`` from an edge list."""
    e = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
    e = e[e[:, 0] != e[:, 1]]
    indptr, indices = _csr_from_pairs(n, np.r_[e[:, 0], e[:, 1]], np.r_[e[:, 1], e[:, 0]])
    return SimpleGraph(indptr, indices)


# --- cell graph ------------------------------------------------------------


def word_index(w: Sequence[int]) -> int:
    """Position of ``w`` among the words of its length (base-6 value)."""
    i = 0
    for s in w:
        i = 6 * i + s
    return i


def index_word(i: int, n: int) -> tuple:
    out = [0] * n
    for k in range(n - 1, -1, -1):
        i, out[k] = divmod(i, 6)
    return tuple(out)


@dataclass(eq=False)
class CellGraph(_CSRGraph):
    level: int
    indptr: np.ndarray
    indices: np.ndarray

    def word(self, i: int) -> tuple:
        return index_word(i, self.level)

    def index(self, w: Sequence[int]) -> int:
        return word_index(w)

    @property
    def nodes(self) -> list:
        return list(words(self.level))


def build_cell_graph(n: int) -> CellGraph:
    if not 1 <= n <= MAX_CELL_LEVEL:
        raise ResourceLimitError(f"cell graph level must be in 1..{MAX_CELL_LEVEL}, got {n}")
    return _cell_graph_cached(n)


@lru_cache(maxsize=None)
def _cell_graph_cached(n: int) -> CellGraph:
    src, dst = [], []
    for i, w in enumerate(words(n)):
        for v in same_level_neighbors(w):
            src.append(i)
            dst.append(word_index(v))
    indptr, indices = _csr_from_pairs(6**n, src, dst)
    return CellGraph(n, indptr, indices)


# --- vertex graph ----------------------------------------------------------


@dataclass(eq=False)
class VertexGraph(_CSRGraph):
    level: int
    vertices: list
    indptr: np.ndarray
    indices: np.ndarray
    # cell_vertices[c] holds the 12 vertex ids of the c-th level-n cell
    cell_vertices: np.ndarray
    index: dict = field(repr=False, default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {p: i for i, p in enumerate(self.vertices)}

    def vertex_id(self, p: PointRep) -> int:
        return self.index[canonical(p)]


def build_vertex_graph(n: int) -> VertexGraph:
    if not 0 <= n <= MAX_VERTEX_LEVEL:
        raise ResourceLimitError(f"vertex graph level must be in 0..{MAX_VERTEX_LEVEL}, got {n}")
    return _vertex_graph_cached(n)


@lru_cache(maxsize=None)
def _vertex_graph_cached(n: int) -> VertexGraph:
    ncell = 6**n
    reps = []
    for w in words(n):
        for i in range(6):
            for j in TAILS:
                reps.append(canonical(PointRep(w + (i,), j)))
    verts = sorted_points(set(reps))
    index = {p: k for k, p in enumerate(verts)}
    cell_vertices = np.array([index[p] for p in reps], dtype=np.int32).reshape(ncell, 12)
    # each cell contributes K_12; the union is taken as a simple graph
    a = np.repeat(cell_vertices, 12, axis=1).ravel()
    b = np.tile(cell_vertices, (1, 12)).ravel()
    keep = a != b
    indptr, indices = _csr_from_pairs(len(verts), a[keep], b[keep])
    return VertexGraph(n, verts, indptr, indices, cell_vertices, index)


# --- distances and diameter -----------------------------------------------


def _bfs(g: _CSRGraph, sources) -> np.ndarray:
    return shortest_path(g.adjacency(), directed=False, unweighted=True, indices=sources)


def graph_distance(g: _CSRGraph, src: int) -> np.ndarray:
    """BFS distances from ``src``; ``inf`` marks unreachable nodes."""
    if not 0 <= src < g.n_nodes:
        raise IndexError(f"node {src} not in graph")
    return _bfs(g, [src])[0]


@dataclass
class DiameterBounds:
    lower: int
    upper: int
    bfs_runs: int

    @property
    def exact(self) -> bool:
        return self.lower == self.upper


def _eccentricities(A: sp.csr_matrix, nodes, chunk: int = 64) -> np.ndarray:
    out = []
    nodes = list(nodes)
    for s in range(0, len(nodes), chunk):
        d = shortest_path(A, directed=False, unweighted=True, indices=nodes[s : s + chunk])
        out.append(d.max(axis=1))
    return np.concatenate(out) if out else np.zeros(0)


def _ifub(g: _CSRGraph, max_bfs: Optional[int] = None) -> DiameterBounds:
    A = g.adjacency()
    deg = g.degree()
    r = int(np.argmax(deg))
    d_r = shortest_path(A, directed=False, unweighted=True, indices=[r])[0]
    if np.isinf(d_r).any():
        raise ValueError("graph is disconnected")
    a = int(np.argmax(d_r))
    d_a, pred = shortest_path(
        A, directed=False, unweighted=True, indices=[a], return_predecessors=True
    )
    d_a, pred = d_a[0], pred[0]
    b = int(np.argmax(d_a))
    lb = int(d_a[b])
    path = [b]
    while path[-1] != a:
        path.append(int(pred[path[-1]]))
    u = path[len(path) // 2]
    d_u = shortest_path(A, directed=False, unweighted=True, indices=[u])[0].astype(np.int64)
    runs = 3
    i = int(d_u.max())
    lb = max(lb, i)
    ub = 2 * i
    while ub > lb:
        if max_bfs is not None and runs >= max_bfs:
            break
        fringe = np.flatnonzero(d_u == i)
        ecc = _eccentricities(A, fringe)
        runs += len(fringe)
        lb = max(lb, int(ecc.max()))
        # every remaining pair lies within level i-1 of u
        ub = max(lb, 2 * (i - 1))
        i -= 1
    return DiameterBounds(lb, ub, runs)


def diameter(g: _CSRGraph, mode: str = "exact", max_bfs: Optional[int] = None):
    """Graph diameter.

    ``mode="exact"`` returns an int: an all-source scan for small graphs,
    otherwise iFUB run to completion.  ``mode="bounds"`` returns a
    :class:`DiameterBounds` from double sweep plus iFUB pruning, stopped
    after ``max_bfs`` BFS runs if given.
    """
    if mode == "exact":
        if g.n_nodes > EXACT_DIAMETER_NODES:
            raise ResourceLimitError(
                f"exact diameter limited to {EXACT_DIAMETER_NODES} nodes, graph has {g.n_nodes}"
            )
        if g.n_nodes <= SCAN_DIAMETER_NODES:
            ecc = _eccentricities(g.adjacency(), range(g.n_nodes))
            if np.isinf(ecc).any():
                raise ValueError("graph is disconnected")
            return int(ecc.max())
        return _ifub(g).lower
    if mode == "bounds":
        return _ifub(g, max_bfs=max_bfs)
    raise ValueError(f"unknown mode {mode!r}")


def diameter_scan(g: _CSRGraph) -> int:
    """Brute-force all-source eccentricity scan (no size guard)."""
    return int(_eccentricities(g.adjacency(), range(g.n_nodes)).max())


# --- chain complex ---------------------------------------------------------


def level_offset(l: int) -> int:
    """Id of the first word of length ``l`` in the chain complex."""
    return (6**l - 1) // 5


def complex_id(w: Sequence[int]) -> int:
    return level_offset(len(w)) + word_index(w)


def complex_word(i: int) -> tuple:
    l = 0
    while level_offset(l + 1) <= i:
        l += 1
    return index_word(i - level_offset(l), l)


def lateral_neighbors(u: Sequence[int], N: int) -> list:
    """Words ``v`` with ``|v| <= N`` meeting ``K_u`` where neither word is a
    prefix of the other."""
    u = tuple(u)
    L = len(u)
    out = []
    if L == 0:
        return out
    m = _last_glue_index(u)
    if m >= 1:
        base = u[: m - 1] + (partner(u[m - 1], u[m]),)
        q = u[m:]
        for r in range(len(q) + 1):
            out.append(base + q[:r])
        for r in range(1, N - L + 1):
            for t in product(TAILS, repeat=r):
                out.append(base + q + t)
    head, a = u[:-1], u[-1]
    for b in ((a - 1) % 6, (a + 1) % 6):
        base = head + (b,)
        out.append(base)
        for c in glue_set(a, b):
            for r in range(N - L):
                for t in product(TAILS, repeat=r):
                    out.append(base + (c,) + t)
    return out


def enumerate_chain_neighbors(u: Sequence[int], N: int) -> set:
    """All ``v != u`` with ``|v| <= N`` and ``K_u`` meeting ``K_v``."""
    u = tuple(u)
    if len(u) > N:
        raise ValueError("word longer than the complex depth")
    out = {u[:k] for k in range(len(u))}
    for r in range(1, N - len(u) + 1):
        for t in product(range(6), repeat=r):
            out.add(u + t)
    out.update(v for v in lateral_neighbors(u, N) if len(v) <= N)
    return {v for v in out if cell_intersects(u, v)}


@dataclass(eq=False)
class ChainComplex(_CSRGraph):
    """All words of length <= depth; arcs join intersecting cells that are
    not nested.  Containment pairs are implied by prefixes and never lie on
    a minimum-weight chain, so they are left implicit (see
    :func:`enumerate_chain_neighbors` for the full neighbourhood)."""

    depth: int
    indptr: np.ndarray
    indices: np.ndarray
    mu: object = None

    @property
    def levels(self) -> np.ndarray:
        out = np.empty(self.n_nodes, dtype=np.int64)
        for l in range(self.depth + 1):
            out[level_offset(l) : level_offset(l + 1)] = l
        return out

    def id(self, w: Sequence[int]) -> int:
        return complex_id(w)

    def word(self, i: int) -> tuple:
        return complex_word(i)

    def neighbors_of(self, w: Sequence[int]) -> set:
        return enumerate_chain_neighbors(w, self.depth)

    def level_slice(self, l: int) -> set:
        """Same-level arcs at level ``l`` as a set of word pairs."""
        lo, hi = level_offset(l), level_offset(l + 1)
        out = set()
        for i in range(lo, hi):
            for j in self.neighbors(i):
                if lo <= j < hi:
                    out.add((index_word(i - lo, l), index_word(int(j) - lo, l)))
        return out


def build_chain_complex(N: int, mu=None) -> ChainComplex:
    if not 0 <= N <= MAX_COMPLEX_DEPTH:
        raise ResourceLimitError(f"chain complex depth must be in 0..{MAX_COMPLEX_DEPTH}, got {N}")
    base = _complex_cached(N)
    if mu is None:
        return base
    return ChainComplex(base.depth, base.indptr, base.indices, mu)


@lru_cache(maxsize=None)
def _complex_cached(N: int) -> ChainComplex:
    n = level_offset(N + 1)
    src, dst = [], []
    for l in range(1, N + 1):
        off = level_offset(l)
        for k, u in enumerate(words(l)):
            i = off + k
            for v in lateral_neighbors(u, N):
                src.append(i)
                dst.append(complex_id(v))
    indptr, indices = _csr_from_pairs(n, src, dst)
    return ChainComplex(N, indptr, indices)


# --- cache files -----------------------------------------------------------


def graph_to_json(g) -> dict:
    if isinstance(g, CellGraph):
        kind, lvl = "G", {"level": g.level}
        verts = ["".join(map(str, w)) for w in words(g.level)]
    elif isinstance(g, VertexGraph):
        kind, lvl = "H", {"level": g.level}
        verts = [format_point(p) for p in g.vertices]
    elif isinstance(g, ChainComplex):
        kind, lvl = "complex", {"depth": g.depth}
        verts = [
            "".join(map(str, w)) for l in range(g.depth + 1) for w in words(l)
        ]
    else:
        raise TypeError(f"cannot serialise {type(g).__name__}")
    edges = g.edge_list().tolist()
    return {"schema": SCHEMA, "kind": kind, **lvl, "vertices": verts, "edges": edges}


def save_graph(g, path) -> None:
    doc = graph_to_json(g)
    Path(path).write_text(json.dumps(doc, separators=(",", ":")) + "\n")


def graph_from_json(doc: dict):
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA:
        raise SchemaError(f"expected schema {SCHEMA!r}, got {doc.get('schema') if isinstance(doc, dict) else doc!r}")
    kind = doc.get("kind")
    verts = doc["vertices"]
    edges = np.asarray(doc["edges"], dtype=np.int64).reshape(-1, 2)
    n = len(verts)
    src = np.concatenate([edges[:, 0], edges[:, 1]])
    dst = np.concatenate([edges[:, 1], edges[:, 0]])
    indptr, indices = _csr_from_pairs(n, src, dst)
    if kind == "G":
        lvl = int(doc["level"])
        if verts != ["".join(map(str, w)) for w in words(lvl)]:
            raise SchemaError("cell graph vertex table is not the sorted word list")
        return CellGraph(lvl, indptr, indices)
    if kind == "H":
        lvl = int(doc["level"])
        pts = [parse_point(s) for s in verts]
        index = {p: i for i, p in enumerate(pts)}
        cells = [
            [index[canonical(PointRep(w + (i,), j))] for i in range(6) for j in TAILS]
            for w in words(lvl)
        ]
        return VertexGraph(lvl, pts, indptr, indices, np.array(cells, dtype=np.int32), index)
    if kind == "complex":
        depth = int(doc["depth"])
        if len(verts) != level_offset(depth + 1):
            raise SchemaError("complex vertex table has the wrong size")
        # the file lists undirected edges; recover the arc layout
        return ChainComplex(depth, indptr, indices)
    raise SchemaError(f"unknown graph kind {kind!r}")


def load_graph(path):
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not JSON ({exc})") from exc
    return graph_from_json(doc)


def graphs_equal(g1, g2) -> bool:
    if type(g1) is not type(g2):
        return False
    if isinstance(g1, VertexGraph) and g1.vertices != g2.vertices:
        return False
    return np.array_equal(g1.indptr, g2.indptr) and np.array_equal(g1.indices, g2.indices)
