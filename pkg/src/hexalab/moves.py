"""Corner and knight move regions, their exit distributions, Monte Carlo
walks, and hitting probabilities of paths before leaving a cell."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Optional, Sequence

import numpy as np
from scipy.sparse.csgraph import shortest_path

from .complex import MAX_VERTEX_LEVEL, build_vertex_graph, word_index
from .laplace import EXACT_MAX_UNKNOWNS, absorption_matrix, solve_dirichlet, DirichletProblem
from .symbolic import FaceRef, cell_intersects, face_vertices, fmt_word, format_point, glue_set

KINDS = ("corner", "knight1", "knight2")
# minimum exit probability through the target face, per move kind
BOUNDS = {"corner": Fraction(1, 8), "knight1": Fraction(1, 12), "knight2": Fraction(1, 8)}


class InfeasibleConfiguration(ValueError):
    """The base cells do not satisfy the premise of the requested move."""


def cell_vertex_ids(g, u: Sequence[int]) -> np.ndarray:
    """Ids of the vertices of ``H_k`` lying in ``K_u`` (``|u| <= k``)."""
    u = tuple(u)
    span = 6 ** (g.level - len(u))
    lo = word_index(u) * span
    return np.unique(g.cell_vertices[lo : lo + span])


def face_vertex_ids(g, f: FaceRef) -> np.ndarray:
    """Ids of the vertices of ``H_k`` on the face ``f`` (``|f.cell| <= k``)."""
    pts = face_vertices(f, g.level + 1)
    return np.array(sorted(g.index[p] for p in pts), dtype=np.int64)


def face_label(f: FaceRef) -> str:
    return f"{fmt_word(f.cell)}.{f.side}"


def _faces(cell) -> list:
    return [FaceRef(tuple(cell), s) for s in range(6)]


def _shared(g, f: FaceRef, others) -> bool:
    ids = set(face_vertex_ids(g, f).tolist())
    return any(ids & set(cell_vertex_ids(g, o).tolist()) for o in others)


def knight2_quadruple(w1: Sequence[int], w2: Sequence[int]) -> tuple:
    """Lexicographically first ``(i1, i2, j1, j2)`` with the cyclic
    intersection pattern ``w1 i1 ~ w2 j1 ~ w2 j2 ~ w1 i2 ~ w1 i1``."""
    w1, w2 = tuple(w1), tuple(w2)
    for i1, i2, j1, j2 in product(range(6), repeat=4):
        if i1 == i2 or j1 == j2:
            continue
        if (
            cell_intersects(w1 + (i1,), w2 + (j1,))
            and cell_intersects(w2 + (j1,), w2 + (j2,))
            and cell_intersects(w1 + (i2,), w2 + (j2,))
            and cell_intersects(w1 + (i1,), w1 + (i2,))
        ):
            return i1, i2, j1, j2
    raise InfeasibleConfiguration(f"no knight move quadruple for {fmt_word(w1)}, {fmt_word(w2)}")


@dataclass(frozen=True)
class MoveLayout:
    """Level-independent description of a move: cells, the candidate start
    faces and the absorbing faces (``parts``)."""

    kind: str
    base: tuple
    cells: tuple  # cells whose union is the region
    l0_candidates: tuple  # FaceRefs
    parts: tuple  # FaceRefs

    @property
    def part_level(self) -> int:
        return max(len(f.cell) for f in self.parts)


def move_layout(kind: str, base: Sequence[Sequence[int]]) -> MoveLayout:
    base = tuple(tuple(b) for b in base)
    if kind == "corner":
        if len(base) != 2:
            raise InfeasibleConfiguration("corner move needs two cells")
        w1, w2 = base
        if len(w1) != len(w2) or w1 == w2 or not w1 or not cell_intersects(w1, w2):
            raise InfeasibleConfiguration("corner move needs two distinct intersecting cells of one level >= 1")
        cells = (w1, w2)
    elif kind == "knight1":
        if len(base) != 1:
            raise InfeasibleConfiguration("knight move I needs one cell")
        (w,) = base
        cells = (w,)
        parts = tuple(FaceRef(w + (i,), s) for i in range(6) for s in (0, 5))
        l0 = tuple(FaceRef(w + (0,), c) for c in glue_set(0, 1))
        return MoveLayout(kind, base, cells, l0, parts)
    elif kind == "knight2":
        if len(base) != 2:
            raise InfeasibleConfiguration("knight move II needs two cells")
        w1, w2 = base
        if len(w1) != len(w2) or w1 == w2 or not w1 or not cell_intersects(w1, w2):
            raise InfeasibleConfiguration("knight move II needs two distinct intersecting cells of one level >= 1")
        i1, i2, j1, j2 = knight2_quadruple(w1, w2)
        cells = (w1 + (i1,), w2 + (j1,), w2 + (j2,), w1 + (i2,))
    else:
        raise ValueError(f"unknown move kind {kind!r}")
    # which faces are shared is decided on a level fine enough to see them
    g = build_vertex_graph(min(len(cells[0]) + 2, MAX_VERTEX_LEVEL))
    parts = []
    for c in cells:
        others = [o for o in cells if o != c]
        parts += [f for f in _faces(c) if not _shared(g, f, others)]
    l0 = tuple(f for f in _faces(cells[0]) if _shared(g, f, [cells[1]]))
    if len(l0) != 2 or len(parts) != 8:
        raise InfeasibleConfiguration(
            f"{kind} on {','.join(map(fmt_word, base))}: expected 2 shared and 8 free faces, "
            f"got {len(l0)} and {len(parts)}"
        )
    return MoveLayout(kind, base, cells, l0, tuple(parts))


def selection_level(layout: MoveLayout) -> int:
    return min(layout.part_level + 3, MAX_VERTEX_LEVEL)


def _region_ids(g, cells) -> np.ndarray:
    return np.unique(np.concatenate([cell_vertex_ids(g, c) for c in cells]))


def _region_distances(g, region: np.ndarray, sources) -> dict:
    """Graph distance inside the region from a vertex set."""
    from .laplace import _sub_adjacency

    A = _sub_adjacency(g, region)
    pos = {int(v): i for i, v in enumerate(region)}
    src = [pos[int(s)] for s in sources]
    d = shortest_path(A, directed=False, unweighted=True, indices=src).min(axis=0)
    return {int(v): d[i] for i, v in enumerate(region)}


def _set_distance(dist: dict, ids) -> float:
    return min(dist[int(v)] for v in ids)


@dataclass
class Orientation:
    l0: FaceRef
    target: FaceRef
    ties: tuple  # every part at the minimal distance
    l0_gap: float  # distance from L_0 to the absorbing boundary
    distances: dict  # part label -> distance from L_0


def orientations(layout: MoveLayout) -> list:
    """For each start face: the target face nearest to it in the graph on
    the region, measured at :func:`selection_level`."""
    g = build_vertex_graph(selection_level(layout))
    region = _region_ids(g, layout.cells)
    absorbing = np.concatenate([face_vertex_ids(g, f) for f in layout.parts])
    out = []
    for l0 in layout.l0_candidates:
        dist = _region_distances(g, region, face_vertex_ids(g, l0))
        dp = {f: _set_distance(dist, face_vertex_ids(g, f)) for f in layout.parts}
        best = min(dp.values())
        ties = tuple(f for f in layout.parts if dp[f] == best)
        out.append(
            Orientation(
                l0,
                ties[0],
                ties,
                _set_distance(dist, absorbing),
                {face_label(f): dp[f] for f in layout.parts},
            )
        )
    # the start face farthest from the absorbing boundary comes first
    out.sort(key=lambda o: (-o.l0_gap, o.l0.side))
    return out


@dataclass
class MoveConfig:
    kind: str
    base: tuple
    k: int
    cells: tuple
    region: np.ndarray
    l0: FaceRef
    parts: tuple  # parts[0] is the target face L_1
    target_ties: tuple
    start: np.ndarray
    part_ids: list
    orientation: int = 0

    @property
    def absorbing(self) -> np.ndarray:
        return np.concatenate(self.part_ids)

    @property
    def interior(self) -> np.ndarray:
        return np.setdiff1d(self.region, self.absorbing)

    @property
    def graph(self):
        return build_vertex_graph(self.k)


def make_move_configs(kind: str, base: Sequence[Sequence[int]], k: int) -> list:
    """One configuration per candidate start face L_0."""
    layout = move_layout(kind, base)
    if not layout.part_level <= k <= MAX_VERTEX_LEVEL:
        raise InfeasibleConfiguration(
            f"walk level must lie in {layout.part_level}..{MAX_VERTEX_LEVEL} for this move"
        )
    if len(layout.l0_candidates[0].cell) > k:
        raise InfeasibleConfiguration("start face has no vertices at this walk level")
    g = build_vertex_graph(k)
    region = _region_ids(g, layout.cells)
    out = []
    for idx, o in enumerate(orientations(layout)):
        parts = (o.target,) + tuple(f for f in layout.parts if f != o.target)
        part_ids = [face_vertex_ids(g, f) for f in parts]
        start = face_vertex_ids(g, o.l0)
        out.append(
            MoveConfig(kind, layout.base, k, layout.cells, region, o.l0, parts, o.ties, start, part_ids, idx)
        )
    return out


def make_move_config(kind: str, base, k: int, orientation: int = 0) -> MoveConfig:
    return make_move_configs(kind, base, k)[orientation]


@dataclass
class ExitReport:
    config: MoveConfig
    starts: list  # vertex ids
    probs: list  # probs[s][i] = P_start[exit through parts[i]]
    exact: bool

    @property
    def labels(self) -> list:
        return [f"L{i + 1}={face_label(f)}" for i, f in enumerate(self.config.parts)]

    def target_min(self) -> object:
        return min(r[0] for r in self.probs)

    def ties_min(self) -> object:
        idx = [self.config.parts.index(f) for f in self.config.target_ties]
        return min(r[i] for r in self.probs for i in idx)

    def row_sums(self) -> list:
        return [sum(r) for r in self.probs]

    def rows(self) -> list:
        """CSV rows ``kind,base,k,start,face,prob`` (plus the exact value)."""
        g = self.config.graph
        base = ",".join(fmt_word(b) for b in self.config.base)
        out = []
        for s, row in zip(self.starts, self.probs):
            for lab, p in zip(self.labels, row):
                rec = [self.config.kind, base, self.config.k, format_point(g.vertices[s]), lab, f"{float(p):.12g}"]
                if self.exact:
                    rec.append(f"{p.numerator}/{p.denominator}")
                out.append(rec)
        return out


def exit_distribution(c: MoveConfig, exact: Optional[bool] = None) -> ExitReport:
    """Exit probabilities through each part for every start vertex on L_0.

    Exact rational elimination is used whenever the interior is small
    enough (``exact=None``), otherwise sparse floating point.
    """
    interior = c.interior
    if exact is None:
        exact = len(interior) <= EXACT_MAX_UNKNOWNS
    starts = sorted(int(v) for v in c.start)
    probs = absorption_matrix(c.graph, interior, c.part_ids, starts, exact=exact)
    return ExitReport(c, starts, probs, exact)


# --- Monte Carlo -------------------------------------------------------------


@dataclass(frozen=True)
class WalkConfig:
    seed: int
    trials: int

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")

    def task_rng(self, i: int) -> np.random.Generator:
        """Independent stream for task ``i``, mixed from (seed, i) by SeedSequence."""
        return np.random.default_rng(np.random.SeedSequence([self.seed & (2**64 - 1), i]))


def walk_until_absorbed(g, start: int, absorbing_label: np.ndarray, trials: int, rng) -> np.ndarray:
    """Run ``trials`` simple random walks from ``start``; return the label
    of the absorbing vertex where each stops.  ``absorbing_label`` holds -1
    for transient vertices."""
    indptr, indices = g.indptr, g.indices
    deg = np.diff(indptr)
    pos = np.full(trials, start, dtype=np.int64)
    out = np.full(trials, -1, dtype=np.int64)
    alive = np.arange(trials)
    lab = absorbing_label[pos]
    hit = lab >= 0
    out[hit] = lab[hit]
    alive = alive[~hit]
    while len(alive):
        p = pos[alive]
        step = (rng.random(len(alive)) * deg[p]).astype(np.int64)
        p = indices[indptr[p] + step]
        pos[alive] = p
        lab = absorbing_label[p]
        hit = lab >= 0
        out[alive[hit]] = lab[hit]
        alive = alive[~hit]
    return out


@dataclass
class MCReport:
    config: MoveConfig
    starts: list
    counts: np.ndarray  # (starts, parts)
    trials: int

    @property
    def freqs(self) -> np.ndarray:
        return self.counts / self.trials


def mc_exit(c: MoveConfig, w: WalkConfig) -> MCReport:
    g = c.graph
    label = np.full(g.n_nodes, -1, dtype=np.int64)
    for i, ids in enumerate(c.part_ids):
        label[ids] = i
    starts = sorted(int(v) for v in c.start)
    counts = np.zeros((len(starts), len(c.parts)), dtype=np.int64)
    for t, s in enumerate(starts):
        hits = walk_until_absorbed(g, s, label, w.trials, w.task_rng(t))
        counts[t] = np.bincount(hits, minlength=len(c.parts))
    return MCReport(c, starts, counts, w.trials)


# --- hitting a path before leaving a cell ------------------------------------


def cell_boundary_ids(g, w: Sequence[int]) -> np.ndarray:
    w = tuple(w)
    return np.unique(np.concatenate([face_vertex_ids(g, FaceRef(w, i)) for i in range(6)]))


def hitting_function(w: Sequence[int], k: int, gamma: Sequence[int], exact: bool = True) -> dict:
    """For every vertex of ``H_k`` in ``K_w``: the probability that the walk
    hits ``gamma`` before reaching the boundary of ``K_w`` (hits on
    ``gamma`` win ties)."""
    w = tuple(w)
    g = build_vertex_graph(k)
    region = set(cell_vertex_ids(g, w).tolist())
    gam = set(int(v) for v in gamma)
    if not gam or not gam <= region:
        raise ValueError("gamma must be a nonempty path inside the cell")
    bnd = set(cell_boundary_ids(g, w).tolist()) - gam
    interior = sorted(region - gam - bnd)
    boundary = sorted(gam) + sorted(bnd)
    values = [1] * len(gam) + [0] * len(bnd)
    return solve_dirichlet(DirichletProblem(g, interior, boundary, values), exact=exact)


def hit_before_exit(w: Sequence[int], k: int, x: int, gamma: Sequence[int], exact: bool = True):
    """Probability that the walk on H_k from vertex ``x`` hits ``gamma``
    before reaching the boundary of ``K_w``."""
    h = hitting_function(w, k, gamma, exact=exact)
    if int(x) not in h:
        raise ValueError("x must lie in the cell")
    return h[int(x)]


def _inside_neighbours(g, v: int, region: set) -> list:
    return [int(u) for u in g.indices[g.indptr[v] : g.indptr[v + 1]] if int(u) in region]


def loop_erased_path(g, w: Sequence[int], y: int, rng) -> list:
    """Loop-erased random walk in ``K_w`` from ``y`` until it reaches the
    boundary of ``K_w``."""
    region = set(cell_vertex_ids(g, w).tolist())
    bnd = set(cell_boundary_ids(g, w).tolist())
    path = [int(y)]
    where = {int(y): 0}
    while path[-1] not in bnd:
        nb = _inside_neighbours(g, path[-1], region)
        v = nb[int(rng.integers(len(nb)))]
        if v in where:
            cut = where[v] + 1
            for u in path[cut:]:
                del where[u]
            path = path[:cut]
        else:
            where[v] = len(path)
            path.append(v)
    return path


def geodesic_paths(g, w: Sequence[int], y: int) -> list:
    """One shortest path inside ``K_w`` from ``y`` to each nearest boundary vertex."""
    from .laplace import _sub_adjacency

    region = np.asarray(sorted(cell_vertex_ids(g, w).tolist()))
    pos = {int(v): i for i, v in enumerate(region)}
    A = _sub_adjacency(g, region)
    d, pred = shortest_path(A, directed=False, unweighted=True, indices=[pos[int(y)]], return_predecessors=True)
    d, pred = d[0], pred[0]
    bnd = [pos[int(b)] for b in cell_boundary_ids(g, w)]
    best = min(d[b] for b in bnd)
    out = []
    for b in sorted(b for b in bnd if d[b] == best):
        path = [b]
        while path[-1] != pos[int(y)]:
            path.append(int(pred[path[-1]]))
        out.append([int(region[i]) for i in reversed(path)])
    return out
