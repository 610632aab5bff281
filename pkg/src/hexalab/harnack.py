"""Empirical Harnack constants on intrinsic balls of H_n."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.sparse.csgraph import connected_components

from .complex import build_vertex_graph
from .laplace import _sub_adjacency, absorption_matrix, harmonic_support
from .metric import as_mu, d_lower, vertex_distances
from .symbolic import PointRep, canonical, format_point


@dataclass
class HarnackReport:
    n: int
    x: PointRep
    j: int
    N: int
    mu: str
    ratio: float
    vacuous: bool
    component_size: int
    ball_size: int
    inner_size: int  # |S|
    interior_size: int
    disconnected: bool
    outer_size: Optional[int] = None  # ball size from the lower bound, if computed

    def row(self) -> list:
        return [
            self.n,
            format_point(self.x),
            self.j,
            self.N,
            self.mu,
            f"{self.ratio:.12g}",
            int(self.vacuous),
            self.component_size,
        ]


def harnack_ratio(n: int, x: PointRep, j: int, N: int, mu, with_outer: bool = False) -> HarnackReport:
    """Largest ratio ``h(v, z) / h(v', z)`` of harmonic measures over centres
    ``v, v'`` within ``mu * r`` of ``x``, with ``r = mu**j``.

    The ball is the inner (upper-bound) ball of radius ``r`` in ``V_n``,
    restricted to the component of ``x``; its interior is the set of ball
    vertices whose neighbours all lie in the ball.
    """
    mu = as_mu(mu)
    if not mu.metric_regime:
        raise ValueError("Harnack scan needs mu >= 1/2")
    if j < 1:
        raise ValueError("radius exponent must be >= 1")
    g = build_vertex_graph(n)
    x = canonical(x)
    xi = g.index[x]
    r = mu.power(j)
    dist = vertex_distances(x, n, N, mu)
    ball = np.array([i for i, d in enumerate(dist) if d < r], dtype=np.int64)
    A = _sub_adjacency(g, ball)
    _, lab = connected_components(A, directed=False)
    xpos = int(np.searchsorted(ball, xi))
    comp = ball[lab == lab[xpos]]
    comp_set = set(comp.tolist())
    interior = [
        int(v)
        for v in comp
        if all(int(u) in comp_set for u in g.indices[g.indptr[v] : g.indptr[v + 1]])
    ]
    inter_set = set(interior)
    boundary = [int(v) for v in comp if int(v) not in inter_set]
    S = [int(v) for v in comp if dist[v] < mu.value * r]
    outer = None
    if with_outer:
        outer = sum(1 for p in g.vertices if d_lower(x, p, mu).value < r)
    rep = dict(
        n=n,
        x=x,
        j=j,
        N=N,
        mu=str(mu),
        component_size=len(comp),
        ball_size=len(ball),
        inner_size=len(S),
        interior_size=len(interior),
        disconnected=len(comp) < len(ball),
        outer_size=outer,
    )
    if len(S) <= 1 or not interior or not boundary:
        return HarnackReport(ratio=1.0, vacuous=True, **rep)
    H = np.array(absorption_matrix(g, interior, [[z] for z in boundary], S), dtype=np.float64)
    supp = harmonic_support(g, interior, boundary, S)
    ratio = 1.0
    for a in range(len(S)):
        for b in range(len(S)):
            m = supp[b] & supp[a]
            if m.any():
                ratio = max(ratio, float(np.max(H[a, m] / H[b, m])))
    return HarnackReport(ratio=ratio, vacuous=False, **rep)


def harnack_scan(ns, cell=(), j_range=None, N_offset: int = 2, mu="1/2") -> list:
    """Reports for every vertex of ``V_n`` in ``K_cell`` and every ``j``."""
    from .moves import cell_vertex_ids

    out = []
    for n in ns:
        g = build_vertex_graph(n)
        js = range(1, n + 1) if j_range is None else j_range
        for v in cell_vertex_ids(g, cell):
            for j in js:
                out.append(harnack_ratio(n, g.vertices[int(v)], j, n + N_offset, mu))
    return out
