"""Brute-force reference implementations used only by the test-suite."""

from itertools import product

from hexalab.symbolic import TAILS, PointRep, canonical, glue_set


def glue_pairs(max_prefix: int):
    """Every identified pair generated straight from the gluing rule,
    restricted to prefixes of length <= max_prefix."""
    out = set()
    for lw in range(max_prefix - 1):
        for w in product(range(6), repeat=lw):
            for i in range(6):
                j = (i + 1) % 6
                for c in glue_set(i, j):
                    for lv in range(max_prefix - lw - 1):
                        for v in product(TAILS, repeat=lv):
                            for tail in TAILS:
                                p = PointRep(w + (i, c) + v, tail)
                                q = PointRep(w + (j, c) + v, tail)
                                out.add((p, q))
                                out.add((q, p))
    return out


def cell_points(w, depth=3):
    """Canonical points ``w t j^inf`` with ``t`` in W^depth."""
    w = tuple(w)
    return {canonical(PointRep(w + t, j)) for t in product(range(6), repeat=depth) for j in TAILS}


def brute_chain_distance(x, y, N, mu):
    """Dijkstra over every word of length <= N using cell_intersects directly
    (containment edges included) with Fraction weights."""
    import heapq
    from fractions import Fraction

    from hexalab.symbolic import cell_intersects, point_in_cell, points_equal

    if points_equal(x, y):
        return Fraction(0)
    mu = Fraction(mu)
    ws = [w for n in range(N + 1) for w in product(range(6), repeat=n)]
    heap = [(mu ** len(w), w) for w in ws if point_in_cell(x, w)]
    heapq.heapify(heap)
    done = set()
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        if point_in_cell(y, u):
            return d
        for v in ws:
            if v not in done and cell_intersects(u, v):
                heapq.heappush(heap, (d + mu ** len(v), v))
    raise AssertionError("no chain")
