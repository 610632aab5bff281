"""Discrete harmonic analysis on the vertex graphs H_k.

Dirichlet problems and harmonic measure for the simple random walk, solved
either in floating point (sparse direct / conjugate gradient) or exactly
with rational Gaussian elimination over ``gmpy2.mpq``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import gmpy2
import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components, reverse_cuthill_mckee
from scipy.sparse.linalg import cg, splu

EXACT_MAX_UNKNOWNS = 3000


class AbsorptionError(ValueError):
    """Some interior vertex cannot reach the boundary."""


@dataclass
class DirichletProblem:
    """Harmonic extension of ``values`` on ``boundary`` into ``interior``.

    ``graph`` is anything exposing ``indptr``/``indices`` CSR arrays.
    """

    graph: object
    interior: np.ndarray
    boundary: np.ndarray
    values: Sequence = field(default_factory=list)

    def __post_init__(self):
        self.interior = np.asarray(sorted(set(int(v) for v in self.interior)), dtype=np.int64)
        self.boundary = np.asarray([int(v) for v in self.boundary], dtype=np.int64)
        if len(set(self.boundary.tolist())) != len(self.boundary):
            raise ValueError("boundary vertices repeat")
        if self.values is not None and len(self.values) and len(self.values) != len(self.boundary):
            raise ValueError("one boundary value per boundary vertex")
        check_absorbing(self.graph, self.interior, self.boundary)


def check_absorbing(graph, interior, boundary) -> None:
    inter = set(np.asarray(interior).tolist())
    bnd = set(np.asarray(boundary).tolist())
    if inter & bnd:
        raise ValueError("interior and boundary overlap")
    for v in inter:
        for u in graph.indices[graph.indptr[v] : graph.indptr[v + 1]]:
            if int(u) not in inter and int(u) not in bnd:
                raise ValueError(f"interior vertex {v} has a neighbour outside the problem")
    if not inter:
        return
    # every interior component must touch the boundary
    A = _sub_adjacency(graph, np.asarray(sorted(inter)))
    ncomp, lab = connected_components(A, directed=False)
    touched = np.zeros(ncomp, dtype=bool)
    for i, v in enumerate(sorted(inter)):
        nb = graph.indices[graph.indptr[v] : graph.indptr[v + 1]]
        if any(int(u) in bnd for u in nb):
            touched[lab[i]] = True
    if not touched.all():
        raise AbsorptionError("an interior component never reaches the boundary")


def _sub_adjacency(graph, nodes: np.ndarray) -> sp.csr_matrix:
    n = len(graph.indptr) - 1
    A = sp.csr_matrix(
        (np.ones(len(graph.indices)), graph.indices, graph.indptr), shape=(n, n)
    )
    return A[nodes][:, nodes]


def _system(graph, interior: np.ndarray, boundary: np.ndarray):
    """``L = D_I - A_II`` and ``A_IB`` (degrees taken in the full graph)."""
    n = len(graph.indptr) - 1
    A = sp.csr_matrix(
        (np.ones(len(graph.indices)), graph.indices, graph.indptr), shape=(n, n)
    )
    deg = np.diff(graph.indptr)[interior].astype(np.float64)
    A_I = A[interior]
    L = (sp.diags(deg) - A_I[:, interior]).tocsr()
    return L, A_I[:, boundary].tocsr()


# --- exact elimination -----------------------------------------------------


def exact_solve(L: sp.csr_matrix, rhs: Sequence[dict]) -> list:
    """Solve ``L X = R`` over the rationals.

    ``L`` has integer entries and is symmetric positive definite, so
    elimination without pivoting in any symmetric order is safe; the order
    comes from reverse Cuthill-McKee to limit fill.  ``rhs[i]`` maps column
    keys to values for row ``i``.  Returns one ``{key: mpq}`` dict per row.
    """
    n = L.shape[0]
    if n > EXACT_MAX_UNKNOWNS:
        raise ValueError(f"exact elimination limited to {EXACT_MAX_UNKNOWNS} unknowns")
    L = L.tocsr()
    rows = []
    colrows = defaultdict(set)
    for i in range(n):
        lo, hi = L.indptr[i], L.indptr[i + 1]
        r = {int(c): gmpy2.mpq(int(round(v))) for c, v in zip(L.indices[lo:hi], L.data[lo:hi]) if v}
        rows.append(r)
        for c in r:
            colrows[c].add(i)
    b = [{k: gmpy2.mpq(v) for k, v in d.items()} for d in rhs]
    order = reverse_cuthill_mckee(L, symmetric_mode=True) if n else []
    done = np.zeros(n, dtype=bool)
    for k in order:
        k = int(k)
        piv = rows[k]
        pk = piv[k]
        for i in list(colrows[k]):
            if i == k or done[i]:
                continue
            ri = rows[i]
            f = ri.pop(k) / pk
            colrows[k].discard(i)
            for c, v in piv.items():
                if c == k:
                    continue
                nv = ri.get(c, 0) - f * v
                if nv:
                    if c not in ri:
                        colrows[c].add(i)
                    ri[c] = nv
                elif c in ri:
                    del ri[c]
                    colrows[c].discard(i)
            bi = b[i]
            for key, v in b[k].items():
                nv = bi.get(key, 0) - f * v
                if nv:
                    bi[key] = nv
                else:
                    bi.pop(key, None)
        done[k] = True
    x = [None] * n
    for k in reversed(list(order)):
        k = int(k)
        piv = rows[k]
        acc = dict(b[k])
        for c, v in piv.items():
            if c == k:
                continue
            for key, xv in x[c].items():
                acc[key] = acc.get(key, 0) - v * xv
        x[k] = {key: v / piv[k] for key, v in acc.items() if v}
    return x


def _to_fraction(v) -> Fraction:
    v = gmpy2.mpq(v)
    return Fraction(int(v.numerator), int(v.denominator))


# --- float solves ------------------------------------------------------------


def _float_solve(L: sp.csr_matrix, R: np.ndarray, tol: float) -> np.ndarray:
    R = np.asarray(R, dtype=np.float64)
    single = R.ndim == 1
    if single:
        x, info = cg(L, R, rtol=tol * 1e-2, atol=0.0, maxiter=20 * L.shape[0] + 100)
        if info == 0 and _residual(L, x, R) <= tol:
            return x
        R = R[:, None]
    X = splu(L.tocsc()).solve(R)
    if _residual(L, X, R) > tol:
        raise ArithmeticError("linear solve did not reach the residual tolerance")
    return X[:, 0] if single else X


def _residual(L, X, R) -> float:
    nr = np.linalg.norm(R)
    if nr == 0:
        return float(np.linalg.norm(L @ X))
    return float(np.linalg.norm(L @ X - R) / nr)


# --- public solvers ------------------------------------------------------------


def solve_dirichlet(p: DirichletProblem, tol: float = 1e-10, exact: bool = False) -> dict:
    """Values of the harmonic extension on interior and boundary vertices."""
    vals = list(p.values) if len(p.values) else [0] * len(p.boundary)
    out = {int(z): v for z, v in zip(p.boundary, vals)}
    if not len(p.interior):
        return out
    L, AB = _system(p.graph, p.interior, p.boundary)
    if exact:
        g = [gmpy2.mpq(Fraction(v)) for v in vals]
        rhs = []
        for i in range(L.shape[0]):
            lo, hi = AB.indptr[i], AB.indptr[i + 1]
            s = sum((g[c] * int(a) for c, a in zip(AB.indices[lo:hi], AB.data[lo:hi])), gmpy2.mpq(0))
            rhs.append({0: s} if s else {})
        x = exact_solve(L, rhs)
        for v, xv in zip(p.interior, x):
            out[int(v)] = _to_fraction(xv.get(0, 0))
        return out
    b = AB @ np.asarray(vals, dtype=np.float64)
    x = _float_solve(L, b, tol)
    for v, xv in zip(p.interior, x):
        out[int(v)] = float(xv)
    return out


def absorption_matrix(
    graph,
    interior: Sequence[int],
    groups: Sequence[Sequence[int]],
    starts: Sequence[int],
    exact: bool = False,
    tol: float = 1e-10,
):
    """``P[s][g]``: probability that the walk from ``starts[s]`` is first
    absorbed in ``groups[g]``.  Groups partition the absorbing set; starts in
    a group are absorbed there at time zero."""
    interior = np.asarray(sorted(set(int(v) for v in interior)), dtype=np.int64)
    bnd = [int(z) for grp in groups for z in grp]
    gid = {int(z): g for g, grp in enumerate(groups) for z in grp}
    if len(gid) != len(bnd):
        raise ValueError("absorbing groups overlap")
    check_absorbing(graph, interior, bnd)
    m = len(groups)
    pos = {int(v): i for i, v in enumerate(interior)}
    one = Fraction(1) if exact else 1.0
    zero = Fraction(0) if exact else 0.0
    result = []
    X = None
    if len(interior):
        L, AB = _system(graph, interior, np.asarray(bnd, dtype=np.int64))
        G = sp.csr_matrix(
            (np.ones(len(bnd)), ([i for i in range(len(bnd))], [gid[z] for z in bnd])),
            shape=(len(bnd), m),
        )
        R = (AB @ G).tocsr()
        if exact:
            rhs = [
                {int(c): int(round(v)) for c, v in zip(R.indices[R.indptr[i] : R.indptr[i + 1]], R.data[R.indptr[i] : R.indptr[i + 1]])}
                for i in range(R.shape[0])
            ]
            X = exact_solve(L, rhs)
        else:
            X = _float_solve(L, R.toarray(), tol)
    for s in starts:
        s = int(s)
        if s in gid:
            result.append([one if g == gid[s] else zero for g in range(m)])
        elif s in pos:
            if exact:
                row = X[pos[s]]
                result.append([_to_fraction(row.get(g, 0)) for g in range(m)])
            else:
                result.append([float(v) for v in X[pos[s]]])
        else:
            raise ValueError(f"start {s} is neither interior nor absorbing")
    return result


@dataclass
class HarmonicMeasure:
    starts: list
    boundary: list
    rows: list  # rows[i][j] = h(starts[i], boundary[j])
    exact: bool

    def row_sums(self) -> list:
        return [sum(r) for r in self.rows]


def harmonic_measure(graph, interior, boundary, starts=None, exact=False) -> HarmonicMeasure:
    """Exit distribution over individual boundary vertices."""
    boundary = [int(z) for z in boundary]
    starts = sorted(int(v) for v in interior) if starts is None else [int(v) for v in starts]
    rows = absorption_matrix(graph, interior, [[z] for z in boundary], starts, exact=exact)
    return HarmonicMeasure(starts, boundary, rows, exact)


def harmonic_support(graph, interior, boundary, starts) -> np.ndarray:
    """Boolean ``(len(starts), len(boundary))``: where harmonic measure is positive.

    The walk from an interior vertex reaches exactly the boundary vertices
    adjacent to its interior component.
    """
    interior = np.asarray(sorted(set(int(v) for v in interior)), dtype=np.int64)
    boundary = [int(z) for z in boundary]
    bpos = {z: j for j, z in enumerate(boundary)}
    lab = {}
    comp_bnd = []
    if len(interior):
        ncomp, labels = connected_components(_sub_adjacency(graph, interior), directed=False)
        comp_bnd = [set() for _ in range(ncomp)]
        for v, c in zip(interior.tolist(), labels):
            lab[v] = c
            for u in graph.indices[graph.indptr[v] : graph.indptr[v + 1]]:
                if int(u) in bpos:
                    comp_bnd[c].add(bpos[int(u)])
    out = np.zeros((len(starts), len(boundary)), dtype=bool)
    for i, s in enumerate(starts):
        s = int(s)
        if s in bpos:
            out[i, bpos[s]] = True
        else:
            out[i, sorted(comp_bnd[lab[s]])] = True
    return out
