import json

import numpy as np
import pytest

from hexalab.complex import (
    DiameterBounds,
    ResourceLimitError,
    SchemaError,
    build_cell_graph,
    build_chain_complex,
    build_vertex_graph,
    complex_id,
    complex_word,
    diameter,
    diameter_scan,
    enumerate_chain_neighbors,
    graph_distance,
    graph_from_json,
    graph_to_json,
    graphs_equal,
    load_graph,
    save_graph,
)
from hexalab.symbolic import PointRep, canonical, cell_intersects, twin, words


def test_g1_is_hexagon():
    g = build_cell_graph(1)
    assert {tuple(sorted((int(a), int(b)))) for a, b in g.edge_list()} == {
        (i, (i + 1) % 6) if i < 5 else (0, 5) for i in range(6)
    }
    assert diameter(g) == 3
    assert graph_distance(g, 0)[3] == 3


def test_g2_edges_match_oracle():
    g = build_cell_graph(2)
    ws = list(words(2))
    brute = sum(cell_intersects(u, v) for i, u in enumerate(ws) for v in ws[i + 1 :])
    assert g.n_edges == brute
    assert g.degree().max() <= 3


@pytest.mark.parametrize("n", range(1, 7))
def test_cell_graph_connected_and_sparse(n):
    g = build_cell_graph(n)
    assert g.n_nodes == 6**n and g.is_connected() and g.degree().max() <= 3


def test_vertex_graph_small():
    h0 = build_vertex_graph(0)
    assert h0.n_nodes == 12 and h0.n_edges == 66 and diameter(h0) == 1
    h1 = build_vertex_graph(1)
    assert h1.n_nodes == 48
    deg = h1.degree()
    for i, p in enumerate(h1.vertices):
        assert deg[i] == (19 if twin(p) is not None else 11)


@pytest.mark.parametrize("n", range(0, 5))
def test_vertex_count_identity(n):
    h = build_vertex_graph(n)
    e = build_cell_graph(n).n_edges if n else 0
    assert h.n_nodes == 12 * 6**n - 4 * e
    # same count straight from canonicalisation
    reps = {canonical(PointRep(w + (i,), j)) for w in words(n) for i in range(6) for j in (0, 5)}
    assert len(reps) == h.n_nodes
    assert h.is_connected()


def test_vertex_graph_simple():
    h = build_vertex_graph(2)
    el = h.edge_list()
    assert len({tuple(e) for e in el.tolist()}) == len(el)
    assert all(a != b for a, b in el)


def test_distances_symmetric():
    g = build_cell_graph(4)
    rng = np.random.default_rng(1)
    for a, b in rng.integers(0, g.n_nodes, size=(100, 2)):
        assert graph_distance(g, int(a))[b] == graph_distance(g, int(b))[a]
    assert graph_distance(g, 5)[5] == 0


@pytest.mark.parametrize("n", range(1, 6))
def test_ifub_matches_scan(n):
    g = build_cell_graph(n)
    b = diameter(g, mode="bounds")
    assert isinstance(b, DiameterBounds) and b.exact
    assert b.lower == diameter_scan(g)


def test_bounds_budget_brackets_diameter():
    g = build_cell_graph(5)
    d = diameter_scan(g)
    b = diameter(g, mode="bounds", max_bfs=4)
    assert b.lower <= d <= b.upper


def test_guards():
    with pytest.raises(ResourceLimitError):
        build_cell_graph(9)
    with pytest.raises(ResourceLimitError):
        build_vertex_graph(7)
    with pytest.raises(ResourceLimitError):
        build_chain_complex(8)
    with pytest.raises(ResourceLimitError):
        diameter(build_cell_graph(7))


def test_diameter_doubling():
    ds = [diameter(build_cell_graph(n)) for n in range(1, 6)]
    assert all(b >= 2 * a for a, b in zip(ds, ds[1:]))


def test_complex_ids_roundtrip():
    for n in range(4):
        for w in words(n):
            assert complex_word(complex_id(w)) == w


def test_chain_complex_neighbours_match_oracle():
    cc = build_chain_complex(3)
    assert cc.n_nodes == 259
    ws = [w for n in range(4) for w in words(n)]
    for u in ws:
        brute = {v for v in ws if v != u and cell_intersects(u, v)}
        assert enumerate_chain_neighbors(u, 3) == brute
        lateral = {v for v in brute if v[: len(u)] != u and u[: len(v)] != v}
        assert {complex_word(int(j)) for j in cc.neighbors(complex_id(u))} == lateral
        if u:
            assert u[:-1] in brute


def test_chain_complex_level_slices_match_cell_graphs():
    cc = build_chain_complex(4)
    for l in range(1, 5):
        g = build_cell_graph(l)
        edges = {(g.word(int(a)), g.word(int(b))) for a, b in g.edge_list()}
        edges |= {(b, a) for a, b in edges}
        assert cc.level_slice(l) == edges


@pytest.mark.parametrize("kind", ["G", "H", "complex"])
def test_cache_roundtrip(tmp_path, kind):
    g = {"G": build_cell_graph(2), "H": build_vertex_graph(2), "complex": build_chain_complex(2)}[kind]
    path = tmp_path / "g.json"
    save_graph(g, path)
    assert graphs_equal(load_graph(path), g)


def test_cache_rejects_bad_schema():
    doc = graph_to_json(build_vertex_graph(1))
    doc["schema"] = "hexalab-graph-v0"
    with pytest.raises(SchemaError):
        graph_from_json(json.loads(json.dumps(doc)))
