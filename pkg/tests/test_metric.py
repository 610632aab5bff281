import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hexalab.complex import build_vertex_graph, complex_id
from hexalab.metric import (
    WeightParam,
    ball_vertices,
    cell_measure,
    chain_eval,
    chain_weight,
    crossing_min_weight,
    d_lower,
    d_upper,
    dijkstra_py,
    distances_from_cells,
    doubling_chain,
    hausdorff_dim,
    is_chain,
    is_oai,
    localized_distance,
    metric_matrix,
    min_oai_crossing,
    oai_normalize,
    theta_chain_profile,
    vertex_distances,
)
from hexalab.symbolic import cells_containing, parse_point, point_in_cell, shift, words

from oracles import brute_chain_distance

P = parse_point
HALF = Fraction(1, 2)


def verts(k):
    return build_vertex_graph(k).vertices


def test_weight_param_parsing():
    assert WeightParam.parse("1/2").value == HALF and WeightParam.parse("1/2").exact
    assert WeightParam.parse("0.4").value == Fraction(2, 5)
    assert not WeightParam.parse("0.123456789").exact
    for bad in ["1", "0", "3/2", "x"]:
        with pytest.raises(ValueError):
            WeightParam.parse(bad)
    assert WeightParam.parse("1/2").metric_regime and not WeightParam.parse("2/5").metric_regime


@pytest.mark.parametrize("mu", ["1/2", "2/3", "2/5"])
def test_d_upper_matches_brute_force(mu):
    rng = random.Random(7)
    vs = verts(2)
    for _ in range(12):
        x, y = rng.sample(vs, 2)
        assert d_upper(x, y, 3, mu).value == brute_chain_distance(x, y, 3, Fraction(mu))


def test_scipy_and_python_engines_agree():
    mu = WeightParam(HALF)
    for x in verts(1)[:10]:
        src = [complex_id(c) for c in cells_containing(x, 5)]
        fast = distances_from_cells(5, mu, src)
        slow = dijkstra_py(5, mu, src)
        assert all(fast[i] == v for i, v in slow.items())


def test_diameter_value():
    for N in range(1, 7):
        assert d_upper(P(":0"), P("30:0"), N, "1/2").value == 1


def test_pinned_doubling_pair_value():
    assert d_upper(P(":0"), P("1:0"), 6, "1/2").value == 1


def test_identity_short_circuit():
    r = d_upper(P("01:0"), P("11:0"), 4, "1/2")
    assert r.value == 0 and len(r.witness) == 1


def test_witness_is_valid_minimum_chain():
    rng = random.Random(3)
    vs = verts(2)
    for _ in range(30):
        x, y = rng.sample(vs, 2)
        r = d_upper(x, y, 4, "2/3")
        ok, w = chain_eval(r.witness, x, y, "2/3")
        assert ok and w == r.value


def test_witness_deterministic():
    a = d_upper(P("2:0"), P("514:5"), 5, "1/2")
    b = d_upper(P("2:0"), P("514:5"), 5, "1/2")
    assert a == b


def test_degenerate_regime():
    for N in range(1, 7):
        assert d_upper(P(":0"), P("1:0"), N, "2/5").value <= Fraction(4, 5) ** N


@pytest.mark.parametrize("mu", ["1/2", "3/5"])
def test_monotone_symmetric_triangle(mu):
    rng = random.Random(11)
    vs = verts(2)
    for _ in range(15):
        x, y, z = rng.sample(vs, 3)
        for N in range(1, 5):
            assert d_upper(x, y, N + 1, mu).value <= d_upper(x, y, N, mu).value
        dxy = d_upper(x, y, 4, mu).value
        assert dxy == d_upper(y, x, 4, mu).value
        assert dxy <= d_upper(x, z, 4, mu).value + d_upper(z, y, 4, mu).value
        assert dxy <= 1


def test_float_mu_close_to_exact():
    x, y = P("0:5"), P("41:0")
    exact = d_upper(x, y, 4, "1/2").value
    approx = d_upper(x, y, 4, WeightParam(0.5 + 1e-15)).value
    assert math.isclose(float(exact), approx, rel_tol=1e-9)


def test_self_similarity_small():
    rng = random.Random(5)
    vs = verts(1)
    for _ in range(6):
        x, y = rng.sample(vs, 2)
        for i in range(6):
            loc = localized_distance(shift(i, x), shift(i, y), (i,), 4, "1/2")
            assert loc == HALF * d_upper(x, y, 3, "1/2").value


def test_cell_diameter_attained():
    for w in [(), (2,), (0, 3)]:
        d = localized_distance(P("".join(map(str, w)) + "0:0"), P("".join(map(str, w)) + "3:0"), w, len(w) + 3, "1/2")
        assert d == HALF ** len(w)


def test_d_lower_examples():
    assert d_lower(P("2:0"), P("2:0"), "1/2").value == 0
    r = d_lower(P("02:0"), P("32:0"), "1/2")
    assert r.value >= HALF
    # boundary pair where disjointness only appears at level 2
    r = d_lower(P("01:0"), P("21:0"), "1/2")
    assert r.value == 1 and r.certificate.startswith("opposite")
    assert d_lower(P(":0"), P("3:0"), "2/5").value == 0


def test_sandwich_random_pairs():
    rng = random.Random(17)
    vs = verts(2)
    for _ in range(150):
        x, y = rng.sample(vs, 2)
        assert d_lower(x, y, "1/2").value <= d_upper(x, y, 4, "1/2").value


def test_metric_matrix_symmetric():
    vs = verts(1)[:8]
    m = metric_matrix(vs, 3, "1/2")
    for i in range(8):
        assert m[i][i] == 0
        for j in range(8):
            assert m[i][j] == m[j][i]


def test_vertex_distances_consistent():
    x = P("03:0")
    ds = vertex_distances(x, 2, 4, "1/2")
    for v, d in list(zip(verts(2), ds))[::17]:
        assert d == d_upper(x, v, 4, "1/2").value


def test_ball_vertices():
    x = P("021:0")
    g = build_vertex_graph(2)
    inner, outer = ball_vertices(x, Fraction(3, 2), 2, 4, "1/2")
    assert inner == outer == set(range(g.n_nodes))
    inner, outer = ball_vertices(x, Fraction(1, 10**6), 2, 4, "1/2")
    assert inner == {g.vertex_id(x)}
    inner, outer = ball_vertices(x, Fraction(1, 8), 2, 4, "1/2")
    assert inner <= outer


def test_ball_inside_cell():
    # center vertex w22 0^inf of K_{w22}; radius mu^(|w|+2)
    for w in [(), (4,)]:
        x = P("".join(map(str, w + (2, 2))) + ":0")
        k = len(w) + 3
        _, outer = ball_vertices(x, HALF ** (len(w) + 2), k, len(w) + 4, "1/2")
        vs = verts(k)
        assert all(point_in_cell(vs[i], w) for i in outer)


def test_doubling_chain():
    assert doubling_chain(1) == ((0,), (1,))
    assert doubling_chain(2) == ((0, 0), (0, 1), (1, 1), (1, 0))
    for n in range(1, 11):
        c = doubling_chain(n)
        ok, w = chain_eval(c, P(":0"), P("1:0"), "1/3")
        assert ok and w == Fraction(2, 3) ** n


def test_chain_eval_examples():
    assert chain_eval([()], P("2:0"), P("4:5"), "1/2") == (True, 1)
    assert not chain_eval([(0,), (3,)], P(":0"), P("3:0"), "1/2")[0]


def test_oai_normalize_examples():
    assert oai_normalize([(0,), (1,), (0,)]) == ((0,),)
    assert oai_normalize([(0,), (0, 1)]) == ((0,),)
    c = doubling_chain(3)
    assert oai_normalize(c) == c


chains = st.lists(st.lists(st.integers(0, 5), max_size=3).map(tuple), min_size=1, max_size=8)


@given(chains)
def test_oai_normalize_properties(c):
    if not is_chain(c):
        return
    out = oai_normalize(c)
    assert is_chain(out) and is_oai(out)
    assert chain_weight(out, "1/2") <= chain_weight(c, "1/2")
    assert point_in_cell(P("".join(map(str, c[0])) + ":0"), out[0])
    assert point_in_cell(P("".join(map(str, c[-1])) + ":5"), out[-1])


def test_crossing_bound_level2():
    for w in words(2):
        assert crossing_min_weight(w, 4, "1/2") >= Fraction(1, 4)
    best, _ = min_oai_crossing((0, 1), 4, "1/2", cap=Fraction(1, 4))
    assert best is None


def test_hausdorff_and_measure():
    assert abs(hausdorff_dim("1/2") - math.log(6) / math.log(2)) < 1e-12
    with pytest.raises(ValueError):
        hausdorff_dim("2/5")
    for n in range(4):
        assert sum(cell_measure(w) for w in words(n)) == 1
    assert cell_measure((1, 2)) == 6 * cell_measure((1, 2, 0))


def test_theta_profile_small():
    p = theta_chain_profile(P(":0"), P("30:0"), 3, 4, "1/2", [1, 2, 4, 8, 16])
    eps = [e for _, e in p.rows]
    assert eps[0] == p.distance == 1
    assert all(a >= b for a, b in zip(eps, eps[1:]))
