import math
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hexalab.symbolic import (
    FaceRef,
    PointRep,
    canonical,
    cell_intersects,
    cell_vertices,
    delta_r,
    face_vertices,
    first_divergence,
    format_point,
    parse_point,
    point_in_cell,
    point_on_face,
    points_equal,
    representatives,
    same_level_neighbors,
    shift,
    twin,
    words,
)

from oracles import cell_points, glue_pairs

P = parse_point

points = st.builds(
    PointRep,
    st.lists(st.integers(0, 5), max_size=7).map(tuple),
    st.sampled_from((0, 5)),
)
short_words = st.lists(st.integers(0, 5), max_size=5).map(tuple)


def test_parse_and_normal_form():
    assert P("010:0") == PointRep((0, 1), 0)
    assert P(":0").prefix == ()
    assert format_point(P("0500:0")) == "05:0"
    for bad in ["01", "01:3", "7:0", "a:5"]:
        with pytest.raises(ValueError):
            P(bad)


def test_first_divergence_examples():
    assert first_divergence(P(":0"), P("1:0")) == 1
    assert first_divergence(P("01:0"), P("01:0")) == math.inf
    assert first_divergence(P("01:0"), P("015:0")) == 3
    assert delta_r(P(":0"), P("1:0"), 0.3) == 0.3
    assert delta_r(P("2:0"), P("2:0"), 0.3) == 0.0


@given(points, points, points)
def test_delta_ultrametric(p, q, r):
    assert delta_r(p, r, 0.5) <= max(delta_r(p, q, 0.5), delta_r(q, r, 0.5))


def test_twin_examples():
    assert twin(P("01:0")) == P("11:0")
    assert twin(P(":0")) is None
    assert twin(P("235:0")) == P("135:0")
    assert twin(P("011:0")) == P("001:0")


def test_twin_matches_brute_force_gluing():
    pairs = dict(glue_pairs(5))
    for n in range(5):
        for pre in product(range(6), repeat=n):
            for tail in (0, 5):
                p = PointRep(pre, tail)
                if len(p.prefix) != n:
                    continue
                assert twin(p) == pairs.get(p), p


@given(points)
def test_twin_involution_and_fiber(p):
    t = twin(p)
    if t is not None:
        assert t != p
        assert twin(t) == p
    assert len(set(representatives(p))) <= 2


@given(points)
def test_canonical_idempotent(p):
    c = canonical(p)
    assert canonical(c) == c
    assert points_equal(p, c)


def test_canonical_examples():
    assert canonical(P("11:0")) == P("01:0")
    assert canonical(P(":0")) == P(":0")
    assert points_equal(P("01:0"), P("11:0"))
    assert not points_equal(P(":0"), P("1:0"))


def test_cell_and_face_membership():
    assert point_in_cell(P("11:0"), (0,))
    assert point_in_cell(P(":0"), (0, 0))
    assert not point_in_cell(P("000:0"), (1,))
    assert point_on_face(P(":0"), FaceRef((), 0))
    assert point_on_face(P("05:0"), FaceRef((), 0))
    assert not any(point_on_face(P("01:0"), FaceRef((), i)) for i in range(6))


def test_cell_intersects_examples():
    assert cell_intersects((0,), (1,)) and cell_intersects((1,), (2,))
    assert cell_intersects((0, 1), (1, 1))
    assert not cell_intersects((0,), (2,))
    assert not cell_intersects((0,), (3,))


def test_cell_intersects_matches_point_oracle():
    # all words of length <= 3
    ws = [w for n in range(4) for w in words(n)]
    pts = {w: cell_points(w) for w in ws}
    mismatches = [
        (u, v) for u in ws for v in ws if cell_intersects(u, v) != bool(pts[u] & pts[v])
    ]
    assert mismatches == []


@given(short_words, short_words)
def test_cell_intersects_symmetric(u, v):
    assert cell_intersects(u, v) == cell_intersects(v, u)
    assert cell_intersects(u, u)


@given(short_words, short_words, st.integers(0, 5))
def test_cell_intersects_monotone(u, v, s):
    # shrinking one cell can only lose intersections
    if cell_intersects(u + (s,), v):
        assert cell_intersects(u, v)


def test_same_level_neighbors_examples():
    assert same_level_neighbors((0, 0)) == {(0, 1), (0, 5)}
    assert same_level_neighbors((0, 1)) == {(0, 0), (0, 2), (1, 1)}
    assert same_level_neighbors((0,)) == {(1,), (5,)}
    with pytest.raises(ValueError):
        same_level_neighbors(())


def test_same_level_neighbors_brute_force_level2():
    ws = list(words(2))
    for w in ws:
        brute = {v for v in ws if v != w and cell_intersects(w, v)}
        assert same_level_neighbors(w) == brute


def test_neighbor_structure_through_level_6():
    for n in range(1, 7):
        for w in words(n):
            nb = same_level_neighbors(w)
            sib = {v for v in nb if v[:-1] == w[:-1]}
            assert len(nb) <= 3 and len(sib) == 2 and len(nb - sib) <= 1
            assert all(cell_intersects(w, v) for v in nb)


def test_face_vertices_counts():
    assert len(face_vertices(FaceRef((), 0), 2)) == 4
    assert len(face_vertices(FaceRef((), 0), 1)) == 2
    fv = face_vertices(FaceRef((0,), 1), 2)
    glued = [p for p in fv if twin(p) is not None]
    assert glued and all(point_in_cell(p, (1,)) for p in glued)


def test_faces_pairwise_disjoint():
    for n in range(3):
        for w in words(n):
            for k in range(len(w) + 1, len(w) + 4):
                fs = [face_vertices(FaceRef(w, i), k) for i in range(6)]
                for i in range(6):
                    for j in range(i + 1, 6):
                        assert not fs[i] & fs[j]


def test_shift_examples():
    assert shift(3, P(":0")) == P("3:0")
    assert shift(0, P("1:0")) == P("01:0")


@given(points, st.integers(0, 5))
def test_shift_commutes_with_gluing(p, i):
    t = twin(p)
    if t is not None:
        assert canonical(shift(i, p)) == canonical(shift(i, t))


def test_cell_vertices_distinct():
    for n in range(3):
        for w in words(n):
            assert len(set(cell_vertices(w))) == 12
