import pytest

from hexalab.complex import build_vertex_graph
from hexalab.harnack import harnack_ratio, harnack_scan
from hexalab.symbolic import parse_point


def test_ratio_at_least_one():
    for r in harnack_scan([2, 3], cell=(1,)):
        assert r.ratio >= 1
        assert r.component_size <= r.ball_size


def test_smallest_radius_is_vacuous():
    # at r = mu^n the ball around a vertex of V_n has no interior vertex
    g = build_vertex_graph(3)
    for p in g.vertices[:12]:
        r = harnack_ratio(3, p, 3, 5, "1/2")
        assert r.vacuous and r.ratio == 1 and r.interior_size == 0


def test_nonvacuous_case():
    r = harnack_ratio(3, parse_point("000:0"), 1, 5, "1/2")
    assert not r.vacuous and r.inner_size > 1 and r.ratio > 1
    assert r.row()[:4] == [3, ":0", 1, 5]  # 000:0 canonicalizes to :0


def test_rejects_degenerate_mu():
    with pytest.raises(ValueError):
        harnack_ratio(2, parse_point(":0"), 1, 4, "2/5")
