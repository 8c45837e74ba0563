from __future__ import annotations

import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from linea import geometry as geo
from linea.exceptions import ConfigError, NotAdjacent
from linea.proximity import BuildingRecord, ProximityEdge, make_buildings, rng_build
from linea.relations import (
    Thresholds,
    clamp_length,
    enumerate_adjacent_pairs,
    linear_triple,
    similarity,
    triple_pattern_passes,
)

from conftest import rect, square
from test_proximity import random_layout

T = Thresholds()


def edge_between(a: BuildingRecord, b: BuildingRecord) -> ProximityEdge:
    if a.id > b.id:
        a, b = b, a
    return ProximityEdge(
        a.id,
        b.id,
        geo.min_distance(a.footprint, b.footprint),
        geo.direction_deg(a.centroid, b.centroid),
        geo.facing_ratio(a.sbr, b.sbr),
    )


# -- thresholds -----------------------------------------------------------------


def test_default_thresholds():
    assert T.as_dict() == dict(delta1=2.0, delta2=20.0, delta3=1.5, eta1=15.0, eta2=2.0, eta3=0.3, td=2.0)


def test_td_follows_map_scale():
    assert Thresholds.for_map_scale(10_000).td == pytest.approx(2.0)
    assert Thresholds.for_map_scale(25_000).td == pytest.approx(5.0)
    assert Thresholds.for_map_scale(25_000, td=1.0).td == 1.0


@pytest.mark.parametrize(
    "kw", [dict(delta1=0.5), dict(eta2=0.9), dict(eta3=1.5), dict(td=0), dict(delta2=-1), dict(eta1="x"), dict(td=True)]
)
def test_invalid_thresholds(kw):
    with pytest.raises(ConfigError):
        Thresholds(**kw)


# -- similarity ------------------------------------------------------------------


def test_similarity_identical():
    a, b = make_buildings([square(0, 0), square(20, 0)])
    assert similarity(a, b, T) == (1.0, 0.0, 1.0, True)


def test_similarity_area_ratio_too_large():
    a, b = make_buildings([square(0, 0, 10), rect(30, 5, 10, 21)])
    r = similarity(a, b, T)
    assert r.a_r == pytest.approx(2.1)
    assert not r.passed


def test_similarity_orientation_wraps():
    a, b = make_buildings([rect(0, 0, 20, 10, 5), rect(40, 0, 20, 10, 175)])
    r = similarity(a, b, T)
    assert r.o_r == pytest.approx(10)
    assert r.passed


def test_similarity_edge_count():
    l_shape = geo.Polygon(((0, 0), (20, 0), (20, 10), (10, 10), (10, 20), (0, 20)))
    a, b = make_buildings([square(0, 0, 15), l_shape.translated(40, 0)])
    r = similarity(a, b, T)
    assert r.e_r == pytest.approx(1.5)
    assert r.passed
    assert not similarity(a, b, T.with_(delta3=1.4)).passed


# -- clamp -----------------------------------------------------------------------


@pytest.mark.parametrize("le,td,out", [(1.5, 2, 2), (5, 2, 5), (2, 2, 2)])
def test_clamp_length(le, td, out):
    assert clamp_length(le, td) == out


# -- linear triple ---------------------------------------------------------------


def test_linear_triple_equal_spacing_passes():
    a, b, c = make_buildings([square(0, 0), square(20, 0), square(40, 0)])
    r = linear_triple(edge_between(a, b), edge_between(b, c), T)
    assert (r.d_o, r.d_l, r.fr_ij, r.fr_jk) == pytest.approx((0, 1, 1, 1))
    assert r.passed


def test_linear_triple_bent_fails():
    # the third centroid sits 20 degrees off the line of the first two
    x = 20 + 20 * math.cos(math.radians(20))
    y = 20 * math.sin(math.radians(20))
    a, b, c = make_buildings([rect(0, 0, 6, 16), rect(20, 0, 6, 16), rect(x, y, 6, 16)])
    r = linear_triple(edge_between(a, b), edge_between(b, c), T)
    assert r.d_o == pytest.approx(20)
    assert not r.passed
    assert linear_triple(edge_between(a, b), edge_between(b, c), T.with_(eta1=21)).passed


def test_linear_triple_length_ratio_with_clamp():
    a, b, c = make_buildings([square(0, 0), square(11, 0), square(31, 0)])
    e1, e2 = edge_between(a, b), edge_between(b, c)
    assert (e1.le, e2.le) == pytest.approx((1, 10))
    r = linear_triple(e1, e2, T)
    assert r.d_l == pytest.approx(5)
    assert not r.passed


def test_linear_triple_low_facing_ratio_fails():
    e1 = ProximityEdge(0, 1, 5, 0, 0.9)
    e2 = ProximityEdge(1, 2, 5, 0, 0.29)
    assert not linear_triple(e1, e2, T).passed
    assert linear_triple(e1, ProximityEdge(1, 2, 5, 0, 0.3), T).passed


def test_linear_triple_not_adjacent():
    with pytest.raises(NotAdjacent):
        linear_triple(ProximityEdge(0, 1, 1, 0, 1), ProximityEdge(2, 3, 1, 0, 1), T)
    with pytest.raises(NotAdjacent):
        linear_triple(ProximityEdge(0, 1, 1, 0, 1), ProximityEdge(0, 1, 1, 0, 1), T)


edges_st = st.builds(
    lambda le, ori, fr: (le, ori, fr), st.floats(0, 50), st.floats(0, 179.99), st.floats(0, 1)
)


@given(edges_st, edges_st, st.floats(0.01, 5))
def test_linear_triple_symmetric_and_in_range(p, q, td):
    t = T.with_(td=td)
    e1 = ProximityEdge(0, 1, *p)
    e2 = ProximityEdge(1, 2, *q)
    r1 = linear_triple(e1, e2, t)
    r2 = linear_triple(e2, e1, t)
    assert (r1.d_o, r1.d_l, r1.passed) == (pytest.approx(r2.d_o), pytest.approx(r2.d_l), r2.passed)
    assert (r1.fr_ij, r1.fr_jk) == (r2.fr_jk, r2.fr_ij)
    assert 0 <= r1.d_o <= 90 and r1.d_l >= 1
    assert r1.passed == (
        geo.orientations_within(p[1], q[1], t.eta1) and r1.d_l <= t.eta2 and p[2] >= t.eta3 and q[2] >= t.eta3
    )


@given(st.floats(0.1, 50), st.floats(0.1, 50))
def test_vanishing_td_gives_raw_ratio(l1, l2):
    r = linear_triple(ProximityEdge(0, 1, l1, 0, 1), ProximityEdge(1, 2, l2, 0, 1), T.with_(td=1e-9))
    assert r.d_l == pytest.approx(max(l1, l2) / min(l1, l2))


@given(st.integers(0, 10_000))
def test_similarity_symmetric(seed):
    b = random_layout(seed, 6)
    for x in b:
        for y in b:
            r1, r2 = similarity(x, y, T), similarity(y, x, T)
            assert r1.passed == r2.passed
            assert (r1.a_r, r1.o_r, r1.e_r) == pytest.approx((r2.a_r, r2.o_r, r2.e_r))
            assert r1.a_r >= 1 and r1.e_r >= 1 and 0 <= r1.o_r <= 90


@given(st.integers(0, 10_000), st.floats(0.2, 20))
def test_scaling_invariance(seed, s):
    rng = random.Random(seed)
    polys = [rect(20 * k + rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(5, 12), rng.uniform(5, 12), rng.uniform(0, 30)) for k in range(4)]
    b = make_buildings(polys)
    bs = make_buildings([p.scaled(s) for p in polys])
    ts = T.with_(td=T.td * s)
    for i, j in ((0, 1), (1, 2), (2, 3)):
        r, rs = similarity(b[i], b[j], T), similarity(bs[i], bs[j], ts)
        assert (rs.o_r, rs.e_r) == pytest.approx((r.o_r, r.e_r), abs=1e-6)
        e, es = edge_between(b[i], b[j]), edge_between(bs[i], bs[j])
        assert es.le == pytest.approx(e.le * s, rel=1e-6, abs=1e-9)
        assert es.fr == pytest.approx(e.fr, abs=1e-6)
    for i, j, k in ((0, 1, 2), (1, 2, 3)):
        r = linear_triple(edge_between(b[i], b[j]), edge_between(b[j], b[k]), T)
        rs = linear_triple(edge_between(bs[i], bs[j]), edge_between(bs[j], bs[k]), ts)
        assert rs.d_o == pytest.approx(r.d_o, abs=1e-6)
        # pass decisions agree unless a value sits on a threshold
        near = min(abs(r.d_o - T.eta1), abs(r.d_l - T.eta2), abs(r.fr_ij - T.eta3), abs(r.fr_jk - T.eta3))
        if near > 1e-6:
            assert rs.passed == r.passed


# -- adjacency -------------------------------------------------------------------


def test_pairs_of_chain():
    ps = enumerate_adjacent_pairs([ProximityEdge(0, 1, 1, 0, 1), ProximityEdge(1, 2, 1, 0, 1)])
    assert [(p.i, p.j, p.k) for p in ps] == [(0, 1, 2)]


def test_pairs_of_star():
    edges = [ProximityEdge(0, k, 1, 0, 1) for k in (1, 2, 3)]
    assert [(p.i, p.j, p.k) for p in enumerate_adjacent_pairs(edges)] == [(1, 0, 2), (1, 0, 3), (2, 0, 3)]


@given(st.integers(0, 10_000))
def test_pairs_match_brute_force(seed):
    edges = rng_build(random_layout(seed, 30))
    expected = set()
    for a in edges:
        for b in edges:
            if a is b:
                continue
            shared = {a.i, a.j} & {b.i, b.j}
            if len(shared) == 1:
                (j,) = shared
                i, k = sorted((a.other(j), b.other(j)))
                expected.add((i, j, k))
    got = enumerate_adjacent_pairs(edges)
    assert len(got) == len(expected)
    assert {(p.i, p.j, p.k) for p in got} == expected
    for p in got:
        assert {p.e_ij.i, p.e_ij.j} == {p.i, p.j} and {p.e_jk.i, p.e_jk.j} == {p.j, p.k}


@given(st.integers(0, 10_000))
def test_cached_attributes_match_raw_footprints(seed):
    b = random_layout(seed, 12)
    recs = {x.id: x for x in b}
    raw = {x.id: BuildingRecord.from_polygon(x.id, geo.Polygon(x.footprint.ring)) for x in b}
    edges = rng_build(b)
    by_pair = {(e.i, e.j): e for e in edges}
    for p in enumerate_adjacent_pairs(edges):
        e1 = edge_between(raw[p.i], raw[p.j])
        e2 = edge_between(raw[p.j], raw[p.k])
        cached_e1 = by_pair[(e1.i, e1.j)]
        assert (cached_e1.le, cached_e1.e_ori, cached_e1.fr) == pytest.approx((e1.le, e1.e_ori, e1.fr))
        cached = triple_pattern_passes(recs, p, T)
        fresh = (
            similarity(raw[p.i], raw[p.j], T).passed
            and similarity(raw[p.j], raw[p.k], T).passed
            and linear_triple(e1, e2, T).passed
        )
        assert cached == fresh
