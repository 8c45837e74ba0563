from __future__ import annotations

import math
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.sparse.csgraph import minimum_spanning_tree
from scipy.spatial import Delaunay

from linea import geometry as geo
from linea.exceptions import EmptyDataset
from linea.geometry import Polyline
from linea.proximity import ProximityEdge, distance_matrix, make_buildings, rng_build

from conftest import rect, square


def tiny(x: float, y: float, side: float = 1e-3):
    return square(x - side / 2, y - side / 2, side)


def rng_oracle(dm: np.ndarray) -> set[tuple[int, int]]:
    """Relative neighbourhood graph straight from its definition, O(n^3)."""
    n = len(dm)
    out = set()
    for i in range(n):
        for j in range(i + 1, n):
            if not any(max(dm[i, k], dm[j, k]) < dm[i, j] for k in range(n) if k not in (i, j)):
                out.add((i, j))
    return out


def random_layout(seed: int, n: int, extent: float = 200.0):
    """``n`` non-overlapping rotated rectangles on a jittered grid."""
    rng = random.Random(seed)
    cols = max(1, int(math.ceil(math.sqrt(n))))
    cell = extent / cols
    polys = []
    for k in range(n):
        r, c = divmod(k, cols)
        w = rng.uniform(0.15, 0.4) * cell
        h = rng.uniform(0.15, 0.4) * cell
        cx = (c + 0.5) * cell + rng.uniform(-0.2, 0.2) * cell
        cy = (r + 0.5) * cell + rng.uniform(-0.2, 0.2) * cell
        polys.append(rect(cx, cy, w, h, rng.uniform(0, 180)))
    return make_buildings(polys)


def pairs(edges):
    return {(e.i, e.j) for e in edges}


# -- examples ------------------------------------------------------------------


def test_collinear_tiny_squares():
    b = make_buildings([tiny(0, 0), tiny(1, 0), tiny(2, 0)])
    assert pairs(rng_build(b)) == {(0, 1), (1, 2)}


def test_equilateral_keeps_all_edges():
    # an equilateral point triangle has no exact float coordinates; these
    # three squares are each exactly 10 m apart by footprint distance
    b = make_buildings([square(0, 0), square(20, 0), square(10, 20)])
    dm = distance_matrix(b)
    assert dm[0, 1] == dm[0, 2] == dm[1, 2] == 10.0
    for exact in (True, False):
        assert pairs(rng_build(b, exact=exact)) == {(0, 1), (0, 2), (1, 2)}


def test_unit_square_corners_give_sides_only():
    b = make_buildings([tiny(0, 0), tiny(1, 0), tiny(1, 1), tiny(0, 1)])
    assert pairs(rng_build(b)) == {(0, 1), (1, 2), (2, 3), (0, 3)}


def test_road_between_removes_edge():
    b = make_buildings([square(0, 0), square(20, 0)])
    road = Polyline(((15, -50), (15, 50)))
    assert pairs(rng_build(b)) == {(0, 1)}
    assert rng_build(b, [road]) == []


def test_road_not_crossing_keeps_edge():
    b = make_buildings([square(0, 0), square(20, 0)])
    road = Polyline(((-50, 30), (50, 30)))
    assert len(rng_build(b, [road])) == 1


def test_edge_attributes():
    b = make_buildings([square(0, 0), square(20, 0), square(40, 10)], ids=[7, 3, 9])
    edges = rng_build(b)
    e = next(e for e in edges if (e.i, e.j) == (3, 7))
    assert e.le == pytest.approx(10)
    assert e.e_ori == pytest.approx(0)
    assert e.fr == pytest.approx(1)
    e2 = next(e for e in edges if (e.i, e.j) == (3, 9))
    assert e2.e_ori == pytest.approx(math.degrees(math.atan2(10, 20)))


def test_output_sorted_and_canonical():
    edges = rng_build(random_layout(3, 40))
    assert edges == sorted(edges, key=lambda e: (e.i, e.j))
    assert all(e.i < e.j and e.le >= 0 and 0 <= e.e_ori < 180 and 0 <= e.fr <= 1 for e in edges)


def test_empty_raises():
    with pytest.raises(EmptyDataset):
        rng_build([])


def test_single_building_has_no_edges():
    assert rng_build(make_buildings([square(0, 0)])) == []


def test_duplicate_ids_rejected():
    b = make_buildings([square(0, 0)], ids=[1]) + make_buildings([square(30, 0)], ids=[1])
    with pytest.raises(ValueError):
        rng_build(b)


def test_unknown_metric_rejected():
    with pytest.raises(ValueError):
        rng_build(make_buildings([square(0, 0)]), metric="manhattan")


def test_proximity_edge_validation():
    with pytest.raises(ValueError):
        ProximityEdge(2, 2, 1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        ProximityEdge(3, 2, 1.0, 0.0, 1.0)


# -- distance matrix --------------------------------------------------------------


def test_distance_matrix_examples():
    assert distance_matrix(make_buildings([square(0, 0)])).tolist() == [[0.0]]
    dm = distance_matrix(make_buildings([square(0, 0, 1), square(4, 0, 1)]))
    assert dm[0, 1] == pytest.approx(3.0) and dm[1, 0] == pytest.approx(3.0)


def test_distance_matrix_symmetric_and_matches_pairwise():
    b = random_layout(11, 10)
    dm = distance_matrix(b)
    assert np.abs(dm - dm.T).max() <= 1e-12
    assert np.all(np.diag(dm) == 0)
    for i in range(len(b)):
        for j in range(len(b)):
            if i != j:
                assert dm[i, j] == pytest.approx(geo.min_distance(b[i].footprint, b[j].footprint), abs=1e-9)


# -- properties -------------------------------------------------------------------


@given(st.integers(0, 100_000), st.integers(2, 45))
def test_rng_matches_definition(seed, n):
    b = random_layout(seed, n)
    dm = distance_matrix(b)
    expected = rng_oracle(dm)
    assert pairs(rng_build(b, exact=True)) == expected
    assert pairs(rng_build(b, exact=False)) == expected


@given(st.integers(0, 100_000), st.integers(2, 45))
def test_rng_contains_mst(seed, n):
    b = random_layout(seed, n)
    dm = distance_matrix(b)
    mst = minimum_spanning_tree(dm).tocoo()
    got = pairs(rng_build(b, exact=True))
    # ties make the MST non-unique; only MST edges of unique weight must appear
    weights = sorted(dm[np.triu_indices(n, 1)])
    for i, j, w in zip(mst.row, mst.col, mst.data):
        if weights.count(w) == 1:
            assert (min(i, j), max(i, j)) in got


@given(st.integers(0, 100_000), st.integers(4, 60))
def test_point_like_rng_inside_delaunay(seed, n):
    rng = random.Random(seed)
    pts = [(rng.uniform(0, 1000), rng.uniform(0, 1000)) for _ in range(n)]
    b = make_buildings([tiny(x, y) for x, y in pts])
    tri = Delaunay(np.array([bb.centroid for bb in b]))
    dl = set()
    for s in tri.simplices:
        for u, v in ((s[0], s[1]), (s[1], s[2]), (s[0], s[2])):
            dl.add((int(min(u, v)), int(max(u, v))))
    assert pairs(rng_build(b, exact=True)) <= dl


@given(st.integers(0, 100_000), st.integers(3, 30), st.data())
def test_removal_monotonicity(seed, n, data):
    b = random_layout(seed, n)
    dm = distance_matrix(b)
    drop = data.draw(st.integers(0, n - 1))
    before = pairs(rng_build(b, exact=True))
    rest = [x for k, x in enumerate(b) if k != drop]
    after = pairs(rng_build(rest, exact=True))
    for i, j in after - before:
        # a new edge may only appear when the removed building was its witness
        assert max(dm[i, drop], dm[j, drop]) < dm[i, j]


@given(st.integers(0, 100_000), st.integers(2, 40))
def test_edges_reverify_against_matrix(seed, n):
    b = random_layout(seed, n)
    dm = distance_matrix(b)
    for e in rng_build(b):
        assert not any(max(dm[e.i, k], dm[e.j, k]) < dm[e.i, e.j] for k in range(n) if k not in (e.i, e.j))
        assert e.le == pytest.approx(dm[e.i, e.j], abs=1e-9)


def test_pruned_equals_exact_on_mixed_sizes():
    for seed in range(8):
        rng = random.Random(seed)
        polys = []
        for k in range(120):
            size = rng.choice([2, 5, 30])
            polys.append(rect(rng.uniform(0, 600), rng.uniform(0, 600), size, size * rng.uniform(0.3, 1), rng.uniform(0, 180)))
        # overlapping footprints are legal input; the distance is then zero
        b = make_buildings(polys)
        assert pairs(rng_build(b, exact=False)) == pairs(rng_build(b, exact=True))


def test_centroid_metric_matches_oracle():
    b = random_layout(5, 30)
    c = np.array([x.centroid for x in b])
    dm = np.hypot(c[:, None, 0] - c[None, :, 0], c[:, None, 1] - c[None, :, 1])
    assert pairs(rng_build(b, metric="centroid")) == rng_oracle(dm)
    assert pairs(rng_build(b, metric="centroid", exact=True)) == rng_oracle(dm)
