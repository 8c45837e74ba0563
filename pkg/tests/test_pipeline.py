from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from linea.baseline import baseline_recognize
from linea.exceptions import EmptyDataset
from linea.pipeline import (
    TriplePattern,
    aligned,
    build_kg,
    direct_triples,
    merge_direct,
    order_pattern,
    recognize_linear_patterns,
)
from linea.proximity import make_buildings, rng_build
from linea.relations import Thresholds, similarity

from conftest import mixed_dataset, rect, row_of_squares, square

T = Thresholds()


def id_sets(patterns) -> set[frozenset]:
    return {p.id_set for p in patterns}


def pid_lists(kg) -> dict[int, list[int]]:
    g = kg.graph
    return {g.nodes[n].props["ID"]: g.nodes[n].props["pIDList"] for n in g.nodes_by_label("Building")}


# -- schema A ----------------------------------------------------------------------


def test_crossing_memberships(crossing):
    kg = build_kg(crossing)
    assert [tp.b_ids for tp in kg.triples] == [(1, 2, 6), (2, 3, 4), (3, 4, 5)]
    lists = pid_lists(kg)
    assert lists[3] == [1, 2] and len(lists[3]) == 2
    assert lists == {1: [0], 2: [0, 1], 3: [1, 2], 4: [1, 2], 5: [2], 6: [0]}


def test_two_dissimilar_buildings():
    b = make_buildings([square(0, 0, 10), rect(40, 0, 40, 30)])
    g = build_kg(b).graph
    assert len(g.edges_by_type("HAS_Proxi")) == 1
    assert g.edges_by_type("HAS_Sim") == []
    assert all(v == [] for v in pid_lists(build_kg(b)).values())


def test_row_of_four_memberships():
    assert pid_lists(build_kg(row_of_squares(4))) == {0: [0], 1: [0, 1], 2: [0, 1], 3: [1]}


def test_empty_dataset():
    with pytest.raises(EmptyDataset):
        build_kg([])
    with pytest.raises(EmptyDataset):
        baseline_recognize([])


def test_unknown_schema():
    with pytest.raises(ValueError):
        build_kg(row_of_squares(3), schema="C")


# -- schema B ----------------------------------------------------------------------


def test_schema_b_attributes():
    kg = build_kg(row_of_squares(3), schema="B")
    g = kg.graph
    node = g.nodes[g.nodes_by_label("Building")[0]]
    assert set(node.props) == {"ID", "Area", "BOri", "EdgeCount"}
    e = g.edges[g.edges_by_type("HAS_Proxi")[0]]
    assert set(e.props) == {"EOri", "Length", "FR"}


def test_schema_b_clamps_length():
    b = make_buildings([square(0, 0), square(11, 0)])
    g = build_kg(b, schema="B").graph
    assert g.edges[g.edges_by_type("HAS_Proxi")[0]].props["Length"] == T.td


def test_single_building_schema_b():
    g = build_kg(make_buildings([square(0, 0)]), schema="B").graph
    assert (g.node_count, g.edge_count) == (1, 0)


@given(st.integers(0, 10_000))
def test_schema_counts_differ_by_similarity_edges(seed):
    b, _ = mixed_dataset(seed, 80)
    edges = rng_build(b)
    a = build_kg(b, edges=edges).graph
    bb = build_kg(b, edges=edges, schema="B").graph
    assert a.node_count == bb.node_count
    assert a.edge_count - len(a.edges_by_type("HAS_Sim")) == bb.edge_count


# -- recognition examples ---------------------------------------------------------------


@pytest.mark.parametrize("mode", ["engine", "direct"])
def test_row_of_five_is_one_pattern(row5, mode):
    out = recognize_linear_patterns(build_kg(row5), mode=mode)
    assert [p.building_ids for p in out] == [(0, 1, 2, 3, 4)]
    assert out[0].strict


def test_offset_square_is_left_out():
    b = row_of_squares(5) + make_buildings([square(40, 20)], ids=[5])
    for mode in ("engine", "direct"):
        out = recognize_linear_patterns(build_kg(b), mode=mode)
        assert [p.building_ids for p in out] == [(0, 1, 2, 3, 4)]


def test_crossing_patterns(crossing):
    for mode in ("engine", "direct"):
        out = recognize_linear_patterns(build_kg(crossing), mode=mode)
        assert [p.building_ids for p in out] == [(1, 2, 6), (2, 3, 4, 5)]
    assert [p.building_ids for p in baseline_recognize(crossing)] == [(1, 2, 6), (2, 3, 4, 5)]


def test_no_buildings_in_line():
    b = make_buildings([square(0, 0), square(20, 0)])
    assert recognize_linear_patterns(build_kg(b)) == []
    assert baseline_recognize(make_buildings([square(0, 0)])) == []


def test_engine_rejects_outer_edges_rule(row5):
    with pytest.raises(ValueError):
        recognize_linear_patterns(build_kg(row5), mode="engine", align_rule="outer_edges")
    out = recognize_linear_patterns(build_kg(row5), mode="direct", align_rule="outer_edges")
    assert [p.building_ids for p in out] == [(0, 1, 2, 3, 4)]


def test_recognition_leaves_graph_untouched(row5):
    kg = build_kg(row5)
    before = list(kg.graph.iter_jsonl())
    recognize_linear_patterns(kg)
    assert list(kg.graph.iter_jsonl()) == before


def test_listing_mode_runs_verbatim(crossing):
    # the published closure walks Extend_true edges that nothing creates, so
    # every triple stays on its own
    out = recognize_linear_patterns(build_kg(crossing), listing=True)
    assert sorted(p.building_ids for p in out) == [(1, 2, 6), (2, 3, 4), (3, 4, 5)]


def test_create_reverse_gives_same_patterns(crossing):
    a = recognize_linear_patterns(build_kg(crossing))
    b = recognize_linear_patterns(build_kg(crossing), create_reverse=True)
    assert a == b


# -- merging --------------------------------------------------------------------------------


def test_aligned_listing_rule():
    a = TriplePattern(0, (1, 2, 3), (0.0, 10.0))
    b = TriplePattern(1, (2, 3, 4), (10.0, 20.0))
    assert not aligned(a, b, 15)  # 20 vs 0 fails
    assert aligned(a, b, 20)
    # outer edges only: 0 vs 20
    assert not aligned(a, b, 15, "outer_edges")
    c = TriplePattern(2, (2, 3, 4), (10.0, 5.0))
    assert aligned(a, c, 15, "outer_edges")
    with pytest.raises(ValueError):
        aligned(a, b, 15, "bogus")


def test_merge_requires_two_shared_buildings():
    a = TriplePattern(0, (1, 2, 3), (0.0, 0.0))
    b = TriplePattern(1, (3, 4, 5), (0.0, 0.0))  # shares one building
    c = TriplePattern(2, (2, 3, 4), (0.0, 0.0))
    assert merge_direct([a, b], 15) == [[0], [1]]
    assert merge_direct([a, b, c], 15) == [[0, 1, 2]]


def test_merge_wraps_orientation():
    a = TriplePattern(0, (1, 2, 3), (179.0, 1.0))
    b = TriplePattern(1, (2, 3, 4), (2.0, 178.0))
    assert merge_direct([a, b], 15) == [[0, 1]]


# -- ordering ---------------------------------------------------------------------------------


def test_order_horizontal_row():
    b = {x.id: x for x in row_of_squares(5)}
    assert order_pattern([3, 0, 4, 1, 2], b) == [0, 1, 2, 3, 4]


def test_order_reversed_ids_canonical():
    recs = make_buildings([square(i * 20, 0) for i in range(4)], ids=[9, 5, 7, 2])
    b = {x.id: x for x in recs}
    # left to right reads 9 5 7 2; the canonical form starts at the smaller end
    assert order_pattern([9, 5, 7, 2], b) == [2, 7, 5, 9]
    assert order_pattern([2, 7, 5, 9], b) == [2, 7, 5, 9]


def test_order_zigzag_matches_x_sort():
    recs = make_buildings([square(i * 20, (-1) ** i * 1.5) for i in range(6)])
    b = {x.id: x for x in recs}
    assert order_pattern(range(6), b) == [0, 1, 2, 3, 4, 5]


@given(st.integers(0, 10_000), st.floats(0, 180))
def test_order_along_rotated_row(seed, deg):
    rng = random.Random(seed)
    n = rng.randint(3, 9)
    polys = [square(i * 20, 0).rotated(deg) for i in range(n)]
    ids = rng.sample(range(100), n)
    b = {x.id: x for x in make_buildings(polys, ids=ids)}
    chain = order_pattern(ids, b)
    assert chain in (ids, ids[::-1])
    assert chain[0] < chain[-1]


# -- cross-implementation properties -----------------------------------------------------------


@given(st.integers(0, 100_000))
def test_three_way_equivalence(seed):
    b, _ = mixed_dataset(seed, 120)
    edges = rng_build(b)
    base = id_sets(baseline_recognize(b, edges=edges))
    for schema in ("A", "B"):
        kg = build_kg(b, schema=schema, edges=edges)
        assert id_sets(recognize_linear_patterns(kg, mode="engine")) == base
        assert id_sets(recognize_linear_patterns(kg, mode="direct")) == base
    assert id_sets(baseline_recognize(b, edges=edges, schema="B")) == base


@given(st.integers(0, 100_000))
def test_pattern_invariants(seed):
    b, _ = mixed_dataset(seed, 120)
    kg = build_kg(b)
    rec = kg.by_id
    adjacent = {(e.i, e.j) for e in kg.edges}
    triples = {tp.p_id: tp for tp in kg.triples}
    for p in recognize_linear_patterns(kg, mode="direct"):
        assert len(p.building_ids) >= 3 and len(set(p.building_ids)) == len(p.building_ids)
        assert p.building_ids[0] < p.building_ids[-1]
        assert set().union(*(triples[i].b_ids for i in p.source_triples)) == set(p.building_ids)
        if p.strict:
            for x, y in zip(p.building_ids, p.building_ids[1:]):
                assert (min(x, y), max(x, y)) in adjacent
                assert similarity(rec[x], rec[y], T).passed


loosen = st.tuples(
    st.floats(1, 1.5), st.floats(0, 10), st.floats(1, 1.5), st.floats(0, 10), st.floats(1, 1.5), st.floats(0.5, 1)
)


@given(st.integers(0, 100_000), loosen)
def test_loosening_thresholds_keeps_triples(seed, f):
    b, _ = mixed_dataset(seed, 80)
    edges = rng_build(b)
    loose = T.with_(
        delta1=T.delta1 * f[0], delta2=T.delta2 + f[1], delta3=T.delta3 * f[2],
        eta1=T.eta1 + f[3], eta2=T.eta2 * f[4], eta3=T.eta3 * f[5],
    )
    tight = {tp.b_ids for tp in direct_triples(b, edges, T)}
    assert tight <= {tp.b_ids for tp in direct_triples(b, edges, loose)}
