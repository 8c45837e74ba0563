from __future__ import annotations

import io
import itertools
import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from linea.exceptions import UnknownNode
from linea.graph import NodeSpec, PathPattern, PropertyGraph, RelSpec
from linea.pipeline import build_kg


def chain_graph() -> tuple[PropertyGraph, list[int]]:
    g = PropertyGraph()
    a, b, c = (g.add_node({"N"}, {"ID": i}) for i in range(3))
    g.add_edge(a, b, "R")
    g.add_edge(b, c, "R")
    return g, [a, b, c]


# -- node and edge basics -------------------------------------------------------


def test_add_node_and_lookup():
    g = PropertyGraph()
    n = g.add_node({"Building"}, {"ID": 7})
    m = g.add_node({"Building"}, {"ID": 8})
    assert n != m
    assert n in g.nodes_by_label("Building")
    assert g.get_prop(n, "ID") == 7
    assert g.get_prop(n, "missing", "dflt") == "dflt"


def test_add_edge_and_neighbors():
    g = PropertyGraph()
    a, b = g.add_node({"Building"}), g.add_node({"Building"})
    g.add_edge(a, b, "HAS_Proxi", {"EOri": 0.0})
    assert g.neighbors(a, "HAS_Proxi", "out") == [b]
    assert g.neighbors(b, "HAS_Proxi", "in") == [a]
    assert g.neighbors(b, "HAS_Proxi", "out") == []


def test_edge_to_missing_node():
    g = PropertyGraph()
    a = g.add_node({"Building"})
    with pytest.raises(UnknownNode):
        g.add_edge(a, 99, "HAS_Proxi")
    with pytest.raises(UnknownNode):
        g.neighbors(99)


def test_parallel_edges_allowed():
    g = PropertyGraph()
    a, b = g.add_node({"N"}), g.add_node({"N"})
    e1, e2 = g.add_edge(a, b, "R"), g.add_edge(a, b, "R")
    assert e1 != e2
    assert g.edge_count == 2
    assert g.neighbors(a, "R") == [b, b]


def test_edge_has_exactly_one_type():
    g, _ = chain_graph()
    assert all(isinstance(e.type, str) and e.type for e in g.edges.values())


# -- reach -----------------------------------------------------------------------


def test_reach_isolated_zero_hops():
    g = PropertyGraph()
    a = g.add_node({"N"})
    assert g.reach_varlen(a, "R", 0, None) == {a}


def test_reach_exact_one_hop():
    g, (a, b, c) = chain_graph()
    assert g.reach_varlen(a, "R", 1, 1) == {b}
    assert g.reach_varlen(a, "R", 0, None) == {a, b, c}
    assert g.reach_varlen(c, "R", 1, None, "in") == {a, b}
    assert g.reach_varlen(b, "R", 1, None, "both") == {a, b, c}


def test_reach_terminates_on_cycle():
    g = PropertyGraph()
    a, b = g.add_node({"N"}), g.add_node({"N"})
    g.add_edge(a, b, "R")
    g.add_edge(b, a, "R")
    assert g.reach_varlen(a, "R", 0, None) == {a, b}
    assert g.reach_varlen(a, "R", 2, 2) == {a}


def test_reach_unknown_start():
    with pytest.raises(UnknownNode):
        PropertyGraph().reach_varlen(0, "R")


def random_graph(seed: int, n: int, m: int, types=("R", "S")) -> PropertyGraph:
    rng = random.Random(seed)
    g = PropertyGraph()
    for i in range(n):
        g.add_node({rng.choice(["A", "B"])}, {"ID": i})
    for _ in range(m):
        g.add_edge(rng.randrange(n), rng.randrange(n), rng.choice(types))
    return g


def bfs_oracle(g: PropertyGraph, start: int, etype: str, lo: int, hi: int, direction: str) -> set[int]:
    frontier = {start}
    out = {start} if lo == 0 else set()
    for depth in range(1, hi + 1):
        nxt = set()
        for v in frontier:
            for e in g.edges.values():
                if e.type != etype:
                    continue
                if direction in ("out", "both") and e.src == v:
                    nxt.add(e.dst)
                if direction in ("in", "both") and e.dst == v:
                    nxt.add(e.src)
        frontier = nxt
        if depth >= lo:
            out |= nxt
    return out


@given(st.integers(0, 10_000), st.integers(1, 12), st.integers(0, 25), st.integers(0, 3), st.integers(0, 4),
       st.sampled_from(["out", "in", "both"]))
def test_reach_matches_bounded_bfs(seed, n, m, lo, extra, direction):
    g = random_graph(seed, n, m)
    hi = lo + extra
    for s in g.nodes:
        assert g.reach_varlen(s, "R", lo, hi, direction) == bfs_oracle(g, s, "R", lo, hi, direction)


@given(st.integers(0, 10_000), st.integers(1, 12), st.integers(0, 25))
def test_reach_closure_is_fixed_point(seed, n, m):
    g = random_graph(seed, n, m)
    for s in g.nodes:
        closure = g.reach_varlen(s, "R", 0, None)
        # an unbounded walk can never need more than n hops
        assert closure == bfs_oracle(g, s, "R", 0, n, "out")
        for v in closure:
            assert g.reach_varlen(v, "R", 0, None) <= closure


# -- merge -----------------------------------------------------------------------


def test_merge_idempotent():
    g = PropertyGraph()
    a = g.merge_node({"Triple_Pattern"}, {"bIDList": [1, 2, 3]})
    b = g.merge_node({"Triple_Pattern"}, {"bIDList": [1, 2, 3]})
    assert a == b and g.node_count == 1


def test_merge_list_order_matters():
    g = PropertyGraph()
    a = g.merge_node({"Triple_Pattern"}, {"bIDList": [1, 2, 3]})
    b = g.merge_node({"Triple_Pattern"}, {"bIDList": [3, 2, 1]})
    assert a != b


def test_merge_finds_added_node():
    g = PropertyGraph()
    a = g.add_node({"Building"}, {"ID": 4, "tags": ["x"]})
    assert g.merge_node({"Building"}, {"ID": 4, "tags": ["x"]}) == a
    assert g.merge_node({"Building"}, {"ID": 4}) != a  # props must match exactly
    assert g.merge_node({"Building", "Extra"}, {"ID": 4, "tags": ["x"]}) != a


def test_merge_sees_set_prop():
    g = PropertyGraph()
    a = g.add_node({"N"}, {"k": 1})
    g.set_prop(a, "k", 2)
    assert g.merge_node({"N"}, {"k": 2}) == a
    assert g.merge_node({"N"}, {"k": 1}) != a


# -- index coherence ---------------------------------------------------------------

ops = st.lists(
    st.one_of(
        st.tuples(st.just("node"), st.sampled_from(["A", "B", "C"]), st.integers(0, 5)),
        st.tuples(st.just("edge"), st.integers(0, 50), st.integers(0, 50), st.sampled_from(["R", "S"])),
        st.tuples(st.just("merge"), st.sampled_from(["A", "B"]), st.integers(0, 3)),
        st.tuples(st.just("set"), st.integers(0, 50), st.integers(0, 5)),
    ),
    max_size=60,
)


@given(ops)
def test_index_coherence(seq):
    g = PropertyGraph()
    for op in seq:
        if op[0] == "node":
            g.add_node({op[1]}, {"v": op[2]})
        elif op[0] == "merge":
            g.merge_node({op[1]}, {"v": op[2]})
        elif g.node_count:
            if op[0] == "edge":
                g.add_edge(op[1] % g.node_count, op[2] % g.node_count, op[3])
            else:
                g.set_prop(op[1] % g.node_count, "v", op[2])
    assert g.index_snapshot() == g.rebuilt_index_snapshot()
    c = g.copy()
    assert c.index_snapshot() == g.index_snapshot()
    assert list(c.iter_jsonl()) == list(g.iter_jsonl())


# -- match_path ----------------------------------------------------------------------


def test_match_single_edge_both_ways():
    g = PropertyGraph()
    a, b = g.add_node({"Building"}), g.add_node({"Building"})
    g.add_edge(a, b, "HAS_Proxi")
    fwd = PathPattern((NodeSpec("Building"), NodeSpec("Building")), (RelSpec("HAS_Proxi", "out"),))
    rev = PathPattern((NodeSpec("Building"), NodeSpec("Building")), (RelSpec("HAS_Proxi", "in"),))
    assert [(ns[0].id, ns[1].id) for ns, _ in g.match_path(fwd)] == [(a, b)]
    got_rev = [(ns[0].id, ns[1].id) for ns, _ in g.match_path(rev)]
    assert got_rev == [(b, a)]
    rev_from_a = list(g.match_path(rev, bound={0: a}))
    assert rev_from_a == []


def brute_force(g: PropertyGraph, pattern: PathPattern) -> set[tuple]:
    out = set()
    n = len(pattern.nodes)
    for combo in itertools.product(list(g.nodes), repeat=n):
        if any(
            spec.label is not None and spec.label not in g.nodes[nid].labels
            for spec, nid in zip(pattern.nodes, combo)
        ):
            continue
        choices = []
        for r, rel in enumerate(pattern.rels):
            u, v = combo[r], combo[r + 1]
            opts = []
            for e in g.edges.values():
                if rel.etype is not None and e.type != rel.etype:
                    continue
                if rel.direction in ("out", "both") and (e.src, e.dst) == (u, v):
                    opts.append(e.id)
                elif rel.direction in ("in", "both") and (e.src, e.dst) == (v, u):
                    opts.append(e.id)
            choices.append(opts)
        for es in itertools.product(*choices):
            if len(set(es)) == len(es):
                out.add((combo, es))
    return out


def as_keys(g, pattern):
    got = [(tuple(x.id for x in ns), tuple(e.id for e in es)) for ns, es in g.match_path(pattern)]
    assert len(got) == len(set(got)), "duplicate binding"
    return set(got)


@given(
    st.integers(0, 10_000),
    st.integers(1, 7),
    st.integers(0, 14),
    st.lists(st.tuples(st.sampled_from(["R", "S", None]), st.sampled_from(["out", "in", "both"])), min_size=1, max_size=3),
    st.lists(st.sampled_from(["A", "B", None]), min_size=4, max_size=4),
)
def test_match_path_equals_brute_force(seed, n, m, rels, labels):
    g = random_graph(seed, n, m)
    pattern = PathPattern(
        tuple(NodeSpec(lab) for lab in labels[: len(rels) + 1]),
        tuple(RelSpec(t, d) for t, d in rels),
    )
    assert as_keys(g, pattern) == brute_force(g, pattern)


def test_match_path_on_crossing_kg(crossing):
    kg = build_kg(crossing).graph
    pattern = PathPattern(
        (NodeSpec("Building"), NodeSpec("Building"), NodeSpec("Building")),
        (RelSpec("HAS_Proxi", "both"), RelSpec("HAS_Proxi", "both")),
    )
    got = as_keys(kg, pattern)
    assert got == brute_force(kg, pattern)
    # every ordered path of two distinct proximity edges
    assert len(got) == 2 * sum(
        len(kg.neighbors(v, "HAS_Proxi", "both")) * (len(kg.neighbors(v, "HAS_Proxi", "both")) - 1) // 2
        for v in kg.nodes_by_label("Building")
    )


def test_jsonl_dump_is_stable():
    g, _ = chain_graph()
    buf = io.StringIO()
    g.dump_jsonl(buf)
    lines = buf.getvalue().splitlines()
    assert len(lines) == 5
    first = json.loads(lines[0])
    assert list(first) == ["kind", "id", "labels", "props"]
    assert json.loads(lines[-1])["kind"] == "edge"
