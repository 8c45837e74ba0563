"""Index-free traversal baseline over a plain adjacency-list proximity graph.

This is the comparison point for the rule engine: the proximity graph keeps
an adjacency list and per-node/per-edge attribute maps, triples are found by
visiting node -> neighbour -> neighbour and testing the predicates on every
visit, and triples are merged by comparing every pair of them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .exceptions import EmptyDataset
from .geometry import Polyline, orientations_within
from .pipeline import (
    ALIGN_RULES,
    LinearPattern,
    TriplePattern,
    _UnionFind,
    aligned,
    assemble_patterns,
)
from .proximity import BuildingRecord, ProximityEdge, rng_build
from .relations import Thresholds, clamp_length, enumerate_adjacent_pairs, linear_triple, similarity


@dataclass
class ProximityGraph:
    """Adjacency lists plus attribute maps, without any secondary index.

    Schema ``A`` stores the similarity flag on each edge and, on each node,
    the list of ``(i, k)`` neighbour pairs it is the collinear middle of.
    Schema ``B`` stores only raw attributes and recomputes every relation.
    """

    schema: str
    adj: dict[int, list[int]] = field(default_factory=dict)
    node_attrs: dict[int, dict] = field(default_factory=dict)
    edge_attrs: dict[tuple[int, int], dict] = field(default_factory=dict)

    @property
    def v_count(self) -> int:
        return len(self.adj)

    @property
    def e_count(self) -> int:
        return len(self.edge_attrs)

    def edge(self, a: int, b: int) -> dict:
        return self.edge_attrs[(a, b) if a < b else (b, a)]

    @classmethod
    def build(
        cls,
        buildings: Sequence[BuildingRecord],
        edges: Sequence[ProximityEdge],
        t: Thresholds,
        schema: str = "A",
    ) -> "ProximityGraph":
        if schema not in ("A", "B"):
            raise ValueError(f"schema must be 'A' or 'B', got {schema!r}")
        pg = cls(schema)
        records = {b.id: b for b in buildings}
        for b in buildings:
            pg.adj[b.id] = []
            pg.node_attrs[b.id] = {"centroid": b.centroid}
            if schema == "B":
                pg.node_attrs[b.id].update(area=b.area, b_ori=b.b_ori, edge_cnt=b.edge_cnt)
        for e in edges:
            pg.adj[e.i].append(e.j)
            pg.adj[e.j].append(e.i)
            attrs = {"e_ori": e.e_ori}
            if schema == "A":
                attrs["sim"] = similarity(records[e.i], records[e.j], t).passed
            else:
                attrs.update(length=clamp_length(e.le, t.td), fr=e.fr)
            pg.edge_attrs[(e.i, e.j)] = attrs
        if schema == "A":
            for b in buildings:
                pg.node_attrs[b.id]["collinear"] = []
            for pair in enumerate_adjacent_pairs(edges):
                if linear_triple(pair.e_ij, pair.e_jk, t).passed:
                    pg.node_attrs[pair.j]["collinear"].append((pair.i, pair.k))
        return pg


def _ratio_ok(a: float, b: float, limit: float) -> bool:
    return max(a, b) / min(a, b) <= limit


def _similar_b(na: dict, nb: dict, t: Thresholds) -> bool:
    return (
        _ratio_ok(na["area"], nb["area"], t.delta1)
        and orientations_within(na["b_ori"], nb["b_ori"], t.delta2)
        and _ratio_ok(na["edge_cnt"], nb["edge_cnt"], t.delta3)
    )


def _collinear_b(e1: dict, e2: dict, t: Thresholds) -> bool:
    return (
        orientations_within(e1["e_ori"], e2["e_ori"], t.eta1)
        and _ratio_ok(e1["length"], e2["length"], t.eta2)
        and e1["fr"] >= t.eta3
        and e2["fr"] >= t.eta3
    )


def baseline_triples(pg: ProximityGraph, t: Thresholds) -> list[TriplePattern]:
    """Nested traversal: every node, every pair of its neighbours, predicates per visit."""
    found = []
    for j in sorted(pg.adj):
        nbrs = pg.adj[j]
        for i in nbrs:
            for k in nbrs:
                if not i < k:
                    continue
                e1, e2 = pg.edge(i, j), pg.edge(j, k)
                if pg.schema == "A":
                    if not (e1["sim"] and e2["sim"]):
                        continue
                    # linear scan of the stored relation list, no lookup index
                    if not any(p == (i, k) for p in pg.node_attrs[j]["collinear"]):
                        continue
                else:
                    na, nj, nk = pg.node_attrs[i], pg.node_attrs[j], pg.node_attrs[k]
                    if not (_similar_b(na, nj, t) and _similar_b(nj, nk, t)):
                        continue
                    if not _collinear_b(e1, e2, t):
                        continue
                found.append(((i, j, k), (e1["e_ori"], e2["e_ori"])))
    found.sort()
    return [TriplePattern(pid, b, o) for pid, (b, o) in enumerate(found)]


def baseline_merge(triples: Sequence[TriplePattern], eta1: float, rule: str = "listing") -> list[list[int]]:
    """Compare every pair of triples; union those sharing two buildings and aligned."""
    uf = _UnionFind(tp.p_id for tp in triples)
    n = len(triples)
    for a in range(n):
        ta = triples[a]
        for b in range(a + 1, n):
            tb = triples[b]
            shared = sum(1 for x in ta.b_ids if x in tb.b_ids)
            if shared >= 2 and aligned(ta, tb, eta1, rule):
                uf.union(ta.p_id, tb.p_id)
    return uf.groups()


def baseline_recognize_graph(
    pg: ProximityGraph,
    buildings: Sequence[BuildingRecord],
    edges: Sequence[ProximityEdge],
    t: Thresholds,
    align_rule: str = "listing",
) -> list[LinearPattern]:
    if align_rule not in ALIGN_RULES:
        raise ValueError(f"align_rule must be one of {ALIGN_RULES}, got {align_rule!r}")
    triples = baseline_triples(pg, t)
    components = baseline_merge(triples, t.eta1, align_rule)
    return assemble_patterns(triples, components, buildings, edges, t)


def baseline_recognize(
    buildings: Sequence[BuildingRecord],
    roads: Sequence[Polyline] = (),
    t: Optional[Thresholds] = None,
    *,
    schema: str = "A",
    align_rule: str = "listing",
    edges: Optional[Sequence[ProximityEdge]] = None,
    exact: bool = False,
    rng_metric: str = "footprint",
    fr_combine: str = "max",
) -> list[LinearPattern]:
    """Recognize linear patterns with the traversal baseline, from raw buildings."""
    if not buildings:
        raise EmptyDataset("no buildings")
    t = t or Thresholds()
    if edges is None:
        edges = rng_build(buildings, roads, exact=exact, metric=rng_metric, fr_combine=fr_combine)
    pg = ProximityGraph.build(buildings, edges, t, schema)
    return baseline_recognize_graph(pg, buildings, edges, t, align_rule)
