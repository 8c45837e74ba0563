"""Knowledge-graph construction and linear pattern recognition.

Two graph schemas are supported. Schema ``A`` stores every relation up front:
proximity and similarity edges plus, on each building, the ids of the
collinear triples it belongs to. Schema ``B`` stores only raw attributes
(area, orientation, edge count, edge length and facing ratio) and leaves the
relation derivation to a rule script at recognition time.

Recognition runs either through the rule engine (``mode="engine"``) or by
calling the predicates in :mod:`linea.relations` directly (``mode="direct"``);
both feed the same merge and ordering step.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .exceptions import EmptyDataset
from .geometry import Polyline, orientations_within
from .graph import PropertyGraph
from .proximity import BuildingRecord, ProximityEdge, rng_build
from .relations import (
    AdjacentPair,
    Thresholds,
    clamp_length,
    enumerate_adjacent_pairs,
    similarity,
    triple_pattern_passes,
)
from .rule_engine import execute
from .rule_engine.runtime import Path
from .rules import (
    DERIVATION,
    DERIVATION_LISTING,
    RECOGNITION,
    RECOGNITION_LISTING,
    load_script,
)

log = logging.getLogger(__name__)

SCHEMAS = ("A", "B")
MODES = ("engine", "direct")
ALIGN_RULES = ("listing", "outer_edges")


@dataclass(frozen=True)
class TriplePattern:
    """Three buildings ``(i, j, k)`` with ``j`` the shared middle and ``i < k``."""

    p_id: int
    b_ids: tuple[int, int, int]
    oris: tuple[float, float]


@dataclass(frozen=True)
class LinearPattern:
    building_ids: tuple[int, ...]
    source_triples: frozenset = field(default_factory=frozenset)
    # every consecutive triple of the ordered chain passes the triple rule
    strict: bool = True

    @property
    def id_set(self) -> frozenset:
        return frozenset(self.building_ids)

    def __len__(self) -> int:
        return len(self.building_ids)


@dataclass
class KnowledgeGraph:
    graph: PropertyGraph
    schema: str
    buildings: list[BuildingRecord]
    edges: list[ProximityEdge]
    thresholds: Thresholds
    triples: list[TriplePattern] = field(default_factory=list)

    @property
    def by_id(self) -> dict[int, BuildingRecord]:
        return {b.id: b for b in self.buildings}

    def copy(self) -> "KnowledgeGraph":
        return KnowledgeGraph(
            self.graph.copy(), self.schema, self.buildings, self.edges, self.thresholds, list(self.triples)
        )


# -- construction ---------------------------------------------------------------


def _proximity(
    buildings: Sequence[BuildingRecord],
    roads: Sequence[Polyline],
    edges: Optional[Sequence[ProximityEdge]],
    exact: bool,
    metric: str,
    fr_combine: str,
) -> list[ProximityEdge]:
    if not buildings:
        raise EmptyDataset("no buildings")
    if edges is not None:
        return list(edges)
    return rng_build(buildings, roads, exact=exact, metric=metric, fr_combine=fr_combine)


def direct_triples(
    buildings: Sequence[BuildingRecord], edges: Sequence[ProximityEdge], t: Thresholds
) -> list[TriplePattern]:
    """All triple patterns by direct predicate evaluation, p_ids in (i, j, k) order."""
    records = {b.id: b for b in buildings}
    out = []
    for pair in enumerate_adjacent_pairs(edges):
        if triple_pattern_passes(records, pair, t):
            out.append(TriplePattern(len(out), (pair.i, pair.j, pair.k), (pair.e_ij.e_ori, pair.e_jk.e_ori)))
    return out


def build_kg_precomputed(
    buildings: Sequence[BuildingRecord],
    roads: Sequence[Polyline] = (),
    t: Optional[Thresholds] = None,
    *,
    edges: Optional[Sequence[ProximityEdge]] = None,
    exact: bool = False,
    rng_metric: str = "footprint",
    fr_combine: str = "max",
) -> KnowledgeGraph:
    """Schema A: proximity, similarity and triple membership stored up front."""
    t = t or Thresholds()
    edges = _proximity(buildings, roads, edges, exact, rng_metric, fr_combine)
    triples = direct_triples(buildings, edges, t)
    members: dict[int, list[int]] = {b.id: [] for b in buildings}
    middles: dict[int, list[int]] = {b.id: [] for b in buildings}
    for tp in triples:
        for b in tp.b_ids:
            members[b].append(tp.p_id)
        middles[tp.b_ids[1]].append(tp.p_id)

    g = PropertyGraph()
    node_of = {}
    for b in buildings:
        node_of[b.id] = g.add_node(["Building"], {"ID": b.id, "pIDList": members[b.id], "midPIDList": middles[b.id]})
    records = {b.id: b for b in buildings}
    for e in edges:
        g.add_edge(node_of[e.i], node_of[e.j], "HAS_Proxi", {"EOri": e.e_ori})
    for e in edges:
        if similarity(records[e.i], records[e.j], t).passed:
            g.add_edge(node_of[e.i], node_of[e.j], "HAS_Sim")
    return KnowledgeGraph(g, "A", list(buildings), edges, t, triples)


def build_kg_attributes(
    buildings: Sequence[BuildingRecord],
    roads: Sequence[Polyline] = (),
    t: Optional[Thresholds] = None,
    *,
    edges: Optional[Sequence[ProximityEdge]] = None,
    exact: bool = False,
    rng_metric: str = "footprint",
    fr_combine: str = "max",
) -> KnowledgeGraph:
    """Schema B: raw attributes only; relations are derived by rule at query time.

    ``Length`` is stored already clamped to ``td`` so the length-ratio rule
    can read it directly.
    """
    t = t or Thresholds()
    edges = _proximity(buildings, roads, edges, exact, rng_metric, fr_combine)
    g = PropertyGraph()
    node_of = {}
    for b in buildings:
        node_of[b.id] = g.add_node(
            ["Building"], {"ID": b.id, "Area": b.area, "BOri": b.b_ori, "EdgeCount": b.edge_cnt}
        )
    for e in edges:
        g.add_edge(
            node_of[e.i],
            node_of[e.j],
            "HAS_Proxi",
            {"EOri": e.e_ori, "Length": clamp_length(e.le, t.td), "FR": e.fr},
        )
    return KnowledgeGraph(g, "B", list(buildings), edges, t)


def build_kg(buildings, roads=(), t=None, schema: str = "A", **kw) -> KnowledgeGraph:
    if schema not in SCHEMAS:
        raise ValueError(f"schema must be one of {SCHEMAS}, got {schema!r}")
    builder = build_kg_precomputed if schema == "A" else build_kg_attributes
    return builder(buildings, roads, t, **kw)


# -- merging --------------------------------------------------------------------


def aligned(a: TriplePattern, b: TriplePattern, eta1: float, rule: str = "listing") -> bool:
    """Alignment check for two triples that share at least two buildings."""
    if rule == "listing":
        return all(orientations_within(x, y, eta1) for x in b.oris for y in a.oris)
    if rule == "outer_edges":
        ea, eb = _triple_edges(a), _triple_edges(b)
        outer_a = [o for e, o in ea.items() if e not in eb]
        outer_b = [o for e, o in eb.items() if e not in ea]
        return all(orientations_within(x, y, eta1) for x in outer_a for y in outer_b)
    raise ValueError(f"align_rule must be one of {ALIGN_RULES}, got {rule!r}")


def _triple_edges(tp: TriplePattern) -> dict[frozenset, float]:
    i, j, k = tp.b_ids
    return {frozenset((i, j)): tp.oris[0], frozenset((j, k)): tp.oris[1]}


class _UnionFind:
    def __init__(self, items: Iterable):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra

    def groups(self) -> list[list]:
        out: dict = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return [sorted(v) for _, v in sorted(out.items())]


def merge_direct(triples: Sequence[TriplePattern], eta1: float, rule: str = "listing") -> list[list[int]]:
    """Connected components (lists of p_ids) of the alignment relation.

    Candidate pairs come from a building-to-triples index, so only triples
    that actually share a building are compared.
    """
    uf = _UnionFind(tp.p_id for tp in triples)
    index = {tp.p_id: tp for tp in triples}
    by_building: dict[int, list[int]] = {}
    for tp in triples:
        for b in tp.b_ids:
            by_building.setdefault(b, []).append(tp.p_id)
    for tp in triples:
        shared: dict[int, int] = {}
        for b in tp.b_ids:
            for pid in by_building[b]:
                if pid > tp.p_id:
                    shared[pid] = shared.get(pid, 0) + 1
        for pid, count in shared.items():
            if count >= 2 and aligned(tp, index[pid], eta1, rule):
                uf.union(tp.p_id, pid)
    return uf.groups()


# -- ordering and assembly -------------------------------------------------------


def order_pattern(ids: Iterable[int], buildings: Mapping[int, BuildingRecord]) -> list[int]:
    """Order ids along the principal direction of their centroids.

    The direction is the leading right singular vector of the centered
    centroids, with its sign fixed so the result does not depend on the SVD
    implementation; the chain is then reversed if needed so it starts with the
    smaller endpoint id.
    """
    ids = sorted(set(ids))
    if len(ids) < 2:
        return ids
    pts = np.array([buildings[i].centroid for i in ids], dtype=float)
    centered = pts - pts.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    u = vt[0]
    if u[0] < 0 or (u[0] == 0 and u[1] < 0):
        u = -u
    proj = centered @ u
    scale = max(float(np.abs(proj).max()), 1.0)
    keyed = sorted(zip(np.round(proj / scale, 9), ids))
    chain = [i for _, i in keyed]
    if chain[0] > chain[-1]:
        chain.reverse()
    return chain


def _chain_is_strict(
    chain: Sequence[int],
    records: Mapping[int, BuildingRecord],
    edge_of: Mapping[tuple[int, int], ProximityEdge],
    t: Thresholds,
) -> bool:
    for a, b, c in zip(chain, chain[1:], chain[2:]):
        e1 = edge_of.get((min(a, b), max(a, b)))
        e2 = edge_of.get((min(b, c), max(b, c)))
        if e1 is None or e2 is None:
            return False
        i, k, ea, eb = (a, c, e1, e2) if a < c else (c, a, e2, e1)
        if not triple_pattern_passes(records, AdjacentPair(i, b, k, ea, eb), t):
            return False
    return True


def assemble_patterns(
    triples: Sequence[TriplePattern],
    components: Iterable[Iterable[int]],
    buildings: Sequence[BuildingRecord],
    edges: Sequence[ProximityEdge],
    t: Thresholds,
) -> list[LinearPattern]:
    """Turn triple components into ordered, de-duplicated linear patterns."""
    index = {tp.p_id: tp for tp in triples}
    records = {b.id: b for b in buildings}
    edge_of = {(e.i, e.j): e for e in edges}
    by_set: dict[frozenset, set[int]] = {}
    for comp in components:
        comp = list(comp)
        if not comp:
            continue
        members = frozenset(b for pid in comp for b in index[pid].b_ids)
        by_set.setdefault(members, set()).update(comp)
    out = []
    for members, pids in by_set.items():
        chain = order_pattern(members, records)
        strict = _chain_is_strict(chain, records, edge_of, t)
        if not strict:
            log.debug("pattern %s entered through merge closure only", chain)
        out.append(LinearPattern(tuple(chain), frozenset(pids), strict))
    out.sort(key=lambda p: p.building_ids)
    return out


# -- recognition ----------------------------------------------------------------


def _engine_triples(kg: KnowledgeGraph, t: Thresholds, listing: bool) -> None:
    """Schema B: derive HAS_Sim and collinear triples by rule, then fill pIDList."""
    g = kg.graph
    script = load_script(DERIVATION_LISTING if listing else DERIVATION, t)
    table = execute(script, g).table
    found = sorted({tuple(n.props["ID"] for n in row) for row in table.rows})
    members: dict[int, list[int]] = {}
    middles: dict[int, list[int]] = {}
    for pid, (i, j, k) in enumerate(found):
        for b in (i, j, k):
            members.setdefault(b, []).append(pid)
        middles.setdefault(j, []).append(pid)
    for nid in g.nodes_by_label("Building"):
        bid = g.nodes[nid].props["ID"]
        g.set_prop(nid, "pIDList", members.get(bid, []))
        g.set_prop(nid, "midPIDList", middles.get(bid, []))


def recognize_engine(
    kg: KnowledgeGraph,
    t: Optional[Thresholds] = None,
    listing: bool = False,
    create_reverse: bool = False,
) -> tuple[list[TriplePattern], list[list[int]]]:
    """Run the rule scripts against ``kg.graph`` (mutating it).

    Returns the Triple_Pattern nodes as :class:`TriplePattern` values (p_id
    is the graph node id) and the alignment components read off the
    returned closure paths.
    """
    t = t or kg.thresholds
    if kg.schema == "B":
        _engine_triples(kg, t, listing)
    script = load_script(RECOGNITION_LISTING if listing else RECOGNITION, t)
    result = execute(script, kg.graph, create_reverse=create_reverse)
    g = kg.graph
    triples = []
    for nid in g.nodes_by_label("Triple_Pattern"):
        props = g.nodes[nid].props
        triples.append(TriplePattern(nid, tuple(props["bIDList"]), tuple(props["OriList"])))
    uf = _UnionFind(tp.p_id for tp in triples)
    for row in result.table.rows:
        for value in row:
            if isinstance(value, Path):
                uf.union(value.start.id, value.end.id)
    return triples, uf.groups()


def recognize_linear_patterns(
    kg: KnowledgeGraph,
    t: Optional[Thresholds] = None,
    mode: str = "engine",
    align_rule: str = "listing",
    *,
    listing: bool = False,
    create_reverse: bool = False,
    in_place: bool = False,
) -> list[LinearPattern]:
    """Recognize linear patterns on a knowledge graph of either schema.

    ``listing=True`` runs the rule scripts as published (directed arrows and
    the ``Extend_true`` closure) instead of the normalized ones. The engine
    mutates its graph; unless ``in_place`` is set it works on a copy.
    """
    t = t or kg.thresholds
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if align_rule not in ALIGN_RULES:
        raise ValueError(f"align_rule must be one of {ALIGN_RULES}, got {align_rule!r}")
    if mode == "direct":
        triples = direct_triples(kg.buildings, kg.edges, t)
        components = merge_direct(triples, t.eta1, align_rule)
    else:
        if align_rule != "listing":
            raise ValueError("the rule engine implements the listing alignment rule only")
        work = kg if in_place else kg.copy()
        triples, components = recognize_engine(work, t, listing=listing, create_reverse=create_reverse)
    return assemble_patterns(triples, components, kg.buildings, kg.edges, t)
